#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "doctrina/analysis.hpp"

namespace doctrina {

struct RawProduct {
    std::string a, b, vertex, pr1, pr2;
    bool operator==(const RawProduct&) const = default;
};

struct RawPullback {
    std::string f, g, vertex, to_c, to_a;
    bool operator==(const RawPullback&) const = default;
};

/// Chosen limits tabled over a category. Anything not tabled is searched.
struct RawStructure {
    std::string name;
    std::string category;
    std::optional<std::string> terminal;
    std::vector<RawProduct> products;
    std::vector<RawPullback> pullbacks;
    bool operator==(const RawStructure&) const = default;
};

/// Either an explicit member list or a preset: all, identities, isos, monos,
/// projections.
struct RawClass {
    std::string name;
    std::string category;
    std::optional<std::string> preset;
    std::vector<std::string> members;
    bool operator==(const RawClass&) const = default;
};

struct RawDoctrine {
    std::string name;
    std::string on;  // a structure, or a category with searched limits
    std::vector<std::pair<std::string, std::string>> fibres;  // object, semilattice
    std::vector<std::pair<std::string, std::vector<std::string>>> reindex;
    bool operator==(const RawDoctrine&) const = default;
};

struct RawSelection {
    std::string name;
    std::string doctrine;
    std::vector<std::pair<std::string, std::vector<std::string>>> elements;
    bool operator==(const RawSelection&) const = default;
};

struct RawBundle {
    std::string name;
    std::string description;
    std::optional<std::string> doctrine;
    std::optional<std::string> selection;
    std::optional<std::string> semilattice;
    bool operator==(const RawBundle&) const = default;
};

/// Finite sets of the listed cardinalities and all functions between them
/// (only the pullback-stable ones when `stable`).
struct RawFinSets {
    std::string name;
    std::vector<int> sizes;
    bool stable = false;
    bool operator==(const RawFinSets&) const = default;
};

struct NamedCategory {
    std::string name;
    RawCategory raw;
};

struct NamedSemilattice {
    std::string name;
    RawSemilattice raw;
};

/// The parsed, unresolved contents of an instance file.
struct InstanceFile {
    std::vector<NamedCategory> categories;
    std::vector<RawFinSets> finsets;
    std::vector<NamedSemilattice> semilattices;
    std::vector<RawStructure> structures;
    std::vector<RawClass> classes;
    std::vector<RawDoctrine> doctrines;
    std::vector<RawSelection> selections;
    std::vector<RawBundle> bundles;
};

bool operator==(const InstanceFile& a, const InstanceFile& b);

/// Text or JSON, told apart by the first significant character. Throws
/// ParseError with "line N: ..." for text input.
InstanceFile parse_instance(const std::string& text);
InstanceFile parse_instance_text(const std::string& text);
InstanceFile parse_instance_json(const std::string& text);
/// Reads a file; throws ParseError when it cannot be opened.
InstanceFile load_instance(const std::string& path);

std::string serialize_text(const InstanceFile& file);
std::string serialize_json(const InstanceFile& file);

/// Everything an instance file defines, validated. Every category also
/// names a structure with searched limits.
struct Instance {
    std::map<std::string, std::shared_ptr<const FinCategory>> categories;
    std::map<std::string, StructurePtr> structures;
    std::map<std::string, InfSemilattice> semilattices;
    std::map<std::string, LeftClass> classes;
    std::map<std::string, Doctrine> doctrines;
    std::map<std::string, Selection> selections;
    /// Declared bundles first, then one per doctrine and per semilattice not
    /// already covered, in declaration order.
    std::vector<Bundle> bundles;

    const Bundle& bundle(const std::string& name) const;
};

/// Throws UnresolvedRef for a dangling identifier and the validation errors
/// of the library for ill-formed data.
Instance resolve_instance(const InstanceFile& file);

/// Writes bundles out as an instance file; categories, fibres and selections
/// are named after the bundle. Structures are left to search.
InstanceFile export_bundles(const std::vector<Bundle>& bundles);

}  // namespace doctrina
