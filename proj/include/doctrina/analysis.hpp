#pragma once

#include <optional>
#include <string>
#include <vector>

#include "doctrina/completion.hpp"
#include "doctrina/doctrine.hpp"
#include "doctrina/regexact.hpp"

namespace doctrina {

/// A cover α ≤ ∃_g β with no section h (g h = id, α ≤ P_h β). For freeness
/// failures `via` is the arrow f whose reindexing P_f α does not split.
struct SplitWitness {
    MorId g = kNoMorphism;
    ElemId beta = -1;
    MorId via = kNoMorphism;
};

struct SplitResult {
    bool holds = true;
    std::optional<SplitWitness> witness;
};

/// Λ-existential splitting of α ∈ P(B). A g ∈ Λ without ∃_g is skipped: no
/// inequality α ≤ ∃_g β can be formed along it.
SplitResult is_existential_splitting(const Doctrine& p, const LeftClass& lambda, ObjId b, ElemId alpha);
/// Every reindexing P_f α splits.
SplitResult is_existential_free(const Doctrine& p, const LeftClass& lambda, ObjId a, ElemId alpha);

struct FreeElementReport {
    std::vector<std::vector<char>> splitting;  // [A][α]
    std::vector<std::vector<char>> free;       // [A][α]
    std::vector<std::vector<std::optional<SplitWitness>>> witness;
};

FreeElementReport free_elements(const Doctrine& p, const LeftClass& lambda);

struct FreeSubdoctrine {
    Selection selection;
    bool has_tops = true;
    bool meet_closed = true;
    bool reindex_closed = true;
    std::vector<Violation> witnesses;
    bool closed() const { return has_tops && meet_closed && reindex_closed; }
};

FreeSubdoctrine existential_free_subdoctrine(const Doctrine& p, const LeftClass& lambda);

struct ChoiceReport {
    bool lambda_rc = true;
    bool rc = true;
    bool erc = true;
    /// Unset when P has no equality predicates (RUC) or the base cannot be
    /// quotiented (the Prd-level ERC variant).
    std::optional<bool> ruc;
    std::optional<bool> erc_prd;
    std::vector<Violation> witnesses;
    std::vector<std::string> unverifiable;
};

/// Λ-RC (every top is Λ-free), RC, ERC and RUC by exhaustive search.
ChoiceReport check_choice_rules(const Doctrine& p, const LeftClass& lambda);

struct EpsilonEntry {
    ObjId a;
    ObjId b;
    ElemId alpha;                 // in P(A×B)
    std::optional<MorId> epsilon; // lowest arrow A → B that works
};

struct EpsilonReport {
    bool equipped = true;
    std::vector<EpsilonEntry> table;
    std::vector<std::string> missing;  // pairs with no product
    std::vector<Violation> witnesses;
};

/// For each α ∈ P(A×B) an arrow ε: A → B with ∃_pr1 α = P_⟨id,ε⟩ α.
EpsilonReport check_epsilon_operators(const Doctrine& p);

/// η of the pure completion is a bijection on every fibre.
bool iso_to_pure_completion(const Doctrine& p, std::size_t cap = kDefaultCap);

struct CharacterizationOptions {
    /// Objects on which "enough free elements" is required; empty means all.
    std::vector<ObjId> enough_at;
    /// Skip rebuilding the completion of the free part (needs every pullback of Λ).
    bool reconstruct = true;
    std::size_t cap = kDefaultCap;
};

struct CharacterizationVerdict {
    bool existential = true;     // adjoints, BCC and FR along Λ
    bool rule_of_choice = true;  // (a) Λ-RC
    bool meet_closed = true;     // (b)
    bool enough = true;          // (c)
    std::vector<Violation> witnesses;
    FreeSubdoctrine free;
    /// ϱ: (P_free)^Λ → P, (g, β) ↦ ∃_g β, with its fibrewise iso flags.
    std::optional<DoctrineMorphism> reconstruction;
    std::vector<char> fibre_iso;
    bool reconstruction_ok = false;
    std::vector<std::string> unverifiable;
    bool yes() const { return existential && rule_of_choice && meet_closed && enough; }
};

/// Decides whether P is a Λ-existential completion of its free elements.
CharacterizationVerdict characterize_completion(const Doctrine& p, const LeftClass& lambda,
                                                const CharacterizationOptions& options = {});

/// Equal as sets, object by object.
bool selections_agree(const Selection& a, const Selection& b);

/// Throws BudgetExceeded when the equivalence search runs out.
bool morita_regular(const Doctrine& p, const Doctrine& q, std::size_t budget = kDefaultBudget,
                    std::size_t cap = kDefaultCap);
bool morita_exact(const Doctrine& p, const Doctrine& q, std::size_t budget = kDefaultBudget,
                  std::size_t cap = kDefaultCap);

/// X ↦ F^X over finite sets of the given sizes, F a frame.
Doctrine localic_doctrine(const FiniteFrame& frame, const std::vector<int>& sizes);

/// What a theorem check may draw on. `sub` defaults to the tops of `doctrine`.
struct Bundle {
    std::string name;
    std::string description;
    std::optional<Doctrine> doctrine;
    std::optional<Selection> sub;
    std::optional<InfSemilattice> semilattice;
};

struct SuiteReport {
    std::string theorem;
    std::string bundle;
    bool pass = true;
    std::vector<std::string> checks;  // sub-checks that ran, in order
    std::vector<Violation> witnesses;
    std::vector<std::string> unverifiable;
};

const std::vector<std::string>& theorem_ids();
/// T-SUPER and T-DOWN read a semilattice; every other id reads a doctrine.
bool theorem_needs_semilattice(const std::string& id);

/// Runs one theorem check on a bundle. Throws UnsupportedTheorem for an
/// unknown id and MissingStructure when the bundle lacks what the id needs.
SuiteReport run_theorem_suite(const Bundle& bundle, const std::string& id, std::size_t budget = kDefaultBudget,
                              std::size_t cap = kDefaultCap);

}  // namespace doctrina
