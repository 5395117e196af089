#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "doctrina/error.hpp"

namespace doctrina {

using ObjId = int;
using MorId = int;
inline constexpr MorId kNoMorphism = -1;

/// Unvalidated description of a finite category, as read from an instance file.
struct RawCategory {
    struct Morphism {
        std::string name;
        std::string source;
        std::string target;
    };
    struct Composite {
        std::string g;  // outer arrow
        std::string f;  // inner arrow
        std::string result;
    };
    std::vector<std::string> objects;
    std::vector<Morphism> morphisms;
    std::vector<std::pair<std::string, std::string>> identities;  // object, morphism
    std::vector<Composite> compositions;
};

/// A validated finite category. Objects and morphisms are dense integer ids
/// in declaration order; names are kept for reporting. compose(g, f) is g∘f.
class FinCategory {
public:
    struct MorphismSpec {
        std::string name;
        ObjId source;
        ObjId target;
    };

    FinCategory() = default;

    /// Builds a category from a total composition function and checks the
    /// unit and associativity laws exhaustively.
    static FinCategory generate(std::vector<std::string> objects, std::vector<MorphismSpec> morphisms,
                                std::vector<MorId> identities,
                                const std::function<MorId(MorId g, MorId f)>& compose);

    int num_objects() const { return static_cast<int>(object_names_.size()); }
    int num_morphisms() const { return static_cast<int>(morphism_names_.size()); }

    const std::string& object_name(ObjId a) const { return object_names_.at(a); }
    const std::string& morphism_name(MorId f) const { return morphism_names_.at(f); }
    ObjId source(MorId f) const { return source_[f]; }
    ObjId target(MorId f) const { return target_[f]; }
    MorId identity(ObjId a) const { return identity_[a]; }
    bool is_identity(MorId f) const { return identity_[source_[f]] == f; }

    /// g∘f; both must be composable (target(f) == source(g)).
    MorId compose(MorId g, MorId f) const { return table_[static_cast<std::size_t>(g) * morphism_names_.size() + f]; }
    const std::vector<MorId>& hom(ObjId a, ObjId b) const {
        return homs_[static_cast<std::size_t>(a) * object_names_.size() + b];
    }

    std::optional<ObjId> find_object(const std::string& name) const;
    std::optional<MorId> find_morphism(const std::string& name) const;
    ObjId object(const std::string& name) const;
    MorId morphism(const std::string& name) const;

    bool is_preorder() const;

    /// Description with every composite listed; round-trips through validate_category.
    RawCategory to_raw() const;

private:
    friend FinCategory validate_category(const RawCategory& raw);
    void index();
    std::vector<Violation> check_laws() const;

    std::vector<std::string> object_names_;
    std::vector<std::string> morphism_names_;
    std::vector<ObjId> source_;
    std::vector<ObjId> target_;
    std::vector<MorId> identity_;
    std::vector<MorId> table_;
    std::vector<std::vector<MorId>> homs_;
    std::unordered_map<std::string, ObjId> object_index_;
    std::unordered_map<std::string, MorId> morphism_index_;
};

/// Resolves names and checks every category law; throws Error("InvalidCategory")
/// listing NonAssociative / MissingIdentity / IncompleteComposition / UnitViolation
/// / IllTypedComposition violations, or Error("UnresolvedRef").
FinCategory validate_category(const RawCategory& raw);

bool is_mono(const FinCategory& c, MorId f);
bool is_iso(const FinCategory& c, MorId f);
std::optional<MorId> inverse(const FinCategory& c, MorId f);

struct ProductCone {
    ObjId vertex;
    MorId pr1;
    MorId pr2;
};

/// Pullback of the cospan f: C→B, g: A→B. `to_c` is the leg P→C, `to_a` the leg P→A.
struct PullbackSpan {
    ObjId vertex;
    MorId to_c;
    MorId to_a;
};

bool is_product(const FinCategory& c, ObjId a, ObjId b, const ProductCone& cone);
bool is_pullback(const FinCategory& c, MorId f, MorId g, const PullbackSpan& span);
bool is_terminal(const FinCategory& c, ObjId t);

/// Partial chosen limit structure over a category. Tabled entries are
/// validated when inserted; anything not tabled is found by exhaustive search
/// with lowest-id tie-breaking and memoized.
class ChosenStructure {
public:
    explicit ChosenStructure(std::shared_ptr<const FinCategory> category);
    ChosenStructure(const ChosenStructure&) = delete;
    ~ChosenStructure();
    ChosenStructure& operator=(const ChosenStructure&) = delete;

    const FinCategory& category() const { return *category_; }
    const std::shared_ptr<const FinCategory>& category_ptr() const { return category_; }

    void set_terminal(ObjId t);
    void set_product(ObjId a, ObjId b, const ProductCone& cone);
    void set_pullback(MorId f, MorId g, const PullbackSpan& span);

    /// Candidate limits proposed by a construction that knows where they are
    /// (for instance, limits of a total category computed from the base).
    /// Every proposal is checked against the universal property before use;
    /// when a resolver declines, exhaustive search takes over.
    struct Resolver {
        std::function<std::optional<ObjId>()> terminal;
        std::function<std::optional<ProductCone>(ObjId, ObjId)> product;
        std::function<std::optional<PullbackSpan>(MorId, MorId)> pullback;
    };
    void set_resolver(Resolver resolver);

    std::optional<ObjId> terminal() const;
    std::optional<MorId> terminal_arrow(ObjId a) const;
    std::optional<ProductCone> product(ObjId a, ObjId b) const;
    std::optional<PullbackSpan> pullback(MorId f, MorId g) const;

    /// The unique m: X→P with pr1∘m = f and pr2∘m = g.
    std::optional<MorId> pair(const ProductCone& cone, MorId f, MorId g) const;
    /// ⟨id,id⟩: A → A×A when A×A is available.
    std::optional<MorId> diagonal(ObjId a) const;
    /// Canonical left-nested triple product (A×B)×C with its three projections.
    struct TripleProduct {
        ProductCone inner;  // A×B
        ProductCone outer;  // (A×B)×C
        MorId pr1, pr2, pr3;
    };
    std::optional<TripleProduct> triple(ObjId a, ObjId b, ObjId c) const;

    /// Morphisms p that occur as a leg of some product cone.
    const std::vector<bool>& projection_members() const;

    const std::optional<ObjId>& tabled_terminal() const { return tabled_terminal_; }
    const std::map<std::pair<ObjId, ObjId>, ProductCone>& tabled_products() const { return tabled_products_; }
    const std::map<std::pair<MorId, MorId>, PullbackSpan>& tabled_pullbacks() const { return tabled_pullbacks_; }

private:
    struct Cache;
    std::shared_ptr<const FinCategory> category_;
    std::optional<ObjId> tabled_terminal_;
    std::map<std::pair<ObjId, ObjId>, ProductCone> tabled_products_;
    std::map<std::pair<MorId, MorId>, PullbackSpan> tabled_pullbacks_;
    Resolver resolver_;
    std::unique_ptr<Cache> cache_;
};

std::optional<ProductCone> search_product(const FinCategory& c, ObjId a, ObjId b);
std::optional<PullbackSpan> search_pullback(const FinCategory& c, MorId f, MorId g);

/// Chosen span if tabled, else searched; throws MissingStructure when C has none.
PullbackSpan require_pullback(const ChosenStructure& s, MorId f, MorId g);
ProductCone require_product(const ChosenStructure& s, ObjId a, ObjId b);

/// A set of morphisms, by membership flag per morphism id.
struct LeftClass {
    std::string name;
    std::vector<bool> members;

    bool contains(MorId f) const { return members[f]; }
    std::vector<MorId> list() const;
};

LeftClass all_morphisms(const FinCategory& c);
LeftClass identities_class(const FinCategory& c);
LeftClass isos_class(const FinCategory& c);
LeftClass monos_class(const FinCategory& c);
LeftClass projections_class(const ChosenStructure& s);

struct LeftClassReport {
    bool identities = true;
    bool composition = true;
    bool pullback_stability = true;
    std::vector<Violation> counterexamples;
    bool ok() const { return identities && composition && pullback_stability; }
};

LeftClassReport verify_left_class(const ChosenStructure& s, const LeftClass& lambda);

/// Throws Error("NotALeftClass") with the report's counterexamples when it fails.
void require_left_class(const ChosenStructure& s, const LeftClass& lambda);

struct FunctorData {
    std::vector<ObjId> object_map;
    std::vector<MorId> morphism_map;
};

/// Empty when F is a functor C→D; otherwise the violated law.
std::vector<Violation> check_functor(const FinCategory& c, const FinCategory& d, const FunctorData& f);

struct EquivalenceWitness {
    FunctorData functor;
    /// For every (x, y) in C×C, the preimage in hom(x,y) of each arrow of hom(Fx,Fy), in hom order.
    std::vector<std::vector<MorId>> fullness;
    /// For every object d of D, an object c of C and an isomorphism F(c) → d.
    std::vector<std::pair<ObjId, MorId>> essential_surjectivity;
};

/// Re-checks every certificate against the two categories.
std::vector<Violation> verify_equivalence_witness(const FinCategory& c, const FinCategory& d,
                                                  const EquivalenceWitness& w);

enum class SearchStatus { Found, ProvenAbsent, BudgetExhausted };

struct EquivalenceResult {
    SearchStatus status = SearchStatus::ProvenAbsent;
    std::optional<EquivalenceWitness> witness;
    std::string reason;
    std::size_t nodes = 0;
};

inline constexpr std::size_t kDefaultBudget = 2'000'000;

/// Decides C ≃ D by comparing skeletons: an isomorphism of skeletons is
/// searched by backtracking, counting one budget unit per search node.
EquivalenceResult search_equivalence(const FinCategory& c, const FinCategory& d,
                                     std::size_t budget = kDefaultBudget);

/// Lowest-id representative of each isomorphism class, in id order.
std::vector<ObjId> skeleton_objects(const FinCategory& c);

/// Full subcategory on the given objects (names preserved).
FinCategory full_subcategory(const FinCategory& c, const std::vector<ObjId>& objects);

/// Category with the same objects and the given arrows identified.
/// `klass[f]` is the class index; composition must respect it.
FinCategory quotient_category(const FinCategory& c, const std::vector<int>& klass,
                              std::vector<MorId>* representative_of_class = nullptr);

}  // namespace doctrina
