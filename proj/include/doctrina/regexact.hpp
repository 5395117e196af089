#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "doctrina/completion.hpp"
#include "doctrina/doctrine.hpp"

namespace doctrina {

/// Relational calculus of an elementary doctrine Q. Relations A ⇸ B are
/// elements of Q(A×B); products and triple products come from the chosen
/// structure and throw MissingStructure when absent. ∃ is taken on demand
/// and throws NoAdjoint where Q lacks it.
class Relations {
public:
    /// Throws NotElementary when no equality predicates exist.
    explicit Relations(Doctrine q);

    const Doctrine& doctrine() const { return q_; }
    /// δ_A; MissingStructure when A×A is absent.
    ElemId delta(ObjId a) const;
    ObjId product(ObjId a, ObjId b) const;

    /// ⊤_A ≤ ∃_pr1 φ.
    bool entire(ObjId a, ObjId b, ElemId phi) const;
    /// P_⟨pr1,pr2⟩φ ∧ P_⟨pr1,pr3⟩φ ≤ P_⟨pr2,pr3⟩δ_B over (A×B)×B.
    bool functional(ObjId a, ObjId b, ElemId phi) const;
    /// ψ ∘ φ = ∃_⟨pr1,pr3⟩(P_⟨pr1,pr2⟩φ ∧ P_⟨pr2,pr3⟩ψ) for φ: A ⇸ B, ψ: B ⇸ C.
    ElemId compose(ObjId a, ObjId b, ObjId c, ElemId phi, ElemId psi) const;
    /// Graph of f: A → B, namely P_{f×id}(δ_B).
    ElemId graph(MorId f) const;

    /// The arrows m_ij: (X×Y)×Z → (·×·) picking components i and j (1-based).
    struct Triple {
        ObjId vertex;
        MorId m12, m13, m23;
    };
    const Triple& triple(ObjId a, ObjId b, ObjId c) const;

private:
    Doctrine q_;
    std::vector<std::optional<ElemId>> delta_;
    mutable std::map<std::tuple<ObjId, ObjId, ObjId>, Triple> triples_;
};

/// Ef(Q): objects of the base, arrows the entire functional relations,
/// identities δ, composition relational. Arrow equality is element equality.
struct RelationCategory {
    std::shared_ptr<const FinCategory> category;
    std::vector<ElemId> relation;  // per arrow, its element of Q(A×B)
};

RelationCategory effective_relations(const Relations& rel, std::size_t cap = kDefaultCap);

struct RegularCompletion {
    ComprehensionCompletion comprehension;  // P_c over 𝒢_P
    RelationCategory reg;
    /// Per arrow of Reg(P), the relation as an element of P(A×B).
    std::vector<ElemId> base_relation;
};

/// Reg(P) = Ef(P_c). Objects are named as in 𝒢_P; arrows "φ:X->Y".
RegularCompletion regular_completion(const Doctrine& p, std::size_t cap = kDefaultCap);

/// Objects are the arrows of C; arrows f → g are classes [m] of m: dom f → dom g
/// with g·m·k1 = g·m·k2 on the kernel pair of f, modulo g·m = g·m'.
FinCategory reg_lex_direct(const ChosenStructure& s, std::size_t cap = kDefaultCap);

struct PerObject {
    ObjId carrier;
    ElemId rho;
};

/// Which of (i)–(v) an element φ ∈ P(A×B) satisfies between two PERs.
/// (v) is read in P(A) as P_Δ ρ ≤ ∃_pr1 φ.
std::array<bool, 5> per_arrow_conditions(const Relations& rel, const PerObject& x, const PerObject& y, ElemId phi);
bool is_per(const Relations& rel, ObjId a, ElemId rho);

struct ExactCompletion {
    std::shared_ptr<const FinCategory> category;
    std::vector<PerObject> objects;
    std::vector<ElemId> relation;  // per arrow
};

/// T_P: partial equivalence relations and the relations satisfying (i)–(v);
/// the identity on (A, ρ) is ρ. Only symmetry, transitivity and the products
/// of P are used; ∃ is needed along pr1 and the ⟨pr1,pr3⟩ maps.
ExactCompletion exact_completion(const Doctrine& p, std::size_t cap = kDefaultCap);

/// T over Sub_A for all monos of A; throws NotRegular when Sub_A is not
/// existential along every arrow.
ExactCompletion ex_reg(StructurePtr a, std::size_t cap = kDefaultCap);

struct FunctorVerdict {
    FunctorData functor;
    bool is_functor = false;
    bool full = false;
    bool faithful = false;
    bool essentially_surjective = false;
    std::vector<Violation> witnesses;
    bool equivalence() const { return is_functor && full && faithful && essentially_surjective; }
};

/// Checks fullness, faithfulness and essential surjectivity of F directly.
FunctorVerdict verify_functor_equivalence(const FinCategory& c, const FinCategory& d, const FunctorData& f);

/// Reg(N, n): Reg(Ψ over 𝒢_{P'}) → Reg(P), with N_c((A,α), [f]) = (A, ∃_f β)
/// for f: (B, β) → (A, α) and n_c on relations the same push-forward.
FunctorVerdict build_reg_functor(const Doctrine& p, const Selection& sub, std::size_t cap = kDefaultCap);

/// Ex(N, n): T over Ψ on 𝒢_{P'} → T_P, by the same push-forward.
FunctorVerdict build_exact_functor(const Doctrine& p, const Selection& sub, std::size_t cap = kDefaultCap);

}  // namespace doctrina
