#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "doctrina/doctrine.hpp"
#include "doctrina/fincat.hpp"

namespace doctrina {

/// A morphism of doctrines (F, b): P → R. components[A] maps P(A) into
/// R(F A); an entry of -1 marks a value the construction could not define.
struct DoctrineMorphism {
    FunctorData functor;
    std::vector<std::vector<ElemId>> components;
};

struct MorphismReport {
    bool defined = true;
    bool functor = true;
    bool natural = true;
    bool preserves_meets = true;
    bool preserves_tops = true;
    bool preserves_exists = true;  // along the supplied class, when one is given
    bool fibrewise_iso = true;
    std::vector<Violation> violations;
    bool ok() const { return defined && functor && natural && preserves_meets && preserves_tops && preserves_exists; }
};

/// Enumerates every law of a doctrine morphism. When `lambda` is non-null,
/// b_B(∃_f α) = ∃_{Ff} b_A(α) is checked for each f in it.
MorphismReport check_doctrine_morphism(const Doctrine& p, const Doctrine& r, const DoctrineMorphism& m,
                                       const LeftClass* lambda = nullptr);

/// Identity-on-objects morphism with the given fibre tables.
DoctrineMorphism fibrewise_morphism(const FinCategory& base, std::vector<std::vector<ElemId>> components);

struct CompletionPair {
    MorId arrow;
    ElemId element;  // in P(dom arrow)
};

struct ExistentialCompletion {
    Doctrine doctrine;
    LeftClass lambda;
    /// representatives[A][x]: least raw pair of the class x in P^Λ(A).
    std::vector<std::vector<CompletionPair>> representatives;
    /// η_A: P(A) → P^Λ(A), α ↦ (id, α).
    std::vector<std::vector<ElemId>> eta;
    /// ε_A: (g, β) ↦ ∃_g β, present only when P is already Λ-existential.
    std::optional<std::vector<std::vector<ElemId>>> epsilon;
    /// Class of every raw pair: raw_class[A][i] for the i-th pair in enumeration order.
    std::vector<std::vector<CompletionPair>> raw_pairs;
    std::vector<std::vector<int>> raw_class;
};

/// The generalized existential completion P^Λ. Elements are named "(g,β)".
/// Every law of the construction is re-verified and reported as
/// Error("Internal") if it fails; SizeCap when a fibre has more than `cap`
/// raw pairs; MissingStructure when a needed pullback is absent.
ExistentialCompletion existential_completion(const Doctrine& p, const LeftClass& lambda,
                                             std::size_t cap = kDefaultCap);

/// Λ = projections of the chosen structure (the pure completion) or all
/// morphisms (the full completion).
ExistentialCompletion pure_completion(const Doctrine& p, std::size_t cap = kDefaultCap);
ExistentialCompletion full_completion(const Doctrine& p, std::size_t cap = kDefaultCap);

/// The total category 𝒢_P of pairs (A, α) with its forgetful functor.
struct GrothCategory {
    StructurePtr structure;
    std::vector<ObjId> base_object;     // per object of 𝒢
    std::vector<ElemId> element;        // per object of 𝒢
    std::vector<MorId> underlying;      // per arrow of 𝒢
    std::vector<std::vector<ObjId>> object_at;  // object_at[A][α]
    /// arrows_over[f][α·|P(cod f)| + β] = the arrow over f from (A,α) to (B,β), or -1.
    std::vector<std::vector<MorId>> arrows_over;
    std::vector<int> fibre_size;  // per base object

    const FinCategory& category() const { return structure->category(); }
    ObjId object_of(ObjId a, ElemId alpha) const { return object_at[a][alpha]; }
    /// The arrow (A,α) → (B,β) lying over f, if α ≤ P_f β.
    std::optional<MorId> arrow_over(MorId f, ObjId from, ObjId to) const;
    FunctorData forgetful() const;
};

/// Objects named "(A,α)", arrows "f:(A,α)->(B,β)". Limits are resolved from
/// the base: the pullback of (C,γ) → (B,β) ← (A,α) sits over the base
/// pullback D with predicate P_{D→C}γ ∧ P_{D→A}α.
std::shared_ptr<const GrothCategory> groth_category(const Doctrine& p, std::size_t cap = kDefaultCap);

/// U⁻¹(Λ): the arrows of 𝒢 lying over an arrow of Λ.
LeftClass lift_class(const GrothCategory& g, const LeftClass& lambda);

struct ComprehensionCompletion {
    std::shared_ptr<const GrothCategory> groth;
    /// P_c(A, α) = {γ ≤ α}, reindexed along f: (B,β) → (A,α) by γ ↦ P_f γ ∧ β.
    Doctrine doctrine;
    /// inclusion[X][i] = element of P(A) for the i-th element of P_c(X).
    std::vector<std::vector<ElemId>> inclusion;
};

ComprehensionCompletion comprehension_completion(const Doctrine& p, std::size_t cap = kDefaultCap);

struct ExtensionalReflection {
    StructurePtr structure;  // the quotient base X_P
    Doctrine doctrine;       // P descended to X_P
    std::vector<int> klass;  // class of every arrow of the original base
    std::vector<MorId> representative;
    /// Codomains with parallel arrows but no B×B or δ_B: there ∼ is only the
    /// part forced by composition with checked pairs.
    std::vector<ObjId> unverified;
};

/// Quotients the base by f ∼ g iff ⊤ ≤ P_⟨f,g⟩ δ, closed under composition.
/// Throws NotElementary when no equality predicate exists and NotACongruence
/// when the closure identifies a checkable pair that δ separates or P does
/// not descend.
ExtensionalReflection extensional_reflection(const Doctrine& p);

struct PredicatesCategory {
    ComprehensionCompletion completion;
    ExtensionalReflection reflection;
    const FinCategory& category() const { return reflection.structure->category(); }
};

/// Prd(P) = X_{P_c}.
PredicatesCategory predicates_category(const Doctrine& p, std::size_t cap = kDefaultCap);

/// True when c: X → A satisfies P_c α = ⊤ and every f with P_f α = ⊤ factors
/// through c (uniquely, when `strict`).
bool is_comprehension(const Doctrine& p, MorId c, ElemId alpha, bool strict);

struct ComprehensionSearch {
    std::optional<MorId> strict;
    std::optional<MorId> weak;
};

/// Lowest-id strict and weak comprehension of α ∈ P(A). Throws
/// AmbiguousComprehension if two strict ones have non-isomorphic domains.
ComprehensionSearch find_comprehension(const Doctrine& p, ObjId a, ElemId alpha);

struct ComprehensionReport {
    bool has_all = true;
    bool has_all_weak = true;
    bool full = true;
    bool composable = true;
    /// Unset when P has no equality predicates to test against.
    std::optional<bool> comprehensive_diagonals;
    std::vector<ObjId> unverified_diagonals;
    std::vector<std::vector<ComprehensionSearch>> comprehension;  // [A][α]
    std::vector<Violation> witnesses;
};

ComprehensionReport check_comprehension_properties(const Doctrine& p);

/// Λ_comp: every arrow that is a strict comprehension of some element.
LeftClass comprehension_class(const Doctrine& p);

struct Comparison {
    std::shared_ptr<const GrothCategory> groth;  // over which psi lives
    Doctrine sub;                                 // the selected P'
    Doctrine psi;
    /// (L̄, l̄): L̄(A) = (A, ⊤); components may hold -1 where undefined.
    DoctrineMorphism morphism;
    std::vector<char> fibre_iso;  // per base object
    bool verdict = false;
    std::vector<Violation> witnesses;
};

/// Builds Ψ_{U⁻¹(Λ)} over 𝒢_{P'} and the comparison l̄ forced by l̄(∃_f ιβ) = [f: (B,β) → (A,⊤)].
Comparison build_comparison_groth(const Doctrine& p, const Selection& sub, const LeftClass& lambda,
                                  std::size_t cap = kDefaultCap);

struct PredComparison {
    PredicatesCategory prd;
    Doctrine sub;
    Doctrine psi;  // full weak subobjects over Prd(P')
    DoctrineMorphism morphism;
    std::vector<char> fibre_iso;
    bool verdict = false;
    /// Properties of the doctrine carried by Prd(P').
    bool weak_comprehensions = false;
    std::optional<bool> comprehensive_diagonals;
    std::vector<Violation> witnesses;
};

/// Projection-class analogue over the category of predicates of P'.
PredComparison build_comparison_pred(const Doctrine& p, const Selection& sub, std::size_t cap = kDefaultCap);

}  // namespace doctrina
