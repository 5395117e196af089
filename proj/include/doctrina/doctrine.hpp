#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "doctrina/fincat.hpp"
#include "doctrina/order.hpp"

namespace doctrina {

using StructurePtr = std::shared_ptr<const ChosenStructure>;

/// A contravariant assignment of finite inf-semilattices to the objects of a
/// base category. reindex(f, x) is P_f(x) for f: A→B and x in P(B).
/// Left adjoints ∃_f are computed on demand and memoized.
class Doctrine {
public:
    Doctrine() = default;
    /// Unchecked constructor; use validate_doctrine to enforce the laws.
    Doctrine(StructurePtr structure, std::vector<LatticePtr> fibres, std::vector<std::vector<ElemId>> reindex);

    const ChosenStructure& structure() const { return *structure_; }
    const StructurePtr& structure_ptr() const { return structure_; }
    const FinCategory& base() const { return structure_->category(); }

    const InfSemilattice& fibre(ObjId a) const { return *fibres_[a]; }
    const LatticePtr& fibre_ptr(ObjId a) const { return fibres_[a]; }
    const std::vector<LatticePtr>& fibres() const { return fibres_; }
    ElemId reindex(MorId f, ElemId x) const { return reindex_[f][x]; }
    const std::vector<ElemId>& reindex_table(MorId f) const { return reindex_[f]; }
    const std::vector<std::vector<ElemId>>& reindex_tables() const { return reindex_; }
    MonotoneMap reindex_map(MorId f) const;

    /// Table of ∃_f (from P(dom f) to P(cod f)), or nullptr when P_f has no left adjoint.
    const std::vector<ElemId>* exists_table(MorId f) const;
    /// ∃_f(x); throws Error("NoAdjoint") when the adjoint does not exist.
    ElemId exists(MorId f, ElemId x) const;

    std::size_t total_elements() const;

private:
    struct Cache;
    StructurePtr structure_;
    std::vector<LatticePtr> fibres_;
    std::vector<std::vector<ElemId>> reindex_;
    std::shared_ptr<Cache> cache_;
};

/// Checks identity and composition laws and meet/top preservation of every
/// reindexing map. Throws Error whose code is the first violated law
/// (NotFunctorial, NotMeetPreserving, NotTopPreserving, NotMonotone).
Doctrine validate_doctrine(StructurePtr structure, std::vector<LatticePtr> fibres,
                           std::vector<std::vector<ElemId>> reindex);
std::vector<Violation> doctrine_violations(const Doctrine& p);

Doctrine trivial_doctrine(StructurePtr structure);

/// Poset reflection of Λ-arrows into each object under factorization;
/// reindexing by pullback. Requires Λ to verify as a left class.
Doctrine weak_subobjects_doctrine(StructurePtr structure, const LeftClass& lambda);

/// Sub_M for a stable system of monos M.
Doctrine m_subobjects_doctrine(StructurePtr structure, const LeftClass& monos);

/// Verified left adjoint of P_f.
AdjointResult exists_along(const Doctrine& p, MorId f);

struct ExistentialReport {
    bool adjoints = true;
    bool bcc = true;
    bool fr = true;
    std::vector<Violation> counterexamples;
    std::vector<std::string> unverifiable;  // squares whose pullback is absent
    bool ok() const { return adjoints && bcc && fr; }
};

/// Left adjoints along Λ, Beck-Chevalley on every constructible square with a
/// Λ-arrow base-changed, and Frobenius reciprocity.
ExistentialReport check_lambda_existential(const Doctrine& p, const LeftClass& lambda);

struct ElementaryWitness {
    /// δ_A ∈ P(A×A) for every A whose square is available.
    std::vector<std::optional<ElemId>> delta;
    /// Objects without A×A: nothing could be checked there.
    std::vector<ObjId> unverified;
    /// Number of arrows e = ⟨pr1,pr2,pr2⟩ actually checked.
    int checked_e_arrows = 0;
};

struct ElementaryResult {
    std::optional<ElementaryWitness> witness;
    std::optional<ObjId> obstructed;  // first object with no valid δ
    bool found() const { return witness.has_value(); }
};

/// Searches every fibre P(A×A) for δ_A meeting both elementary conditions;
/// throws AmbiguousDelta when two candidates pass.
ElementaryResult find_elementary_structure(const Doctrine& p);

struct Subdoctrine {
    Doctrine doctrine;
    /// inclusion[A][i] = element of P(A) selected as the i-th element of P'(A).
    std::vector<std::vector<ElemId>> inclusion;
};

using Selection = std::vector<std::vector<ElemId>>;

/// Throws MissingTop, NotClosedUnderMeet or NotClosedUnderReindex.
Subdoctrine restrict_subdoctrine(const Doctrine& p, const Selection& selection);

Selection tops_selection(const Doctrine& p);
Selection all_selection(const Doctrine& p);

/// Preorder on elements given as an n×n relation, quotiented; returns the
/// class of each element and a poset with one element per class named by
/// `name_of(representative)`. Representative = least index in the class.
struct PosetReflection {
    std::vector<int> klass;
    std::vector<int> representative;
    LatticePtr poset;
};
PosetReflection reflect_preorder(int n, const std::vector<char>& leq,
                                 const std::function<std::string(int)>& name_of);

}  // namespace doctrina
