#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "doctrina/error.hpp"

namespace doctrina {

using ElemId = int;

inline constexpr std::size_t kDefaultCap = 4096;

struct RawSemilattice {
    std::vector<std::string> elements;
    std::vector<std::pair<std::string, std::string>> leq;  // generating pairs; closure is taken
};

/// A finite poset with all finite meets (hence also all joins).
/// Elements are dense ids; meet and join tables are precomputed.
class InfSemilattice {
public:
    InfSemilattice() = default;

    /// `leq` is an n×n relation; its reflexive-transitive closure is used.
    /// Throws Error with code NotAPoset, NoTop or NoMeet.
    static InfSemilattice from_relation(std::vector<std::string> names, std::vector<char> leq);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(ElemId x) const { return names_.at(x); }
    const std::vector<std::string>& names() const { return names_; }
    std::optional<ElemId> find(const std::string& name) const;
    ElemId element(const std::string& name) const;

    bool leq(ElemId x, ElemId y) const { return leq_[static_cast<std::size_t>(x) * names_.size() + y] != 0; }
    ElemId meet(ElemId x, ElemId y) const { return meet_[static_cast<std::size_t>(x) * names_.size() + y]; }
    ElemId join(ElemId x, ElemId y) const { return join_[static_cast<std::size_t>(x) * names_.size() + y]; }
    ElemId top() const { return top_; }
    ElemId bottom() const { return bottom_; }
    ElemId meet_all(const std::vector<ElemId>& xs) const;
    ElemId join_all(const std::vector<ElemId>& xs) const;

    /// Covering pairs (x, y): x < y with nothing strictly between.
    std::vector<std::pair<ElemId, ElemId>> covers() const;
    bool is_distributive() const;
    RawSemilattice to_raw() const;

private:
    std::vector<std::string> names_;
    std::vector<char> leq_;
    std::vector<ElemId> meet_;
    std::vector<ElemId> join_;
    ElemId top_ = 0;
    ElemId bottom_ = 0;
};

using LatticePtr = std::shared_ptr<const InfSemilattice>;

InfSemilattice validate_semilattice(const RawSemilattice& raw);

/// Order isomorphism between two semilattices, if one exists (found by search).
std::optional<std::vector<ElemId>> find_order_isomorphism(const InfSemilattice& a, const InfSemilattice& b);

struct MonotoneMap {
    LatticePtr source;
    LatticePtr target;
    std::vector<ElemId> table;

    ElemId operator()(ElemId x) const { return table[x]; }
    bool is_monotone() const;
    bool preserves_meets() const;
    bool preserves_top() const;
};

struct AdjointResult {
    std::optional<MonotoneMap> adjoint;
    /// When no adjoint exists: (α, β) with L(α) ≤ β and α ≤ h(β) disagreeing,
    /// or (α, -1) when {β : α ≤ h(β)} is empty.
    std::optional<std::pair<ElemId, ElemId>> failing;
};

/// Left adjoint L of h: L(α) = ⋀{β : α ≤ h(β)}, returned only if
/// L(α) ≤ β ⟺ α ≤ h(β) holds for every pair.
AdjointResult left_adjoint_of(const MonotoneMap& h);

/// A finite distributive lattice.
class FiniteFrame {
public:
    /// Throws Error("NotDistributive") with a witnessing triple.
    explicit FiniteFrame(InfSemilattice carrier);
    const InfSemilattice& carrier() const { return carrier_; }

private:
    InfSemilattice carrier_;
};

struct DownsetFrame {
    FiniteFrame frame;
    std::vector<ElemId> eta;  // a ↦ ↓a
};

/// Frame of downward-closed subsets of M; throws SizeCap when 2^|M| > cap.
DownsetFrame downset_frame(const InfSemilattice& m, std::size_t cap = kDefaultCap);

/// {x : x ≰ ⋁{y : x ≰ y}}.
std::vector<ElemId> supercompact_elements(const FiniteFrame& f);

struct SupercoherenceReport {
    bool supercoherent = false;
    /// "join" (an element is not a join of supercompacts), "top" (top is not
    /// supercompact) or "meet" (two supercompacts meet outside the family).
    std::string reason;
    std::optional<ElemId> failing;
};

SupercoherenceReport check_supercoherent(const FiniteFrame& f);

/// All lattices (equivalently, inf-semilattices with top) with exactly n
/// elements, one per isomorphism class. Elements are named "0".."n-1" in a
/// linear extension of the order.
std::vector<InfSemilattice> enumerate_lattices(int n);
/// The distributive ones among enumerate_lattices(n).
std::vector<InfSemilattice> enumerate_frames(int n);

/// The chain 0 < 1 < ... < n-1 with the given element names.
InfSemilattice chain(const std::vector<std::string>& names);
/// Powerset of {0..k-1} ordered by inclusion; elements named by bit strings.
InfSemilattice boolean_lattice(int k);

}  // namespace doctrina
