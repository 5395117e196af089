#include "doctrina/order.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

namespace doctrina {

InfSemilattice InfSemilattice::from_relation(std::vector<std::string> names, std::vector<char> leq) {
    const int n = static_cast<int>(names.size());
    auto at = [&](int x, int y) -> char& { return leq[static_cast<std::size_t>(x) * n + y]; };
    for (int x = 0; x < n; ++x) at(x, x) = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (at(i, k))
                for (int j = 0; j < n; ++j)
                    if (at(k, j)) at(i, j) = 1;
    std::vector<Violation> v;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (at(x, y) && at(y, x)) v.push_back({"NotAPoset", "(" + names[x] + ", " + names[y] + ")"});
    if (!v.empty()) throw Error("NotAPoset", "order is not antisymmetric", v);
    if (n == 0) throw Error("NoTop", "empty poset");

    InfSemilattice s;
    s.names_ = std::move(names);
    s.leq_ = std::move(leq);
    int top = -1;
    for (int x = 0; x < n && top < 0; ++x) {
        bool all = true;
        for (int y = 0; y < n && all; ++y) all = s.leq(y, x);
        if (all) top = x;
    }
    if (top < 0) throw Error("NoTop", "no greatest element", {{"NoTop", ""}});
    s.top_ = top;
    s.meet_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            int best = -1;
            for (int z = 0; z < n; ++z)
                if (s.leq(z, x) && s.leq(z, y) && (best < 0 || s.leq(best, z))) best = z;
            for (int z = 0; z < n && best >= 0; ++z)
                if (s.leq(z, x) && s.leq(z, y) && !s.leq(z, best)) best = -1;
            if (best < 0) v.push_back({"NoMeet", "(" + s.names_[x] + ", " + s.names_[y] + ")"});
            s.meet_[static_cast<std::size_t>(x) * n + y] = best;
        }
    if (!v.empty()) throw Error("NoMeet", "missing binary meets", v);
    s.bottom_ = s.meet_all([&] {
        std::vector<ElemId> all(n);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }());
    s.join_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            std::vector<ElemId> ub;
            for (int z = 0; z < n; ++z)
                if (s.leq(x, z) && s.leq(y, z)) ub.push_back(z);
            s.join_[static_cast<std::size_t>(x) * n + y] = s.meet_all(ub);
        }
    return s;
}

std::optional<ElemId> InfSemilattice::find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<ElemId>(it - names_.begin());
}

ElemId InfSemilattice::element(const std::string& name) const {
    if (auto e = find(name)) return *e;
    throw Error("UnresolvedRef", "element '" + name + "'");
}

ElemId InfSemilattice::meet_all(const std::vector<ElemId>& xs) const {
    ElemId r = top_;
    for (ElemId x : xs) r = meet(r, x);
    return r;
}

ElemId InfSemilattice::join_all(const std::vector<ElemId>& xs) const {
    ElemId r = bottom_;
    for (ElemId x : xs) r = join(r, x);
    return r;
}

std::vector<std::pair<ElemId, ElemId>> InfSemilattice::covers() const {
    std::vector<std::pair<ElemId, ElemId>> out;
    for (int x = 0; x < size(); ++x)
        for (int y = 0; y < size(); ++y) {
            if (x == y || !leq(x, y)) continue;
            bool cover = true;
            for (int z = 0; z < size() && cover; ++z)
                if (z != x && z != y && leq(x, z) && leq(z, y)) cover = false;
            if (cover) out.emplace_back(x, y);
        }
    return out;
}

bool InfSemilattice::is_distributive() const {
    for (int x = 0; x < size(); ++x)
        for (int y = 0; y < size(); ++y)
            for (int z = 0; z < size(); ++z)
                if (meet(x, join(y, z)) != join(meet(x, y), meet(x, z))) return false;
    return true;
}

RawSemilattice InfSemilattice::to_raw() const {
    RawSemilattice raw;
    raw.elements = names_;
    for (auto [x, y] : covers()) raw.leq.emplace_back(names_[x], names_[y]);
    return raw;
}

InfSemilattice validate_semilattice(const RawSemilattice& raw) {
    const int n = static_cast<int>(raw.elements.size());
    std::unordered_map<std::string, int> idx;
    for (int i = 0; i < n; ++i)
        if (!idx.emplace(raw.elements[i], i).second)
            throw Error("NotAPoset", "duplicate element '" + raw.elements[i] + "'");
    std::vector<char> leq(static_cast<std::size_t>(n) * n, 0);
    for (const auto& [a, b] : raw.leq) {
        auto ia = idx.find(a), ib = idx.find(b);
        if (ia == idx.end()) throw Error("UnresolvedRef", "element '" + a + "'");
        if (ib == idx.end()) throw Error("UnresolvedRef", "element '" + b + "'");
        leq[static_cast<std::size_t>(ia->second) * n + ib->second] = 1;
    }
    return InfSemilattice::from_relation(raw.elements, std::move(leq));
}

namespace {

bool extend_iso(const InfSemilattice& a, const InfSemilattice& b, std::vector<ElemId>& map, std::vector<bool>& used,
                int i) {
    if (i == a.size()) return true;
    for (ElemId y = 0; y < b.size(); ++y) {
        if (used[y]) continue;
        bool ok = true;
        for (int j = 0; j < i && ok; ++j)
            ok = a.leq(i, j) == b.leq(y, map[j]) && a.leq(j, i) == b.leq(map[j], y);
        if (!ok) continue;
        map[i] = y;
        used[y] = true;
        if (extend_iso(a, b, map, used, i + 1)) return true;
        used[y] = false;
    }
    return false;
}

}  // namespace

std::optional<std::vector<ElemId>> find_order_isomorphism(const InfSemilattice& a, const InfSemilattice& b) {
    if (a.size() != b.size()) return std::nullopt;
    std::vector<ElemId> map(a.size(), -1);
    std::vector<bool> used(b.size(), false);
    if (!extend_iso(a, b, map, used, 0)) return std::nullopt;
    return map;
}

bool MonotoneMap::is_monotone() const {
    for (int x = 0; x < source->size(); ++x)
        for (int y = 0; y < source->size(); ++y)
            if (source->leq(x, y) && !target->leq(table[x], table[y])) return false;
    return true;
}

bool MonotoneMap::preserves_meets() const {
    for (int x = 0; x < source->size(); ++x)
        for (int y = 0; y < source->size(); ++y)
            if (table[source->meet(x, y)] != target->meet(table[x], table[y])) return false;
    return true;
}

bool MonotoneMap::preserves_top() const { return table[source->top()] == target->top(); }

AdjointResult left_adjoint_of(const MonotoneMap& h) {
    const auto& src = *h.source;  // domain of h
    const auto& tgt = *h.target;  // codomain of h; L goes tgt → src
    AdjointResult r;
    std::vector<ElemId> table(tgt.size());
    for (ElemId a = 0; a < tgt.size(); ++a) {
        std::vector<ElemId> above;
        for (ElemId b = 0; b < src.size(); ++b)
            if (tgt.leq(a, h(b))) above.push_back(b);
        if (above.empty()) {
            r.failing = std::make_pair(a, -1);
            return r;
        }
        table[a] = src.meet_all(above);
    }
    for (ElemId a = 0; a < tgt.size(); ++a)
        for (ElemId b = 0; b < src.size(); ++b)
            if (src.leq(table[a], b) != tgt.leq(a, h(b))) {
                r.failing = std::make_pair(a, b);
                return r;
            }
    r.adjoint = MonotoneMap{h.target, h.source, std::move(table)};
    return r;
}

FiniteFrame::FiniteFrame(InfSemilattice carrier) : carrier_(std::move(carrier)) {
    const auto& s = carrier_;
    for (int x = 0; x < s.size(); ++x)
        for (int y = 0; y < s.size(); ++y)
            for (int z = 0; z < s.size(); ++z)
                if (s.meet(x, s.join(y, z)) != s.join(s.meet(x, y), s.meet(x, z)))
                    throw Error("NotDistributive", "(" + s.name(x) + ", " + s.name(y) + ", " + s.name(z) + ")");
}

DownsetFrame downset_frame(const InfSemilattice& m, std::size_t cap) {
    const int n = m.size();
    if (n >= 63 || (std::size_t{1} << n) > cap)
        throw Error("SizeCap", "downset frame of a " + std::to_string(n) + "-element semilattice exceeds cap " +
                                   std::to_string(cap));
    std::vector<unsigned long> sets;
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        bool down = true;
        for (int x = 0; x < n && down; ++x)
            if (mask >> x & 1)
                for (int y = 0; y < n && down; ++y)
                    if (m.leq(y, x) && !(mask >> y & 1)) down = false;
        if (down) sets.push_back(mask);
    }
    const int k = static_cast<int>(sets.size());
    std::vector<std::string> names;
    for (auto s : sets) {
        std::string name = "{";
        bool first = true;
        for (int x = 0; x < n; ++x)
            if (s >> x & 1) {
                name += (first ? "" : ",") + m.name(x);
                first = false;
            }
        names.push_back(name + "}");
    }
    std::vector<char> leq(static_cast<std::size_t>(k) * k, 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) leq[static_cast<std::size_t>(i) * k + j] = (sets[i] & ~sets[j]) == 0;
    DownsetFrame out{FiniteFrame(InfSemilattice::from_relation(std::move(names), std::move(leq))), {}};
    for (int a = 0; a < n; ++a) {
        unsigned long principal = 0;
        for (int y = 0; y < n; ++y)
            if (m.leq(y, a)) principal |= 1ul << y;
        out.eta.push_back(static_cast<ElemId>(std::find(sets.begin(), sets.end(), principal) - sets.begin()));
    }
    const auto& d = out.frame.carrier();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (out.eta[m.meet(a, b)] != d.meet(out.eta[a], out.eta[b]))
                throw Error("Internal", "principal downsets do not preserve meets");
    if (out.eta[m.top()] != d.top()) throw Error("Internal", "principal downset of top is not top");
    return out;
}

std::vector<ElemId> supercompact_elements(const FiniteFrame& f) {
    const auto& s = f.carrier();
    std::vector<ElemId> out;
    for (ElemId x = 0; x < s.size(); ++x) {
        std::vector<ElemId> not_above;
        for (ElemId y = 0; y < s.size(); ++y)
            if (!s.leq(x, y)) not_above.push_back(y);
        if (!s.leq(x, s.join_all(not_above))) out.push_back(x);
    }
    return out;
}

SupercoherenceReport check_supercoherent(const FiniteFrame& f) {
    const auto& s = f.carrier();
    const auto sc = supercompact_elements(f);
    std::vector<bool> is_sc(s.size(), false);
    for (ElemId x : sc) is_sc[x] = true;
    for (ElemId x = 0; x < s.size(); ++x) {
        std::vector<ElemId> below;
        for (ElemId c : sc)
            if (s.leq(c, x)) below.push_back(c);
        if (s.join_all(below) != x) return {false, "join", x};
    }
    if (!is_sc[s.top()]) return {false, "top", s.top()};
    for (ElemId a : sc)
        for (ElemId b : sc)
            if (!is_sc[s.meet(a, b)]) return {false, "meet", s.meet(a, b)};
    return {true, "", std::nullopt};
}

namespace {

// Adjacency bits of a naturally labelled relation, under a relabelling.
std::vector<char> relabel(const std::vector<char>& leq, int n, const std::vector<int>& perm) {
    std::vector<char> out(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(perm[i]) * n + perm[j]] = leq[static_cast<std::size_t>(i) * n + j];
    return out;
}

}  // namespace

std::vector<InfSemilattice> enumerate_lattices(int n) {
    std::vector<InfSemilattice> out;
    if (n <= 0) return out;
    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
    std::vector<std::vector<char>> canon_seen;
    std::vector<int> perm(n);
    for (unsigned long mask = 0; mask < (1ul << slots.size()); ++mask) {
        std::vector<char> leq(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i) leq[static_cast<std::size_t>(i) * n + i] = 1;
        for (std::size_t s = 0; s < slots.size(); ++s)
            if (mask >> s & 1) leq[static_cast<std::size_t>(slots[s].first) * n + slots[s].second] = 1;
        bool transitive = true;
        for (int i = 0; i < n && transitive; ++i)
            for (int j = 0; j < n && transitive; ++j)
                for (int k = 0; k < n && transitive; ++k)
                    if (leq[i * n + j] && leq[j * n + k] && !leq[i * n + k]) transitive = false;
        if (!transitive) continue;
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
        std::optional<InfSemilattice> lattice;
        try {
            lattice = InfSemilattice::from_relation(std::move(names), leq);
        } catch (const Error&) {
            continue;
        }
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<char> canon = leq;
        do {
            auto r = relabel(leq, n, perm);
            if (r < canon) canon = r;
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (std::find(canon_seen.begin(), canon_seen.end(), canon) != canon_seen.end()) continue;
        canon_seen.push_back(canon);
        out.push_back(std::move(*lattice));
    }
    return out;
}

std::vector<InfSemilattice> enumerate_frames(int n) {
    std::vector<InfSemilattice> out;
    for (auto& l : enumerate_lattices(n))
        if (l.is_distributive()) out.push_back(std::move(l));
    return out;
}

InfSemilattice chain(const std::vector<std::string>& names) {
    const int n = static_cast<int>(names.size());
    std::vector<char> leq(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) leq[static_cast<std::size_t>(i) * n + j] = 1;
    return InfSemilattice::from_relation(names, std::move(leq));
}

InfSemilattice boolean_lattice(int k) {
    const int n = 1 << k;
    std::vector<std::string> names;
    for (int m = 0; m < n; ++m) {
        std::string s;
        for (int b = 0; b < k; ++b) s += (m >> b & 1) ? '1' : '0';
        names.push_back(s);
    }
    std::vector<char> leq(static_cast<std::size_t>(n) * n, 0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) leq[static_cast<std::size_t>(a) * n + b] = (a & ~b) == 0;
    return InfSemilattice::from_relation(std::move(names), std::move(leq));
}

}  // namespace doctrina
