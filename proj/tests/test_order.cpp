#include <functional>

#include "doctest.h"
#include "doctrina/order.hpp"

using namespace doctrina;

namespace {

// All-subsets definition: x is supercompact when x ≤ ⋁S forces x ≤ s for some s in S.
std::vector<ElemId> supercompact_oracle(const InfSemilattice& f) {
    std::vector<ElemId> out;
    const int n = f.size();
    for (ElemId x = 0; x < n; ++x) {
        bool sc = true;
        for (unsigned mask = 0; mask < (1u << n) && sc; ++mask) {
            std::vector<ElemId> s;
            for (int i = 0; i < n; ++i)
                if (mask >> i & 1) s.push_back(i);
            if (!f.leq(x, f.join_all(s))) continue;
            bool witnessed = false;
            for (ElemId y : s) witnessed = witnessed || f.leq(x, y);
            sc = witnessed;
        }
        if (sc) out.push_back(x);
    }
    return out;
}

// Every monotone map t → s satisfying the adjunction law against h.
std::vector<std::vector<ElemId>> adjoint_oracle(const MonotoneMap& h) {
    std::vector<std::vector<ElemId>> found;
    const auto& s = *h.source;
    const auto& t = *h.target;
    std::vector<ElemId> cand(t.size(), 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == t.size()) {
            for (ElemId a = 0; a < t.size(); ++a)
                for (ElemId b = 0; b < s.size(); ++b)
                    if (s.leq(cand[a], b) != t.leq(a, h(b))) return;
            found.push_back(cand);
            return;
        }
        for (ElemId v = 0; v < s.size(); ++v) {
            cand[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return found;
}

LatticePtr ptr(InfSemilattice s) { return std::make_shared<const InfSemilattice>(std::move(s)); }

}  // namespace

TEST_CASE("validate_semilattice on chains, squares and an N") {
    auto ch3 = validate_semilattice({{"0", "1", "2"}, {{"0", "1"}, {"1", "2"}}});
    for (ElemId x = 0; x < 3; ++x)
        for (ElemId y = 0; y < 3; ++y) CHECK(ch3.meet(x, y) == std::min(x, y));
    auto b4 = boolean_lattice(2);
    for (ElemId x = 0; x < 4; ++x)
        for (ElemId y = 0; y < 4; ++y) {
            const int bx = (b4.name(x)[0] == '1') | (b4.name(x)[1] == '1') << 1;
            const int by = (b4.name(y)[0] == '1') | (b4.name(y)[1] == '1') << 1;
            const int bm = (b4.name(b4.meet(x, y))[0] == '1') | (b4.name(b4.meet(x, y))[1] == '1') << 1;
            const int bj = (b4.name(b4.join(x, y))[0] == '1') | (b4.name(b4.join(x, y))[1] == '1') << 1;
            CHECK(bm == (bx & by));
            CHECK(bj == (bx | by));
        }
    CHECK_THROWS_WITH_AS(validate_semilattice({{"a", "b", "c", "d"}, {{"a", "c"}, {"b", "c"}, {"b", "d"}}}),
                         doctest::Contains("NoTop"), Error);
    CHECK_THROWS_WITH_AS(validate_semilattice({{"a", "b"}, {{"a", "b"}, {"b", "a"}}}), doctest::Contains("NotAPoset"),
                         Error);
}

TEST_CASE("left_adjoint_of matches the brute-force adjunction oracle") {
    auto ch3 = ptr(chain({"0", "1", "2"}));
    auto ch2 = ptr(chain({"0", "1"}));
    MonotoneMap id{ch3, ch3, {0, 1, 2}};
    auto r = left_adjoint_of(id);
    REQUIRE(r.adjoint);
    CHECK(r.adjoint->table == std::vector<ElemId>{0, 1, 2});

    MonotoneMap collapse{ch3, ch2, {0, 1, 1}};
    auto oracle = adjoint_oracle(collapse);
    REQUIRE(oracle.size() == 1);
    auto c = left_adjoint_of(collapse);
    REQUIRE(c.adjoint);
    CHECK(c.adjoint->table == oracle.front());
    CHECK(c.adjoint->table == std::vector<ElemId>{0, 1});

    auto b4 = ptr(boolean_lattice(2));  // 00, 10, 01, 11
    MonotoneMap atoms_down{b4, ch2, {0, 0, 0, 1}};
    CHECK(atoms_down.preserves_meets());
    auto a = left_adjoint_of(atoms_down);
    CHECK(adjoint_oracle(atoms_down).size() == 1);
    REQUIRE(a.adjoint);
    CHECK(a.adjoint->table == std::vector<ElemId>{0, 3});

    MonotoneMap atoms_up{b4, ch2, {0, 1, 1, 1}};
    CHECK(adjoint_oracle(atoms_up).empty());
    auto none = left_adjoint_of(atoms_up);
    CHECK_FALSE(none.adjoint);
    REQUIRE(none.failing);
}

TEST_CASE("left adjoints compose") {
    for (int n = 1; n <= 4; ++n)
        for (const auto& l : enumerate_lattices(n)) {
            auto p = ptr(l);
            auto ch2 = ptr(chain({"0", "1"}));
            // h sends x to top iff x is top; g: ch2 → p sends 1 ↦ top, 0 ↦ bottom.
            std::vector<ElemId> ht(p->size(), 0);
            ht[p->top()] = 1;
            MonotoneMap h{p, ch2, ht};
            MonotoneMap g{ch2, p, {p->bottom(), p->top()}};
            std::vector<ElemId> comp;
            for (ElemId x = 0; x < 2; ++x) comp.push_back(h(g(x)));
            MonotoneMap hg{ch2, ch2, comp};
            auto lh = left_adjoint_of(h), lg = left_adjoint_of(g), lhg = left_adjoint_of(hg);
            if (lh.adjoint && lg.adjoint && lhg.adjoint)
                for (ElemId y = 0; y < 2; ++y) CHECK((*lhg.adjoint)(y) == (*lg.adjoint)((*lh.adjoint)(y)));
        }
}

TEST_CASE("lattice enumeration matches known counts") {
    // Unlabelled lattices and distributive lattices on n = 1..6 points.
    const std::vector<std::size_t> lattices{1, 1, 1, 2, 5, 15};
    const std::vector<std::size_t> distributive{1, 1, 1, 2, 3, 5};
    for (int n = 1; n <= 6; ++n) {
        CHECK(enumerate_lattices(n).size() == lattices[n - 1]);
        CHECK(enumerate_frames(n).size() == distributive[n - 1]);
    }
}

TEST_CASE("downset frames") {
    auto m1 = chain({"t"});
    auto d1 = downset_frame(m1);
    CHECK(d1.frame.carrier().size() == 2);
    CHECK(d1.eta[0] == d1.frame.carrier().top());
    auto d2 = downset_frame(chain({"x", "t"}));
    CHECK(d2.frame.carrier().size() == 3);
    CHECK(d2.eta[0] != d2.eta[1]);
    CHECK(downset_frame(boolean_lattice(2)).frame.carrier().size() == 6);
    CHECK_THROWS_WITH_AS(downset_frame(chain({"0", "1", "2", "3"}), 8), doctest::Contains("SizeCap"), Error);
}

TEST_CASE("supercompact elements agree with the all-subsets oracle") {
    for (int n = 1; n <= 5; ++n)
        for (const auto& f : enumerate_frames(n)) CHECK(supercompact_elements(FiniteFrame(f)) == supercompact_oracle(f));
    CHECK(supercompact_elements(FiniteFrame(chain({"0", "1", "2"}))) == std::vector<ElemId>{1, 2});
    CHECK(supercompact_elements(FiniteFrame(boolean_lattice(2))) == std::vector<ElemId>{1, 2});
    CHECK(supercompact_elements(FiniteFrame(chain({"0"}))).empty());
}

TEST_CASE("supercoherence") {
    CHECK(check_supercoherent(FiniteFrame(chain({"0", "1", "2"}))).supercoherent);
    auto b4 = check_supercoherent(FiniteFrame(boolean_lattice(2)));
    CHECK_FALSE(b4.supercoherent);
    CHECK(b4.reason == "top");
    auto trivial = check_supercoherent(FiniteFrame(chain({"0"})));
    CHECK_FALSE(trivial.supercoherent);
    CHECK(trivial.reason == "top");
    for (int n = 1; n <= 6; ++n)
        for (const auto& m : enumerate_lattices(n)) {
            auto d = downset_frame(m);
            CHECK(check_supercoherent(d.frame).supercoherent);
            // The supercompacts are exactly the principal downsets, ordered as in M.
            auto sc = supercompact_elements(d.frame);
            auto image = d.eta;
            std::sort(image.begin(), image.end());
            CHECK(sc == image);
            for (ElemId a = 0; a < m.size(); ++a)
                for (ElemId b = 0; b < m.size(); ++b) CHECK(m.leq(a, b) == d.frame.carrier().leq(d.eta[a], d.eta[b]));
        }
}
