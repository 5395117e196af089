#include <set>

#include "doctest.h"
#include "doctrina/bases.hpp"
#include "doctrina/regexact.hpp"

using namespace doctrina;

namespace {

Doctrine psi_c2() {
    auto s = structure_of(c2_category());
    return weak_subobjects_doctrine(s, all_morphisms(s->category()));
}

bool equivalent(const FinCategory& a, const FinCategory& b) {
    return search_equivalence(a, b).status == SearchStatus::Found;
}

// Subobjects of finite sets are named by a representing mono "[mK_N_v..]";
// its image is the set of digits after the last underscore.
std::set<int> subset_of(const std::string& name) {
    std::set<int> out;
    for (std::size_t i = name.rfind('_') + 1; i + 1 < name.size(); ++i) out.insert(name[i] - '0');
    return out;
}

struct SetsFixture {
    FinSets fs = finite_sets({0, 1, 2, 4}, true);
    StructurePtr s = structure_of(fs.category);
    Doctrine sub = m_subobjects_doctrine(s, monos_class(s->category()));
    const FinCategory& c() const { return s->category(); }

    // The relation φ ⊆ A×B as pairs of points.
    std::set<std::pair<int, int>> pairs(ObjId a, ObjId b, ElemId phi) const {
        const auto cone = *s->product(a, b);
        std::set<std::pair<int, int>> out;
        for (int k : subset_of(sub.fibre(cone.vertex).name(phi)))
            out.insert({fs.functions[cone.pr1][k], fs.functions[cone.pr2][k]});
        return out;
    }
};

}  // namespace

TEST_CASE("entire and functional relations agree with the set-level reading") {
    SetsFixture x;
    Relations rel(x.sub);
    const auto& c = x.c();
    int checked = 0;
    for (ObjId a = 0; a < c.num_objects(); ++a)
        for (ObjId b = 0; b < c.num_objects(); ++b) {
            if (!x.s->product(a, b) || !x.s->product(b, b) || !x.s->triple(a, b, b)) continue;
            const ObjId ab = x.s->product(a, b)->vertex;
            for (ElemId phi = 0; phi < x.sub.fibre(ab).size(); ++phi) {
                const auto r = x.pairs(a, b, phi);
                std::set<int> domain;
                bool single = true;
                std::map<int, int> value;
                for (auto [i, j] : r) {
                    domain.insert(i);
                    if (value.count(i) && value[i] != j) single = false;
                    value[i] = j;
                }
                CHECK(rel.entire(a, b, phi) == (static_cast<int>(domain.size()) == x.fs.sizes[a]));
                CHECK(rel.functional(a, b, phi) == single);
                ++checked;
            }
        }
    CHECK(checked > 20);

    const ObjId one = c.object("1"), two = c.object("2");
    const ObjId p12 = x.s->product(one, two)->vertex;
    const auto& f12 = x.sub.fibre(p12);
    // {(•,0)}, the full relation and ∅.
    for (ElemId phi = 0; phi < f12.size(); ++phi) {
        const auto r = x.pairs(one, two, phi);
        if (r == std::set<std::pair<int, int>>{{0, 0}}) {
            CHECK(rel.entire(one, two, phi));
            CHECK(rel.functional(one, two, phi));
        } else if (r.size() == 2) {
            CHECK(rel.entire(one, two, phi));
            CHECK_FALSE(rel.functional(one, two, phi));
        } else if (r.empty()) {
            CHECK_FALSE(rel.entire(one, two, phi));
            CHECK(rel.functional(one, two, phi));
        }
    }
}

TEST_CASE("relational composition of graphs") {
    SetsFixture x;
    Relations rel(x.sub);
    const auto& c = x.c();
    std::vector<ObjId> small{c.object("0"), c.object("1"), c.object("2")};
    for (ObjId a : small)
        for (ObjId b : small)
            for (ObjId d : small)
                for (MorId f : c.hom(a, b))
                    for (MorId g : c.hom(b, d)) {
                        if (!x.s->triple(a, b, d) || !x.s->triple(a, d, d) || !x.s->triple(a, b, b)) continue;
                        const ElemId gf = rel.compose(a, b, d, rel.graph(f), rel.graph(g));
                        CHECK(gf == rel.graph(c.compose(g, f)));
                    }
    // The graph of a function is the set of pairs (i, f i).
    for (MorId f : c.hom(c.object("2"), c.object("2"))) {
        std::set<std::pair<int, int>> expected;
        for (int i = 0; i < 2; ++i) expected.insert({i, x.fs.functions[f][i]});
        CHECK(x.pairs(c.object("2"), c.object("2"), rel.graph(f)) == expected);
    }
    // δ is a two-sided unit and ∅ is absorbing.
    const ObjId one = c.object("1"), two = c.object("2");
    const auto& f12 = x.sub.fibre(x.s->product(one, two)->vertex);
    const ElemId empty = f12.bottom();
    for (ElemId phi = 0; phi < f12.size(); ++phi) {
        CHECK(rel.compose(one, one, two, rel.delta(one), phi) == phi);
        CHECK(rel.compose(one, two, two, phi, rel.delta(two)) == phi);
        CHECK(x.pairs(one, one, rel.compose(one, two, one, empty, x.sub.fibre(x.s->product(two, one)->vertex).top()))
                  .empty());
    }
}

TEST_CASE("relational composition is associative on Ψ over C2") {
    Relations rel(psi_c2());
    const auto& q = rel.doctrine();
    const int n = q.base().num_objects();
    for (ObjId a = 0; a < n; ++a)
        for (ObjId b = 0; b < n; ++b)
            for (ObjId c = 0; c < n; ++c)
                for (ObjId d = 0; d < n; ++d)
                    for (ElemId f = 0; f < q.fibre(rel.product(a, b)).size(); ++f)
                        for (ElemId g = 0; g < q.fibre(rel.product(b, c)).size(); ++g)
                            for (ElemId h = 0; h < q.fibre(rel.product(c, d)).size(); ++h)
                                CHECK(rel.compose(a, c, d, rel.compose(a, b, c, f, g), h) ==
                                      rel.compose(a, b, d, f, rel.compose(b, c, d, g, h)));
}

TEST_CASE("regular completions") {
    auto t = regular_completion(trivial_doctrine(structure_of(c2_category())));
    CHECK(equivalent(*t.reg.category, terminal_category()));
    for (ObjId x = 0; x < t.reg.category->num_objects(); ++x)
        for (ObjId y = 0; y < t.reg.category->num_objects(); ++y) CHECK(t.reg.category->hom(x, y).size() == 1);

    auto psi = regular_completion(psi_c2());
    CHECK(equivalent(*psi.reg.category, c2_category()));
    auto rl = reg_lex_direct(*structure_of(c2_category()));
    CHECK(rl.num_objects() == 3);
    CHECK(skeleton_objects(rl).size() == 2);
    CHECK(equivalent(rl, c2_category()));
    CHECK(equivalent(*psi.reg.category, rl));
    CHECK(equivalent(reg_lex_direct(*structure_of(terminal_category())), terminal_category()));
    CHECK(equivalent(reg_lex_direct(*structure_of(chain_category(3))),
                     *regular_completion(weak_subobjects_doctrine(structure_of(chain_category(3)),
                                                                  all_morphisms(chain_category(3))))
                          .reg.category));
}

TEST_CASE("subobjects of (A,⊤) in Reg(P) recover P(A)") {
    std::vector<Doctrine> corpus{psi_c2(), two_chain_over_b(), trivial_doctrine(structure_of(c2_category())),
                                 full_completion(two_chain_over_b()).doctrine};
    for (const auto& p : corpus) {
        auto r = regular_completion(p);
        auto s = structure_of(*r.reg.category);
        auto sub = m_subobjects_doctrine(s, monos_class(s->category()));
        const auto& g = *r.comprehension.groth;
        for (ObjId a = 0; a < p.base().num_objects(); ++a) {
            const ObjId top = g.object_of(a, p.fibre(a).top());
            CHECK(find_order_isomorphism(sub.fibre(top), p.fibre(a)).has_value());
        }
    }
}

TEST_CASE("exact completions") {
    auto t = exact_completion(trivial_doctrine(structure_of(c2_category())));
    CHECK(equivalent(*t.category, terminal_category()));

    auto psi = psi_c2();
    auto e = exact_completion(psi);
    CHECK(e.category->num_objects() == 3);
    CHECK(equivalent(*e.category, reg_lex_direct(*structure_of(c2_category()))));

    Relations rel(psi);
    for (const auto& per : e.objects) {
        auto ok = per_arrow_conditions(rel, per, per, per.rho);
        for (bool b : ok) CHECK(b);
    }
    CHECK(equivalent(*ex_reg(structure_of(terminal_category())).category, terminal_category()));
    auto c2 = structure_of(c2_category());
    CHECK(ex_reg(c2).category->num_objects() ==
          exact_completion(m_subobjects_doctrine(c2, monos_class(c2->category()))).category->num_objects());
}

TEST_CASE("PER arrow conditions reject non-functional relations") {
    auto over_b = two_chain_over_b();
    Relations rel(over_b);
    const ObjId b = over_b.base().object("b");
    const auto& fb = over_b.fibre(b);
    const PerObject top{b, fb.top()}, bot{b, fb.element("bot")};
    // b×b = b: ⊤ as a relation from (b,⊥) to (b,⊤) is not strict in its domain.
    auto ok = per_arrow_conditions(rel, bot, top, fb.top());
    CHECK_FALSE(ok[0]);
    CHECK(per_arrow_conditions(rel, bot, top, fb.element("bot"))[0]);
    CHECK(is_per(rel, b, fb.element("bot")));
}

TEST_CASE("T_P is the exact completion of Reg(P)") {
    std::vector<Doctrine> corpus{psi_c2(), two_chain_over_b(), trivial_doctrine(structure_of(c2_category())),
                                 full_completion(two_chain_over_b()).doctrine};
    for (const auto& p : corpus) {
        auto tp = exact_completion(p);
        auto reg = regular_completion(p);
        auto exreg = ex_reg(structure_of(*reg.reg.category));
        CHECK(equivalent(*tp.category, *exreg.category));
    }
}

TEST_CASE("regular comparison functor") {
    auto psi = psi_c2();
    auto v = build_reg_functor(psi, tops_selection(psi));
    CHECK(v.equivalence());

    auto over_b = two_chain_over_b();
    auto full = full_completion(over_b);
    Selection eta;
    for (const auto& row : full.eta) eta.push_back(row);
    CHECK(build_reg_functor(full.doctrine, eta).equivalence());

    auto over_a = two_chain_over_a();
    auto bad = build_reg_functor(over_a, tops_selection(over_a));
    CHECK_FALSE(bad.equivalence());
    CHECK_FALSE(bad.witnesses.empty());
}

TEST_CASE("exact comparison functor") {
    auto psi = psi_c2();
    CHECK(build_exact_functor(psi, tops_selection(psi)).equivalence());
    auto over_a = two_chain_over_a();
    auto bad = build_exact_functor(over_a, tops_selection(over_a));
    CHECK_FALSE(bad.equivalence());
}
