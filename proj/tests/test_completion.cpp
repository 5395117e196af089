#include <set>

#include "doctest.h"
#include "doctrina/bases.hpp"
#include "doctrina/completion.hpp"

using namespace doctrina;

namespace {

Doctrine psi_c2() {
    auto s = structure_of(c2_category());
    return weak_subobjects_doctrine(s, all_morphisms(s->category()));
}

// Bases whose order is a meet-semilattice, so every pullback exists.
std::vector<FinCategory> lex_posets() {
    std::vector<FinCategory> out;
    out.push_back(c2_category());
    out.push_back(chain_category(3));
    out.push_back(terminal_category());
    out.push_back(poset_category(boolean_lattice(2)));
    return out;
}

// Oracle: in a poset the objects below A, ordered as in the base.
int down_count(const FinCategory& c, ObjId a) {
    int n = 0;
    for (ObjId b = 0; b < c.num_objects(); ++b) n += !c.hom(b, a).empty();
    return n;
}

Selection eta_image(const ExistentialCompletion& e) {
    Selection s;
    for (const auto& row : e.eta) s.push_back(row);
    return s;
}

}  // namespace

TEST_CASE("the full completion of the trivial doctrine is the weak subobjects doctrine") {
    for (const auto& base : lex_posets()) {
        auto s = structure_of(base);
        auto e = full_completion(trivial_doctrine(s));
        auto psi = weak_subobjects_doctrine(s, all_morphisms(s->category()));
        for (ObjId a = 0; a < base.num_objects(); ++a) {
            CHECK(e.doctrine.fibre(a).size() == down_count(base, a));
            CHECK(find_order_isomorphism(e.doctrine.fibre(a), psi.fibre(a)).has_value());
        }
    }
}

TEST_CASE("completing along identities changes nothing") {
    for (const auto& p : {two_chain_over_a(), two_chain_over_b(), psi_c2()}) {
        auto e = existential_completion(p, identities_class(p.base()));
        for (ObjId a = 0; a < p.base().num_objects(); ++a) {
            CHECK(e.doctrine.fibre(a).size() == p.fibre(a).size());
            std::set<ElemId> image(e.eta[a].begin(), e.eta[a].end());
            CHECK(static_cast<int>(image.size()) == p.fibre(a).size());
        }
        REQUIRE(e.epsilon);
    }
}

TEST_CASE("full completion of the two-chain over a") {
    auto p = two_chain_over_a();
    auto e = full_completion(p);
    const auto& c = p.base();
    const auto& fb = e.doctrine.fibre(c.object("b"));
    REQUIRE(fb.size() == 3);
    const ElemId top = fb.element("(id_b,top)"), ut = fb.element("(u,top)"), ub = fb.element("(u,bot)");
    CHECK(fb.top() == top);
    CHECK(fb.leq(ub, ut));
    CHECK(fb.leq(ut, top));
    CHECK_FALSE(fb.leq(top, ut));
    // Not existential along u, so there is no counit to emit.
    CHECK_FALSE(e.epsilon);
}

TEST_CASE("full completion of the two-chain over b") {
    auto p = two_chain_over_b();
    auto e = full_completion(p);
    const auto& c = p.base();
    const ObjId b = c.object("b");
    const auto& fb = e.doctrine.fibre(b);
    REQUIRE(fb.size() == 3);
    const ElemId u = fb.element("(u,top)"), bot = fb.element("(id_b,bot)");
    CHECK(fb.leq(u, bot));
    CHECK_FALSE(fb.leq(bot, u));
    REQUIRE(e.epsilon);
    // ε(u, ⊤) = ∃_u ⊤ = ⊥, and η(⊥) lies strictly above (u, ⊤).
    CHECK(p.fibre(b).name((*e.epsilon)[b][u]) == "bot");
    CHECK(e.eta[b][(*e.epsilon)[b][u]] == bot);
}

TEST_CASE("completions are existential along their class") {
    std::vector<std::pair<Doctrine, LeftClass>> cases;
    for (const auto& p : {two_chain_over_a(), two_chain_over_b(), psi_c2(), trivial_doctrine(structure_of(chain_category(3)))}) {
        cases.emplace_back(p, all_morphisms(p.base()));
        cases.emplace_back(p, projections_class(p.structure()));
        cases.emplace_back(p, identities_class(p.base()));
    }
    for (const auto& [p, lambda] : cases) {
        auto e = existential_completion(p, lambda);
        auto r = check_lambda_existential(e.doctrine, lambda);
        CHECK(r.ok());
        CHECK(r.unverifiable.empty());
        // Prenex form: every element is ∃ along its arrow of an η-image.
        for (ObjId a = 0; a < p.base().num_objects(); ++a)
            for (ElemId x = 0; x < e.doctrine.fibre(a).size(); ++x) {
                const auto [g, beta] = e.representatives[a][x];
                CHECK(e.doctrine.exists(g, e.eta[p.base().source(g)][beta]) == x);
            }
    }
}

TEST_CASE("completion over a truncated base reports missing pullbacks") {
    auto fs = finite_sets({0, 1, 2});
    auto s = structure_of(fs.category);
    CHECK_THROWS_WITH_AS(full_completion(trivial_doctrine(s)), doctest::Contains("MissingStructure"), Error);
}

TEST_CASE("Grothendieck category") {
    auto t = groth_category(trivial_doctrine(structure_of(c2_category())));
    CHECK(t->category().num_objects() == 2);
    CHECK(t->category().num_morphisms() == 3);

    auto g = groth_category(psi_c2());
    const auto& gc = g->category();
    REQUIRE(gc.num_objects() == 3);
    const ObjId bu = gc.object("(b,[u])"), bid = gc.object("(b,[id_b])");
    CHECK(gc.hom(bu, bid).size() == 1);
    CHECK(gc.morphism_name(gc.hom(bu, bid).front()) == "id_b:(b,[u])->(b,[id_b])");
    CHECK(gc.hom(bid, bu).empty());

    auto gb = groth_category(two_chain_over_b());
    const auto& gbc = gb->category();
    const ObjId bot = gbc.object("(b,bot)");
    std::set<std::string> out;
    for (ObjId y = 0; y < gbc.num_objects(); ++y)
        if (!gbc.hom(bot, y).empty()) out.insert(gbc.object_name(y));
    CHECK(out == std::set<std::string>{"(b,bot)", "(b,top)"});
    // Products of 𝒢 sit over those of the base.
    auto prod = gb->structure->product(bot, gbc.object("(a,top)"));
    REQUIRE(prod);
    CHECK(gbc.object_name(prod->vertex) == "(a,top)");
}

TEST_CASE("comprehension completion") {
    auto cc = comprehension_completion(psi_c2());
    const auto& gc = cc.groth->category();
    CHECK(cc.doctrine.fibre(gc.object("(b,[id_b])")).size() == 2);
    CHECK(cc.doctrine.fibre(gc.object("(b,[u])")).size() == 1);
    auto ct = comprehension_completion(trivial_doctrine(structure_of(c2_category())));
    for (ObjId x = 0; x < ct.groth->category().num_objects(); ++x) CHECK(ct.doctrine.fibre(x).size() == 1);
    auto cb = comprehension_completion(two_chain_over_b());
    const auto& bot = cb.doctrine.fibre(cb.groth->category().object("(b,bot)"));
    CHECK(bot.names() == std::vector<std::string>{"bot"});
}

TEST_CASE("extensional reflection") {
    auto t = extensional_reflection(trivial_doctrine(structure_of(c2_category())));
    CHECK(t.structure->category().num_morphisms() == 3);

    auto fs = finite_sets({0, 1, 2, 4}, true);
    auto s = structure_of(fs.category);
    auto sub = m_subobjects_doctrine(s, monos_class(s->category()));
    auto x = extensional_reflection(sub);
    const auto& c = s->category();
    CHECK(x.klass[c.morphism("m1_2_0")] != x.klass[c.morphism("m1_2_1")]);
    CHECK(std::find(x.unverified.begin(), x.unverified.end(), c.object("4")) != x.unverified.end());

    // With δ = ⊤ every pair of parallel arrows into 2 is provably equal.
    auto full = finite_sets({0, 1, 2, 4});
    auto fsx = structure_of(full.category);
    auto tx = extensional_reflection(trivial_doctrine(fsx));
    const auto& fc = fsx->category();
    for (ObjId a = 0; a < fc.num_objects(); ++a) {
        const auto& hom = fc.hom(a, fc.object("2"));
        for (MorId f : hom) CHECK(tx.klass[f] == tx.klass[hom.front()]);
    }
}

TEST_CASE("category of predicates") {
    auto t = predicates_category(trivial_doctrine(structure_of(c2_category())));
    CHECK(search_equivalence(t.category(), c2_category()).status == SearchStatus::Found);
    auto b = predicates_category(two_chain_over_b());
    CHECK(b.category().num_objects() == 3);
    CHECK(b.category().is_preorder());
    // On a poset base ∼ is equality, so Prd is 𝒢 itself.
    auto p = predicates_category(psi_c2());
    CHECK(p.category().num_morphisms() == p.completion.groth->category().num_morphisms());
}

TEST_CASE("comprehensions") {
    auto fs = finite_sets({0, 1, 2, 4}, true);
    auto s = structure_of(fs.category);
    const auto& c = s->category();
    auto sub = m_subobjects_doctrine(s, monos_class(c));
    const ObjId two = c.object("2");
    const auto& f2 = sub.fibre(two);
    // Oracle: the comprehension of a subset is a mono whose image is that subset.
    for (ElemId x = 0; x < f2.size(); ++x) {
        auto found = find_comprehension(sub, two, x);
        REQUIRE(found.strict);
        std::set<int> image(fs.functions[*found.strict].begin(), fs.functions[*found.strict].end());
        const auto& name = f2.name(x);  // "[mK_2_...]"
        std::set<int> subset;
        for (std::size_t i = name.rfind('_') + 1; i + 1 < name.size(); ++i) subset.insert(name[i] - '0');
        CHECK(image == subset);
    }
    CHECK(c.morphism_name(*find_comprehension(sub, two, f2.element("[m1_2_0]")).strict) == "m1_2_0");
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        auto top = find_comprehension(sub, a, sub.fibre(a).top());
        REQUIRE(top.strict);
        CHECK(is_iso(c, *top.strict));
    }

    auto psi = psi_c2();
    const auto& pc = psi.base();
    auto u = find_comprehension(psi, pc.object("b"), psi.fibre(pc.object("b")).element("[u]"));
    REQUIRE(u.strict);
    CHECK(pc.morphism_name(*u.strict) == "u");
    auto r = check_comprehension_properties(psi);
    CHECK(r.has_all);
    CHECK(r.full);
    CHECK(r.composable);
    REQUIRE(r.comprehensive_diagonals);
    CHECK(*r.comprehensive_diagonals);

    // P(a) is a point, so u reindexes ⊥ ∈ P(b) to ⊤ and is its comprehension.
    auto over_b = two_chain_over_b();
    const auto& bc = over_b.base();
    const ObjId b = bc.object("b");
    auto bot = find_comprehension(over_b, b, over_b.fibre(b).element("bot"));
    REQUIRE(bot.strict);
    CHECK(bc.morphism_name(*bot.strict) == "u");
    CHECK(check_comprehension_properties(over_b).has_all);
}

TEST_CASE("full completions have comprehensive diagonals") {
    for (const auto& base : lex_posets()) {
        auto s = structure_of(base);
        for (const auto& p : {trivial_doctrine(s)}) {
            auto e = full_completion(p);
            auto r = check_comprehension_properties(e.doctrine);
            REQUIRE(r.comprehensive_diagonals);
            CHECK(*r.comprehensive_diagonals);
        }
    }
    auto r = check_comprehension_properties(full_completion(two_chain_over_b()).doctrine);
    REQUIRE(r.comprehensive_diagonals);
    CHECK(*r.comprehensive_diagonals);
}

TEST_CASE("comparison with weak subobjects over the Grothendieck category") {
    auto psi = psi_c2();
    auto all = all_morphisms(psi.base());
    auto ok = build_comparison_groth(psi, tops_selection(psi), all);
    CHECK(ok.verdict);
    for (char f : ok.fibre_iso) CHECK(f);

    auto over_a = two_chain_over_a();
    auto bad = build_comparison_groth(over_a, all_selection(over_a), all_morphisms(over_a.base()));
    CHECK_FALSE(bad.verdict);
    CHECK_FALSE(bad.fibre_iso[over_a.base().object("b")]);

    auto t = trivial_doctrine(psi.structure_ptr());
    CHECK(build_comparison_groth(t, tops_selection(t), identities_class(t.base())).verdict);
    auto over_b = two_chain_over_b();
    CHECK_FALSE(build_comparison_groth(over_b, tops_selection(over_b), identities_class(over_b.base())).verdict);
}

TEST_CASE("comparison with weak subobjects over the category of predicates") {
    auto t = trivial_doctrine(structure_of(c2_category()));
    auto pure = pure_completion(t);
    auto r = build_comparison_pred(pure.doctrine, eta_image(pure));
    CHECK(r.verdict);
    CHECK(r.weak_comprehensions);

    auto ch3 = terminal_doctrine(chain({"0", "1", "2"}));
    CHECK(build_comparison_pred(ch3, all_selection(ch3)).verdict);

    auto psi = psi_c2();
    auto own = build_comparison_pred(psi, all_selection(psi));
    CHECK_FALSE(own.verdict);
}
