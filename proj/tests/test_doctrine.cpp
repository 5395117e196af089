#include <set>

#include "doctest.h"
#include "doctrina/bases.hpp"
#include "doctrina/doctrine.hpp"

using namespace doctrina;

namespace {

Doctrine psi_c2() {
    auto s = structure_of(c2_category());
    return weak_subobjects_doctrine(s, all_morphisms(s->category()));
}

std::string elem(const Doctrine& p, const std::string& obj, ElemId x) {
    return p.fibre(p.base().object(obj)).name(x);
}

}  // namespace

TEST_CASE("validate_doctrine on the two-chain base") {
    auto s = structure_of(c2_category());
    auto t = trivial_doctrine(s);
    CHECK(doctrine_violations(t).empty());
    auto over_b = two_chain_over_b();
    const auto& c = over_b.base();
    CHECK(over_b.reindex_table(c.morphism("u")) == std::vector<ElemId>{0, 0});
    CHECK_THROWS_WITH_AS(doctrine_from_tables(s, {{"a", chain({"bot", "top"})}, {"b", chain({"bot", "top"})}},
                                              {{"u", {"bot", "top"}}, {"id_a", {"top", "top"}}}),
                         doctest::Contains("NotFunctorial"), Error);
    CHECK_THROWS_WITH_AS(doctrine_from_tables(s, {{"a", chain({"bot", "top"})}, {"b", chain({"bot", "top"})}},
                                              {{"u", {"bot", "bot"}}}),
                         doctest::Contains("NotTopPreserving"), Error);
}

TEST_CASE("trivial doctrines have singleton fibres") {
    auto fs = finite_sets({0, 1, 2, 4});
    auto t = trivial_doctrine(structure_of(fs.category));
    for (ObjId a = 0; a < t.base().num_objects(); ++a) CHECK(t.fibre(a).size() == 1);
    CHECK(trivial_doctrine(structure_of(terminal_category())).total_elements() == 1);
}

TEST_CASE("weak subobjects of C2") {
    auto p = psi_c2();
    const auto& c = p.base();
    const auto& fb = p.fibre(c.object("b"));
    REQUIRE(fb.size() == 2);
    CHECK(fb.leq(fb.element("[u]"), fb.element("[id_b]")));
    CHECK(fb.top() == fb.element("[id_b]"));
    CHECK(p.fibre(c.object("a")).size() == 1);
    auto s = p.structure_ptr();
    auto ids = weak_subobjects_doctrine(s, identities_class(c));
    CHECK(ids.total_elements() == 2);
}

TEST_CASE("subobjects over pullback-stable finite sets") {
    const std::vector<int> sizes{0, 1, 2, 4};
    const std::set<int> admissible(sizes.begin(), sizes.end());
    auto fs = finite_sets(sizes, true);
    auto s = structure_of(fs.category);
    auto sub = m_subobjects_doctrine(s, monos_class(s->category()));
    for (ObjId a = 0; a < s->category().num_objects(); ++a) {
        int count = 0;
        for (int mask = 0; mask < (1 << fs.sizes[a]); ++mask) count += admissible.count(__builtin_popcount(mask)) > 0;
        CHECK(sub.fibre(a).size() == count);
    }
    const auto& two = sub.fibre(s->category().object("2"));
    CHECK(find_order_isomorphism(two, boolean_lattice(2)).has_value());
    CHECK(sub.fibre(s->category().object("4")).size() == 12);
}

TEST_CASE("subobjects over the full FS' are not a doctrine") {
    auto fs = finite_sets({0, 1, 2, 4});
    auto s = structure_of(fs.category);
    CHECK_THROWS_WITH_AS(m_subobjects_doctrine(s, monos_class(s->category())), doctest::Contains("MissingStructure"),
                         Error);
    auto isos = m_subobjects_doctrine(s, isos_class(s->category()));
    for (ObjId a = 0; a < s->category().num_objects(); ++a) CHECK(isos.fibre(a).size() == 1);
}

TEST_CASE("Sub_M of C2 with all arrows coincides with the weak subobjects") {
    auto s = structure_of(c2_category());
    auto sub = m_subobjects_doctrine(s, all_morphisms(s->category()));
    auto psi = psi_c2();
    for (ObjId a = 0; a < 2; ++a) CHECK(sub.fibre(a).names() == psi.fibre(a).names());
    CHECK(sub.reindex_tables() == psi.reindex_tables());
}

TEST_CASE("exists_along") {
    auto p = psi_c2();
    const auto& c = p.base();
    auto r = exists_along(p, c.morphism("u"));
    REQUIRE(r.adjoint);
    CHECK(elem(p, "b", (*r.adjoint)(0)) == "[u]");
    auto id = exists_along(p, c.morphism("id_b"));
    REQUIRE(id.adjoint);
    CHECK(id.adjoint->table == std::vector<ElemId>{0, 1});
    auto over_b = two_chain_over_b();
    CHECK(elem(over_b, "b", over_b.exists(over_b.base().morphism("u"), 0)) == "bot");
}

TEST_CASE("check_lambda_existential") {
    auto p = psi_c2();
    CHECK(check_lambda_existential(p, all_morphisms(p.base())).ok());
    auto t = trivial_doctrine(p.structure_ptr());
    CHECK(check_lambda_existential(t, all_morphisms(t.base())).ok());
    auto over_b = two_chain_over_b();
    auto rb = check_lambda_existential(over_b, all_morphisms(over_b.base()));
    CHECK(rb.ok());
    CHECK(rb.unverifiable.empty());
    // P(b) is a point, so the square of u against itself cannot commute.
    auto over_a = two_chain_over_a();
    auto r = check_lambda_existential(over_a, all_morphisms(over_a.base()));
    CHECK(r.adjoints);
    CHECK_FALSE(r.bcc);
    CHECK(r.fr);
}

TEST_CASE("weak subobjects are existential along their class") {
    auto fs = finite_sets({0, 1, 2, 4}, true);
    auto s = structure_of(fs.category);
    auto sub = m_subobjects_doctrine(s, monos_class(s->category()));
    auto r = check_lambda_existential(sub, monos_class(s->category()));
    CHECK(r.ok());
}

TEST_CASE("find_elementary_structure") {
    auto t = trivial_doctrine(structure_of(c2_category()));
    auto e = find_elementary_structure(t);
    REQUIRE(e.found());
    for (auto d : e.witness->delta) CHECK(d == std::optional<ElemId>{0});

    auto over_b = two_chain_over_b();
    auto eb = find_elementary_structure(over_b);
    REQUIRE(eb.found());
    CHECK(elem(over_b, "b", *eb.witness->delta[1]) == "top");

    auto fs = finite_sets({0, 1, 2, 4}, true);
    auto s = structure_of(fs.category);
    auto sub = m_subobjects_doctrine(s, monos_class(s->category()));
    auto es = find_elementary_structure(sub);
    REQUIRE(es.found());
    const auto& c = s->category();
    const ObjId two = c.object("2");
    auto sq = s->product(two, two);
    REQUIRE(sq);
    // Oracle: the diagonal subobject is the set of points k of 2×2 with pr1(k) = pr2(k).
    const auto& pr1 = fs.functions[sq->pr1];
    const auto& pr2 = fs.functions[sq->pr2];
    std::set<int> diagonal;
    for (int k = 0; k < 4; ++k)
        if (pr1[k] == pr2[k]) diagonal.insert(k);
    const auto& fib = sub.fibre(sq->vertex);
    const std::string name = fib.name(*es.witness->delta[two]);  // "[m2_4_xy]"
    std::set<int> image;
    for (char ch : name.substr(name.size() - 3, 2)) image.insert(ch - '0');
    CHECK(image == diagonal);
    CHECK(std::find(es.witness->unverified.begin(), es.witness->unverified.end(), c.object("4")) !=
          es.witness->unverified.end());
}

TEST_CASE("restrict_subdoctrine") {
    auto p = psi_c2();
    auto tops = restrict_subdoctrine(p, tops_selection(p));
    CHECK(tops.doctrine.total_elements() == 2);
    Selection bad{{0}, {p.fibre(1).element("[u]")}};
    CHECK_THROWS_WITH_AS(restrict_subdoctrine(p, bad), doctest::Contains("MissingTop"), Error);

    auto fs = finite_sets({0, 1, 2, 4}, true);
    auto s = structure_of(fs.category);
    auto sub = m_subobjects_doctrine(s, monos_class(s->category()));
    Selection singletons;
    for (ObjId a = 0; a < s->category().num_objects(); ++a) {
        std::vector<ElemId> sel;
        const auto& f = sub.fibre(a);
        for (ElemId x = 0; x < f.size(); ++x) {
            const auto& n = f.name(x);  // "[mX_A_...]"
            if (x == f.top() || n.rfind("[m1_", 0) == 0) sel.push_back(x);
        }
        singletons.push_back(sel);
    }
    CHECK_THROWS_WITH_AS(restrict_subdoctrine(sub, singletons), doctest::Contains("NotClosedUnderMeet"), Error);
}
