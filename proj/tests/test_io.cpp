#include "doctest.h"
#include "doctrina/bases.hpp"
#include "doctrina/examples.hpp"
#include "doctrina/io.hpp"

using namespace doctrina;

namespace {

const std::string kData = DOCTRINA_DATA_DIR;

// Same base names, same fibres up to element names and order, same tables.
bool same_doctrine(const Doctrine& p, const Doctrine& q) {
    const auto &c = p.base(), &d = q.base();
    if (c.num_objects() != d.num_objects() || c.num_morphisms() != d.num_morphisms()) return false;
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        if (c.object_name(a) != d.object_name(a)) return false;
        const auto &x = p.fibre(a), &y = q.fibre(a);
        if (x.size() != y.size()) return false;
        for (ElemId i = 0; i < x.size(); ++i) {
            if (x.name(i) != y.name(i)) return false;
            for (ElemId j = 0; j < x.size(); ++j)
                if (x.leq(i, j) != y.leq(i, j)) return false;
        }
    }
    for (MorId m = 0; m < c.num_morphisms(); ++m) {
        if (c.morphism_name(m) != d.morphism_name(m)) return false;
        for (ElemId i = 0; i < p.fibre(c.target(m)).size(); ++i)
            if (p.reindex(m, i) != q.reindex(m, i)) return false;
    }
    return true;
}

std::string c2_text() {
    return "category C2 {\n"
           "  objects: a, b\n"
           "  morphism id_a: a -> a\n"
           "  morphism id_b: b -> b\n"
           "  morphism u: a -> b\n"
           "  identity a: id_a\n"
           "  identity b: id_b\n"
           "}\n";
}

}  // namespace

TEST_CASE("shipped instance files") {
    auto c2 = resolve_instance(load_instance(kData + "/c2.doc"));
    CHECK(c2.categories.at("C2")->num_morphisms() == 3);
    const auto& b = c2.bundle("C2-over-b");
    REQUIRE(b.doctrine);
    CHECK(same_doctrine(*b.doctrine, two_chain_over_b()));
    CHECK(b.doctrine->structure().terminal().has_value());

    auto fs = resolve_instance(load_instance(kData + "/fs_prime.doc"));
    // Σ |B|^|A| over the carriers {0, 1, 2, 4}.
    int expected = 0;
    for (int a : {0, 1, 2, 4})
        for (int b2 : {0, 1, 2, 4}) {
            int n = 1;
            for (int i = 0; i < a; ++i) n *= b2;
            expected += n;
        }
    CHECK(expected == 305);
    CHECK(fs.categories.at("FS'")->num_morphisms() == expected);
    CHECK(fs.categories.at("FSS")->num_morphisms() == finite_sets({0, 1, 2, 4}, true).category.num_morphisms());
    REQUIRE(fs.bundles.size() == 1);
    CHECK(fs.bundles[0].name == "CH2");
}

TEST_CASE("round trip through text and json") {
    const auto file = export_bundles(example_pack());
    const auto text = serialize_text(file);
    const auto json = serialize_json(file);
    CHECK(parse_instance(text) == file);
    CHECK(parse_instance(json) == file);
    CHECK(serialize_text(parse_instance(json)) == text);
    CHECK(serialize_json(parse_instance(text)) == json);

    const auto shipped = load_instance(kData + "/c2.doc");
    CHECK(parse_instance(serialize_text(shipped)) == shipped);
    CHECK(parse_instance(serialize_json(shipped)) == shipped);
    const auto sets = load_instance(kData + "/fs_prime.doc");
    CHECK(parse_instance(serialize_json(sets)) == sets);
}

TEST_CASE("resolved bundles match the originals") {
    const auto pack = example_pack();
    auto in = resolve_instance(parse_instance(serialize_text(export_bundles(pack))));
    REQUIRE(in.bundles.size() == pack.size());
    for (std::size_t i = 0; i < pack.size(); ++i) {
        const auto &x = pack[i], &y = in.bundles[i];
        CAPTURE(x.name);
        CHECK(x.name == y.name);
        CHECK(x.description == y.description);
        REQUIRE(x.doctrine.has_value() == y.doctrine.has_value());
        if (x.doctrine) CHECK(same_doctrine(*x.doctrine, *y.doctrine));
        REQUIRE(x.sub.has_value() == y.sub.has_value());
        if (x.sub) CHECK(selections_agree(*x.sub, *y.sub));
        REQUIRE(x.semilattice.has_value() == y.semilattice.has_value());
        if (x.semilattice) {
            CHECK(x.semilattice->size() == y.semilattice->size());
            CHECK(find_order_isomorphism(*x.semilattice, *y.semilattice).has_value());
        }
    }
}

TEST_CASE("diagnostics") {
    auto code_of = [](const std::string& text) {
        try {
            resolve_instance(parse_instance(text));
        } catch (const Error& e) {
            return std::string(e.code()) + "|" + e.what();
        }
        return std::string("none");
    };
    CHECK(code_of(c2_text()) == "none");

    auto dangling = c2_text();
    dangling.replace(dangling.find("u: a -> b"), 9, "u: a -> c");
    CHECK(code_of(dangling).rfind("UnresolvedRef|", 0) == 0);

    auto bad = code_of(c2_text() + "semilattice L {\n  elements a, b\n}\n");
    CHECK(bad.rfind("ParseError|", 0) == 0);
    CHECK(bad.find("line 10: expected ':'") != std::string::npos);

    CHECK(code_of("category X {\n  objects: a\n").find("missing '}'") != std::string::npos);
    CHECK(code_of("widget W {\n}\n").find("line 1: unknown block 'widget'") != std::string::npos);
    CHECK(code_of(c2_text() + "doctrine P on Nowhere {\n}\n").rfind("UnresolvedRef|", 0) == 0);
    CHECK(code_of("{\"schema\": \"other\"}").rfind("ParseError|", 0) == 0);
    CHECK(code_of("{ not json").rfind("ParseError|", 0) == 0);
    CHECK(code_of("sets S {\n  sizes: 0, x\n}\n").find("line 2") != std::string::npos);
    CHECK(code_of("sets S {\n  sizes: 9, 9\n}\n").rfind("SizeCap|", 0) == 0);
    CHECK_THROWS_AS(load_instance(kData + "/no-such-file.doc"), Error);
}

TEST_CASE("quoting keeps awkward names intact") {
    InstanceFile f;
    f.semilattices.push_back({"odd name", {{"x y", "on", "->", "q\"t"}, {{"x y", "on"}}}});
    f.bundles.push_back({"b", "a \"quoted\" # description", std::nullopt, std::nullopt, "odd name"});
    CHECK(parse_instance(serialize_text(f)) == f);
    CHECK(parse_instance(serialize_json(f)) == f);
}
