#include "doctrina/examples.hpp"

#include "doctrina/bases.hpp"

namespace doctrina {

namespace {

Doctrine psi_of(FinCategory c) {
    auto s = structure_of(std::move(c));
    return weak_subobjects_doctrine(s, all_morphisms(s->category()));
}

Doctrine sub_of(FinCategory c) {
    auto s = structure_of(std::move(c));
    return m_subobjects_doctrine(s, monos_class(s->category()));
}

Doctrine power_of(const std::vector<int>& sizes, const InfSemilattice& values) {
    auto fs = finite_sets(sizes, true);
    auto s = structure_of(fs.category);
    return power_doctrine(fs, s, values);
}

Bundle doctrine_bundle(std::string name, std::string description, Doctrine p) {
    return {std::move(name), std::move(description), std::move(p), std::nullopt, std::nullopt};
}

Bundle completion_bundle(std::string name, std::string description, const ExistentialCompletion& e) {
    return {std::move(name), std::move(description), e.doctrine, Selection(e.eta.begin(), e.eta.end()),
            std::nullopt};
}

Bundle lattice_bundle(std::string name, std::string description, InfSemilattice l) {
    return {std::move(name), std::move(description), std::nullopt, std::nullopt, std::move(l)};
}

InfSemilattice diamond(int atoms) {
    std::vector<std::string> names{"bot"};
    for (int i = 0; i < atoms; ++i) names.push_back("x" + std::to_string(i));
    names.push_back("top");
    const int n = static_cast<int>(names.size());
    std::vector<char> leq(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        leq[static_cast<std::size_t>(i) * n + i] = 1;
        leq[i] = 1;
        leq[static_cast<std::size_t>(i) * n + n - 1] = 1;
    }
    return InfSemilattice::from_relation(names, leq);
}

InfSemilattice pentagon() {
    // bot < a < b < top, bot < c < top
    std::vector<std::string> names{"bot", "a", "b", "c", "top"};
    std::vector<char> leq(25, 0);
    auto set = [&](int x, int y) { leq[static_cast<std::size_t>(x) * 5 + y] = 1; };
    for (int i = 0; i < 5; ++i) set(0, i), set(i, 4), set(i, i);
    set(1, 2);
    return InfSemilattice::from_relation(names, leq);
}

}  // namespace

std::vector<Bundle> example_pack() {
    const auto ch3 = chain({"0", "1", "2"});
    const auto ch2 = chain({"bot", "top"});
    auto c2 = structure_of(c2_category());
    auto trivial_c2 = trivial_doctrine(c2);
    FinCategory square = poset_category(boolean_lattice(2));
    FinCategory v = poset_category({"z", "l", "r"}, {{"z", "l"}, {"z", "r"}});

    std::vector<Bundle> out;
    out.push_back(doctrine_bundle("C2-trivial", "one-point fibres over the arrow a -> b", trivial_c2));
    out.push_back(doctrine_bundle("C2-weak", "weak subobjects of the arrow a -> b", psi_of(c2_category())));
    out.push_back(doctrine_bundle("C2-over-a", "two-chain at a, point at b", two_chain_over_a()));
    out.push_back(doctrine_bundle("C2-over-b", "point at a, two-chain at b", two_chain_over_b()));
    out.push_back(completion_bundle("C2-over-b-full", "full existential completion of C2-over-b",
                                    full_completion(two_chain_over_b())));
    out.push_back(completion_bundle("C2-trivial-pure", "pure existential completion of C2-trivial",
                                    pure_completion(trivial_c2)));
    out.push_back(doctrine_bundle("terminal-CH3", "the three-chain over the terminal category", terminal_doctrine(ch3)));
    out.push_back(doctrine_bundle("terminal-B4", "the four-element Boolean algebra over the terminal category",
                                  terminal_doctrine(boolean_lattice(2))));
    out.push_back(doctrine_bundle("terminal-M2", "the two-chain over the terminal category", terminal_doctrine(ch2)));
    out.push_back(doctrine_bundle("chain3-trivial", "one-point fibres over the chain c0 < c1 < c2",
                                  trivial_doctrine(structure_of(chain_category(3)))));
    out.push_back(doctrine_bundle("chain3-weak", "weak subobjects of the chain c0 < c1 < c2", psi_of(chain_category(3))));
    out.push_back(doctrine_bundle("square-weak", "weak subobjects of the square lattice", psi_of(square)));
    out.push_back(doctrine_bundle("square-sub", "subobjects of the square lattice", sub_of(square)));
    out.push_back(doctrine_bundle("V-weak", "weak subobjects of the V-shaped meet-semilattice", psi_of(v)));
    out.push_back(doctrine_bundle("sets01-CH2", "two-valued predicates on the sets 0 and 1", power_of({0, 1}, ch2)));
    out.push_back(doctrine_bundle("sets012-CH2", "two-valued predicates on the sets 0, 1, 2", power_of({0, 1, 2}, ch2)));
    out.push_back(doctrine_bundle("sets012-sub", "subobjects on the sets 0, 1, 2", sub_of(finite_sets({0, 1, 2}).category)));

    out.push_back(lattice_bundle("B4", "the four-element Boolean frame", boolean_lattice(2)));
    out.push_back(lattice_bundle("CH3", "the three-chain frame", ch3));
    out.push_back(lattice_bundle("M1", "the one-element semilattice", chain({"top"})));
    out.push_back(lattice_bundle("M2", "the two-element semilattice", ch2));
    out.push_back(lattice_bundle("B8", "the eight-element Boolean frame", boolean_lattice(3)));
    out.push_back(lattice_bundle("M3", "the diamond with three atoms", diamond(3)));
    out.push_back(lattice_bundle("N5", "the pentagon", pentagon()));
    return out;
}

std::vector<Bundle> semilattice_corpus() {
    std::vector<Bundle> out;
    for (int n = 1; n <= 5; ++n) {
        int k = 0;
        for (auto& l : enumerate_lattices(n))
            out.push_back(lattice_bundle("L" + std::to_string(n) + "-" + std::to_string(k++),
                                         "lattice with " + std::to_string(n) + " elements", std::move(l)));
    }
    int k = 0;
    for (auto& f : enumerate_frames(6))
        out.push_back(lattice_bundle("F6-" + std::to_string(k++), "frame with 6 elements", std::move(f)));
    return out;
}

std::vector<Bundle> full_corpus() {
    auto out = example_pack();
    for (auto& b : semilattice_corpus()) out.push_back(std::move(b));
    return out;
}

std::vector<std::pair<std::string, FinCategory>> named_categories() {
    return {{"C2", c2_category()},
            {"terminal", terminal_category()},
            {"chain3", chain_category(3)},
            {"square", poset_category(boolean_lattice(2))},
            {"V", poset_category({"z", "l", "r"}, {{"z", "l"}, {"z", "r"}})},
            {"FS'", finite_sets({0, 1, 2, 4}).category},
            {"FSS", finite_sets({0, 1, 2, 4}, true).category}};
}

std::optional<FinCategory> find_category(const std::string& name) {
    for (auto& [n, c] : named_categories())
        if (n == name) return std::move(c);
    return std::nullopt;
}

std::optional<Bundle> find_example(const std::string& name) {
    for (auto& b : full_corpus())
        if (b.name == name) return b;
    return std::nullopt;
}

}  // namespace doctrina
