#pragma once

#include <memory>
#include <string>
#include <vector>

#include "doctrina/doctrine.hpp"
#include "doctrina/fincat.hpp"
#include "doctrina/order.hpp"

namespace doctrina {

/// A finite poset as a category: one arrow x→y whenever x ≤ y. Identities are
/// named "id_x"; other arrows "x<y" unless `arrow_names` supplies a name for
/// the pair (looked up as "x<y").
FinCategory poset_category(const std::vector<std::string>& objects, const std::vector<std::pair<std::string, std::string>>& leq,
                           const std::vector<std::pair<std::string, std::string>>& arrow_names = {});
FinCategory poset_category(const InfSemilattice& order);

/// a ≤ b with arrows id_a, id_b, u.
FinCategory c2_category();
FinCategory terminal_category();
FinCategory discrete_category(int n);
/// Chain 0 < 1 < ... < n-1.
FinCategory chain_category(int n);

/// Finite sets with the given cardinalities and functions between them.
/// Arrow "mA_B_v0v1.." sends i to v_i. With `stable` only functions whose
/// preimages of subsets of admissible size are again of admissible size are
/// kept, which makes subobject pullbacks stay inside the category.
struct FinSets {
    FinCategory category;
    std::vector<int> sizes;                    // per object
    std::vector<std::vector<int>> functions;   // per morphism
};
FinSets finite_sets(const std::vector<int>& sizes, bool stable = false);

std::shared_ptr<const ChosenStructure> structure_of(FinCategory c);

/// The doctrine X ↦ F^X over a category of finite sets, ordered pointwise and
/// reindexed by precomposition.
Doctrine power_doctrine(const FinSets& sets, std::shared_ptr<const ChosenStructure> structure,
                        const InfSemilattice& values);

/// Doctrine over a category given by explicit fibres and reindexing tables
/// written as element-name lists: tables[f] lists P_f of each element of
/// P(cod f), in element order. Identities may be omitted.
Doctrine doctrine_from_tables(std::shared_ptr<const ChosenStructure> structure,
                              const std::vector<std::pair<std::string, InfSemilattice>>& fibres,
                              const std::vector<std::pair<std::string, std::vector<std::string>>>& tables);

/// C2 with P(a) = 1 and P(b) = {bot < top}.
Doctrine two_chain_over_b();
/// C2 with P(a) = {bot < top} and P(b) = 1.
Doctrine two_chain_over_a();
/// The terminal category with fibre `values`.
Doctrine terminal_doctrine(const InfSemilattice& values);

}  // namespace doctrina
