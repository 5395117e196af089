#pragma once

#include <optional>
#include <string>
#include <vector>

#include "doctrina/analysis.hpp"

namespace doctrina {

/// Named doctrines over small bases together with a handful of named frames
/// and lattices. Bases have at most 12 arrows and fibres at most 16 elements.
std::vector<Bundle> example_pack();

/// Every lattice with at most five elements ("L<n>-<k>") and every frame
/// with six elements ("F6-<k>"), one per isomorphism class.
std::vector<Bundle> semilattice_corpus();

/// example_pack() followed by semilattice_corpus().
std::vector<Bundle> full_corpus();

/// The named bases: C2, terminal, chain3, square, V, FS' (sets of size 0, 1,
/// 2, 4 with all functions) and FSS (its pullback-stable part).
std::vector<std::pair<std::string, FinCategory>> named_categories();
std::optional<FinCategory> find_category(const std::string& name);

/// Looks a bundle up in the full corpus.
std::optional<Bundle> find_example(const std::string& name);

}  // namespace doctrina
