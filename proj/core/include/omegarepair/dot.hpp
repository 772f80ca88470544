#pragma once

#include "omegarepair/model.hpp"
#include "omegarepair/product.hpp"

#include <string>
#include <vector>

namespace omegarepair {

// Vertex label = tuple, edge label = weight, final vertices double-circled.
std::string to_dot(const ProductGraph& g, const KripkeStructure& k, const RepairMachine& t, const NBA& b);
// Max vertices are drawn as boxes; `strategy` (Min vertex -> Max vertex, may
// be empty) is highlighted in bold.
std::string to_dot(const GameArena& a, const KripkeStructure& k, const RepairMachine& t, const NBA& b,
                   const std::vector<std::pair<int, int>>& strategy = {});
std::string to_dot(const NBA& a);
// A lasso over product vertices as a chain with a back edge.
std::string lasso_dot(const ProductGraph& g, const Lasso<int>& run, const KripkeStructure& k,
                      const RepairMachine& t, const NBA& b);

} // namespace omegarepair
