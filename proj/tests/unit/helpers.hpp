#pragma once

#include <string>
#include <vector>

#include "gpme/graph.hpp"

namespace testing {

// Path x0 - x1 - ... with unit weights, mu = 1, kappa = 0.
inline gpme::Graph path(int n, double w = 1.0) {
  gpme::GraphBuilder b;
  for (int i = 0; i < n; ++i) b.add_node("x" + std::to_string(i));
  for (int i = 0; i + 1 < n; ++i) b.add_edge("x" + std::to_string(i), "x" + std::to_string(i + 1), w);
  return b.build();
}

// The 10-node example graph used for boundary bookkeeping.
inline gpme::Graph ten_node_graph() {
  gpme::GraphBuilder b;
  for (int i = 0; i < 10; ++i) b.add_node("x" + std::to_string(i));
  const std::vector<std::pair<int, int>> edges{{8, 6}, {6, 5}, {8, 5}, {5, 4}, {4, 0}, {0, 7}, {7, 8}, {7, 6},
                                               {8, 9}, {9, 3}, {3, 2}, {1, 0}, {1, 2}, {4, 3}, {3, 0}};
  for (auto [u, v] : edges) b.add_edge("x" + std::to_string(u), "x" + std::to_string(v), 1.0);
  return b.build();
}

}  // namespace testing
