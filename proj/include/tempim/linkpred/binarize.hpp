#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/scores.hpp"

namespace tempim {

/// Forecast of snapshots p..T-1 (0-based). `scores` is empty for
/// predictors that emit edges directly.
struct PredictedFuture {
  std::vector<ScoreMatrix> scores;
  std::vector<Snapshot> snapshots;
  std::size_t edges_per_step = 0;

  TemporalNetwork as_network(std::size_t n) const { return TemporalNetwork(n, snapshots); }
};

/// round(C(n,2) * rho), half away from zero.
inline std::size_t target_edge_count(std::size_t n, double rho) {
  return static_cast<std::size_t>(std::llround(pair_count(n) * rho));
}

/// Keeps the round(C(n,2) * rho) highest-scoring pairs; ties go to the
/// lexicographically smaller (i, j).
inline Snapshot binarize(const ScoreMatrix& scores, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("binarize: density must lie in [0, 1]");
  const std::size_t n = scores.node_count();
  const std::size_t count = target_edge_count(n, rho);

  struct Scored {
    double score;
    Edge edge;
  };
  std::vector<Scored> all;
  all.reserve(static_cast<std::size_t>(pair_count(n)));
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) all.push_back({scores(i, j), {i, j}});

  const auto better = [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.edge < b.edge;
  };
  if (count < all.size())
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count), all.end(), better);
  std::vector<Edge> edges;
  edges.reserve(count);
  for (std::size_t e = 0; e < count; ++e) edges.push_back(all[e].edge);
  return Snapshot::from_edges(n, std::move(edges));
}

}  // namespace tempim
