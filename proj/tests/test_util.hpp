#pragma once

#include <cstdint>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/random.hpp"

namespace tempim::testing {

/// Random temporal network, each pair present in each snapshot with
/// probability `density`.
inline TemporalNetwork random_network(std::size_t n, std::size_t horizon, double density, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Snapshot> snaps;
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j)
        if (rng.uniform() < density) edges.push_back({i, j});
    snaps.push_back(Snapshot::from_edges(n, std::move(edges)));
  }
  return TemporalNetwork(n, std::move(snaps));
}

inline TemporalNetwork repeat(const Snapshot& g, std::size_t horizon) {
  return TemporalNetwork(g.node_count(), std::vector<Snapshot>(horizon, g));
}

}  // namespace tempim::testing
