#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/random.hpp"

namespace tempim {

/// Planted stable-hub temporal model: a fixed set of hubs that each link
/// to every other node with hub_edge_prob per snapshot, plus churning
/// background edges between all remaining pairs with background_edge_prob.
struct SyntheticOptions {
  std::size_t nodes = 100;
  std::size_t snapshots = 20;
  std::size_t hubs = 10;
  double hub_edge_prob = 0.15;
  double background_edge_prob = 0.01;
  std::uint64_t seed = 7;
};

/// Hub node ids, drawn by a seeded shuffle so they are not the lowest ids.
inline std::vector<NodeId> synthetic_hubs(const SyntheticOptions& opts) {
  std::vector<NodeId> ids(opts.nodes);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  SplitMix64 rng(stream_seed(opts.seed, 0));
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
  ids.resize(std::min(opts.hubs, opts.nodes));
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline TemporalNetwork generate_stable_hub(const SyntheticOptions& opts) {
  if (opts.nodes < 2) throw std::invalid_argument("synthetic network needs at least two nodes");
  if (opts.snapshots < 1) throw std::invalid_argument("synthetic network needs at least one snapshot");
  if (opts.hubs > opts.nodes) throw std::invalid_argument("more hubs than nodes");
  const auto hubs = synthetic_hubs(opts);
  std::vector<bool> is_hub(opts.nodes, false);
  for (auto h : hubs) is_hub[h] = true;

  std::vector<Snapshot> snaps;
  for (std::size_t t = 0; t < opts.snapshots; ++t) {
    SplitMix64 rng(stream_seed(opts.seed, t + 1));
    std::vector<Edge> edges;
    for (NodeId i = 0; i < opts.nodes; ++i)
      for (NodeId j = i + 1; j < opts.nodes; ++j) {
        const double prob = (is_hub[i] || is_hub[j]) ? opts.hub_edge_prob : opts.background_edge_prob;
        if (rng.uniform() < prob) edges.push_back({i, j});
      }
    snaps.push_back(Snapshot::from_edges(opts.nodes, std::move(edges)));
  }
  return TemporalNetwork(opts.nodes, std::move(snaps));
}

}  // namespace tempim
