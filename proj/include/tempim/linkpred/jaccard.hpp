#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/random.hpp"

namespace tempim {

struct ScoredPair {
  Edge edge;
  double score = 0.0;
};

/// Jaccard coefficient |N_u n N_v| / |N_u u N_v| for every non-adjacent
/// pair with a common neighbor, ordered by (score desc, (i, j) asc).
inline std::vector<ScoredPair> jaccard_scores(const Snapshot& g) {
  const auto adj = g.adjacency();
  const std::size_t n = g.node_count();
  std::vector<ScoredPair> out;
  std::vector<std::uint32_t> common(n, 0);
  std::vector<NodeId> touched;
  for (NodeId u = 0; u < n; ++u) {
    touched.clear();
    for (NodeId w : adj[u])
      for (NodeId v : adj[w]) {
        if (v <= u) continue;
        if (common[v]++ == 0) touched.push_back(v);
      }
    std::sort(touched.begin(), touched.end());
    for (NodeId v : touched) {
      const std::uint32_t inter = common[v];
      common[v] = 0;
      if (std::binary_search(adj[u].begin(), adj[u].end(), v)) continue;
      const auto uni = adj[u].size() + adj[v].size() - inter;
      out.push_back({{u, v}, static_cast<double>(inter) / static_cast<double>(uni)});
    }
  }
  std::sort(out.begin(), out.end(), [](const ScoredPair& a, const ScoredPair& b) {
    return a.score != b.score ? a.score > b.score : a.edge < b.edge;
  });
  return out;
}

/// One step of Jaccard evolution: add the top round(add_frac * #scored)
/// non-adjacent pairs and drop round(remove_frac * |E|) of the current edges
/// uniformly at random.
inline Snapshot jaccard_evolve(const Snapshot& g, double add_frac, double remove_frac, std::uint64_t rng_seed) {
  if (!(add_frac >= 0.0 && add_frac <= 1.0 && remove_frac >= 0.0 && remove_frac <= 1.0))
    throw std::invalid_argument("jaccard_evolve: fractions must lie in [0, 1]");
  const auto scored = jaccard_scores(g);
  const auto additions = static_cast<std::size_t>(std::llround(add_frac * static_cast<double>(scored.size())));
  auto kept = g.edges();
  const auto removals = static_cast<std::size_t>(std::llround(remove_frac * static_cast<double>(kept.size())));

  // Partial Fisher-Yates: the last `removals` slots hold the dropped edges.
  SplitMix64 rng(rng_seed);
  for (std::size_t r = 0; r < removals; ++r) {
    const std::size_t last = kept.size() - 1 - r;
    const auto pick = static_cast<std::size_t>(rng.below(last + 1));
    std::swap(kept[pick], kept[last]);
  }
  kept.resize(kept.size() - removals);
  for (std::size_t a = 0; a < additions; ++a) kept.push_back(scored[a].edge);
  return Snapshot::from_edges(g.node_count(), std::move(kept));
}

/// Iterated evolution from `last`, step s drawing from stream_seed(seed, s).
inline std::vector<Snapshot> jaccard_rollout(const Snapshot& last, std::size_t steps, double add_frac,
                                             double remove_frac, std::uint64_t rng_seed) {
  std::vector<Snapshot> out;
  Snapshot current = last;
  for (std::size_t s = 0; s < steps; ++s) {
    current = jaccard_evolve(current, add_frac, remove_frac, stream_seed(rng_seed, s));
    out.push_back(current);
  }
  return out;
}

}  // namespace tempim
