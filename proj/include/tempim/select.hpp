#pragma once

// Seed selection: greedy marginal gain, dynamic degree discount, static
// degree discount, and the score-sum ranking over link-prediction output.
// Every selector breaks ties toward the lowest node id.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/diffusion.hpp"
#include "tempim/scores.hpp"

namespace tempim {

namespace detail {

inline void check_k(std::size_t k, std::size_t n) {
  if (k > n)
    throw std::invalid_argument("cannot select k = " + std::to_string(k) + " seeds from " + std::to_string(n) +
                                " nodes");
}

/// Indices of the k largest values, ordered by (value desc, index asc).
/// NaN ranks below every number.
inline std::vector<NodeId> top_k(std::span<const double> values, std::size_t k) {
  std::vector<NodeId> order(values.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  const auto key = [&](NodeId i) {
    const double v = values[i];
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](NodeId a, NodeId b) {
                      const double ka = key(a);
                      const double kb = key(b);
                      return ka != kb ? ka > kb : a < b;
                    });
  order.resize(k);
  return order;
}

}  // namespace detail

/// sigma(S) callable over seed sets.
using InfluenceEstimator = std::function<double(const SeedSet&)>;

/// Monte Carlo sigma on `net`. Every call reuses cfg.rng_seed, so candidate
/// comparisons within a greedy step share random numbers. `net` must
/// outlive the estimator.
inline InfluenceEstimator mc_estimator(const TemporalNetwork& net, DiffusionConfig cfg) {
  cfg.keep_runs = false;
  return [&net, cfg](const SeedSet& s) { return simulate_si(net, s, cfg).mean_spread; };
}

/// Exact sigma on `net`; `net` must outlive the estimator.
inline InfluenceEstimator exact_estimator(const TemporalNetwork& net, double lambda, std::size_t start_t,
                                          std::size_t end_t) {
  return [&net, lambda, start_t, end_t](const SeedSet& s) { return exact_sigma(net, s, lambda, start_t, end_t); };
}

/// Greedy marginal-gain selection over nodes [0, n).
inline SeedSet greedy_select(std::size_t n, std::size_t k, const InfluenceEstimator& sigma) {
  detail::check_k(k, n);
  SeedSet chosen;
  for (std::size_t step = 0; step < k; ++step) {
    NodeId best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (NodeId u = 0; u < n; ++u) {
      if (chosen.contains(u)) continue;
      // sigma(S) is common to every candidate, so the gain argmax is the
      // argmax of sigma(S + u).
      const double value = sigma(chosen.with(u));
      if (!found || value > best_value) {
        best = u;
        best_value = value;
        found = true;
      }
    }
    chosen = chosen.with(best);
  }
  return chosen;
}

inline SeedSet greedy_select(const TemporalNetwork& net, std::size_t k, const InfluenceEstimator& sigma) {
  return greedy_select(net.node_count(), k, sigma);
}

/// Turnover-weighted degree summed over consecutive snapshot pairs in
/// [t_a, t_b]: sum |N(t-1) \ N(t)| / |N(t-1) u N(t)| * |N(t)|, with a zero
/// term when both neighborhoods are empty.
inline std::vector<double> dynamic_degree(const TemporalNetwork& net, std::size_t t_a, std::size_t t_b) {
  if (t_a >= t_b || t_b >= net.horizon()) throw std::out_of_range("dynamic_degree: need t_a < t_b < T");
  const std::size_t n = net.node_count();
  std::vector<double> degree(n, 0.0);
  auto prev = net.snapshot(t_a).adjacency();
  for (std::size_t t = t_a + 1; t <= t_b; ++t) {
    auto cur = net.snapshot(t).adjacency();
    for (std::size_t v = 0; v < n; ++v) {
      const auto& a = prev[v];
      const auto& b = cur[v];
      std::size_t common = 0;
      for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
        if (a[i] < b[j]) {
          ++i;
        } else if (b[j] < a[i]) {
          ++j;
        } else {
          ++common;
          ++i;
          ++j;
        }
      }
      const std::size_t uni = a.size() + b.size() - common;
      if (uni == 0) continue;
      const double removed = static_cast<double>(a.size() - common);
      degree[v] += removed / static_cast<double>(uni) * static_cast<double>(b.size());
    }
    prev = std::move(cur);
  }
  return degree;
}

/// Working state of the dynamic degree discount heuristic.
struct DynamicDegreeTable {
  std::vector<double> dynamic_degree;               // D_T(v)
  std::vector<std::vector<NodeId>> neighbor_union;  // N_v over the window
  std::vector<std::size_t> selected_neighbors;      // t_u
  std::vector<double> discounted;                   // dd_u

  DynamicDegreeTable() = default;

  DynamicDegreeTable(std::vector<double> degree, std::vector<std::vector<NodeId>> neighbors)
      : dynamic_degree(std::move(degree)),
        neighbor_union(std::move(neighbors)),
        selected_neighbors(dynamic_degree.size(), 0),
        discounted(dynamic_degree) {
    if (neighbor_union.size() != dynamic_degree.size())
      throw std::invalid_argument("dynamic degree table: size mismatch");
  }

  static DynamicDegreeTable build(const TemporalNetwork& net, std::size_t t_a, std::size_t t_b) {
    TemporalNetwork window = net.slice(t_a, t_b + 1);
    auto neighbors = memory_graph(window, window.horizon()).adjacency();
    return DynamicDegreeTable(tempim::dynamic_degree(net, t_a, t_b), std::move(neighbors));
  }

  std::size_t node_count() const { return dynamic_degree.size(); }
};

/// Runs the discount loop on `table` (which is updated in place).
/// dd_u is not clamped and may go negative.
inline SeedSet dyn_deg_discount(DynamicDegreeTable& table, std::size_t k, double lambda) {
  const std::size_t n = table.node_count();
  detail::check_k(k, n);
  std::vector<bool> taken(n, false);
  std::vector<NodeId> seeds;
  for (std::size_t step = 0; step < k; ++step) {
    NodeId best = 0;
    bool found = false;
    for (NodeId u = 0; u < n; ++u) {
      if (taken[u]) continue;
      if (!found || table.discounted[u] > table.discounted[best]) {
        best = u;
        found = true;
      }
    }
    taken[best] = true;
    seeds.push_back(best);
    for (NodeId u : table.neighbor_union[best]) {
      auto& t_u = table.selected_neighbors[u];
      ++t_u;
      const double d = table.dynamic_degree[u];
      const double t = static_cast<double>(t_u);
      table.discounted[u] = d - 2.0 * t - (d - t) * t * lambda;
    }
  }
  return SeedSet(std::move(seeds));
}

/// Dynamic degree discount over snapshots [t_a, t_b].
inline SeedSet dyn_deg_discount(const TemporalNetwork& net, std::size_t t_a, std::size_t t_b, std::size_t k,
                                double lambda) {
  auto table = DynamicDegreeTable::build(net, t_a, t_b);
  return dyn_deg_discount(table, k, lambda);
}

/// Degree ranking where each pick lowers its neighbors' degree by one.
inline SeedSet static_degree_discount(const Snapshot& g, std::size_t k) {
  const std::size_t n = g.node_count();
  detail::check_k(k, n);
  const auto adj = g.adjacency();
  std::vector<long long> d(n);
  for (std::size_t v = 0; v < n; ++v) d[v] = static_cast<long long>(adj[v].size());
  std::vector<bool> taken(n, false);
  std::vector<NodeId> seeds;
  for (std::size_t step = 0; step < k; ++step) {
    NodeId best = 0;
    bool found = false;
    for (NodeId u = 0; u < n; ++u) {
      if (taken[u]) continue;
      if (!found || d[u] > d[best]) {
        best = u;
        found = true;
      }
    }
    taken[best] = true;
    seeds.push_back(best);
    for (NodeId u : adj[best]) --d[u];
  }
  return SeedSet(std::move(seeds));
}

/// Top-k nodes by row sum of the score matrix. Works for any ScoreMatrix,
/// which is the hook for additional link predictors.
inline SeedSet score_sum_select(const ScoreMatrix& scores, std::size_t k) {
  detail::check_k(k, scores.node_count());
  const Eigen::VectorXd theta = scores.row_sums();
  return SeedSet(detail::top_k(std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())), k));
}

/// Completes `partial` to k seeds by descending degree in `reference`
/// (normally the memory graph of the observed window).
inline SeedSet fill_by_degree(const SeedSet& partial, const Snapshot& reference, std::size_t k) {
  const std::size_t n = reference.node_count();
  detail::check_k(k, n);
  if (partial.size() >= k) return partial;
  const auto deg = reference.degrees();
  std::vector<double> key(n);
  for (std::size_t v = 0; v < n; ++v)
    key[v] = partial.contains(static_cast<NodeId>(v)) ? -std::numeric_limits<double>::infinity()
                                                      : static_cast<double>(deg[v]);
  auto order = detail::top_k(key, n);
  auto nodes = partial.nodes();
  for (NodeId v : order) {
    if (nodes.size() == k) break;
    if (!partial.contains(v)) nodes.push_back(v);
  }
  return SeedSet(std::move(nodes));
}

}  // namespace tempim
