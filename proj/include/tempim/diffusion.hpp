#pragma once

// SI spreading on a temporal network: Monte Carlo estimate of the expected
// final infected count, and an exact distribution-propagation oracle for
// small instances.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/random.hpp"

namespace tempim {

/// Seeds in selection order. Duplicates are rejected.
class SeedSet {
 public:
  SeedSet() = default;
  explicit SeedSet(std::vector<NodeId> nodes) : nodes_(std::move(nodes)) {
    auto sorted = nodes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("seed set contains duplicate nodes");
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  bool contains(NodeId v) const { return std::find(nodes_.begin(), nodes_.end(), v) != nodes_.end(); }

  SeedSet with(NodeId v) const {
    auto next = nodes_;
    next.push_back(v);
    return SeedSet(std::move(next));
  }

  /// Node ids in ascending order.
  std::vector<NodeId> sorted() const {
    auto s = nodes_;
    std::sort(s.begin(), s.end());
    return s;
  }

  void validate(std::size_t n) const {
    if (nodes_.empty()) throw std::invalid_argument("seed set is empty");
    for (auto v : nodes_)
      if (v >= n) throw std::out_of_range("seed node " + std::to_string(v) + " outside the network");
  }

  friend bool operator==(const SeedSet&, const SeedSet&) = default;

 private:
  std::vector<NodeId> nodes_;
};

struct DiffusionConfig {
  double lambda = 0.1;
  std::size_t start_t = 0;  // snapshot on which seeds first transmit
  std::size_t end_t = 0;    // last snapshot on which spreading occurs (inclusive)
  std::size_t mc_runs = 1000;
  std::uint64_t rng_seed = 0;
  std::size_t workers = 1;  // 0 = hardware concurrency
  bool keep_runs = true;
};

struct DiffusionOutcome {
  double mean_spread = 0.0;
  double std_error = 0.0;
  std::vector<std::uint32_t> per_run_final_counts;
};

inline std::size_t resolve_workers(std::size_t requested) {
  if (requested != 0) return requested;
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace detail {

inline void check_window(const TemporalNetwork& net, std::size_t start_t, std::size_t end_t) {
  if (start_t > end_t || end_t >= net.horizon())
    throw std::out_of_range("diffusion window [" + std::to_string(start_t) + ", " + std::to_string(end_t) +
                            "] outside a network of " + std::to_string(net.horizon()) + " snapshots");
}

inline void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
}

}  // namespace detail

/// Monte Carlo SI simulation. Seeds are infected before snapshot start_t;
/// on each snapshot t in [start_t, end_t] every infected-susceptible edge is
/// an independent Bernoulli(lambda) transmission attempt, and nodes infected
/// during t transmit from t+1 on. Run r draws from stream_seed(rng_seed, r),
/// so results do not depend on the worker count.
inline DiffusionOutcome simulate_si(const TemporalNetwork& net, const SeedSet& seeds, const DiffusionConfig& cfg) {
  seeds.validate(net.node_count());
  detail::check_lambda(cfg.lambda);
  detail::check_window(net, cfg.start_t, cfg.end_t);
  if (cfg.mc_runs < 1) throw std::invalid_argument("mc_runs must be at least 1");

  const std::size_t n = net.node_count();
  const std::size_t runs = cfg.mc_runs;
  std::vector<std::uint32_t> counts(runs, static_cast<std::uint32_t>(seeds.size()));

  if (cfg.lambda > 0.0) {
    const auto run_chunk = [&](std::size_t begin, std::size_t end) {
      std::vector<std::uint8_t> infected(n);
      std::vector<NodeId> fresh;
      for (std::size_t r = begin; r < end; ++r) {
        SplitMix64 rng(stream_seed(cfg.rng_seed, r));
        std::fill(infected.begin(), infected.end(), 0);
        for (auto s : seeds.nodes()) infected[s] = 1;
        std::uint32_t count = static_cast<std::uint32_t>(seeds.size());
        for (std::size_t t = cfg.start_t; t <= cfg.end_t; ++t) {
          fresh.clear();
          for (const auto& e : net.snapshot(t).edges()) {
            // infected == 1: infectious; 2: infected during this step.
            const auto a = infected[e.u];
            const auto b = infected[e.v];
            NodeId target;
            if (a == 1 && b == 0)
              target = e.v;
            else if (b == 1 && a == 0)
              target = e.u;
            else
              continue;
            if (rng.uniform() < cfg.lambda) {
              infected[target] = 2;
              fresh.push_back(target);
            }
          }
          for (auto v : fresh) infected[v] = 1;
          count += static_cast<std::uint32_t>(fresh.size());
        }
        counts[r] = count;
      }
    };

    const std::size_t workers = std::min(resolve_workers(cfg.workers), runs);
    if (workers <= 1) {
      run_chunk(0, runs);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (runs + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(runs, b + chunk);
        if (b < e) pool.emplace_back(run_chunk, b, e);
      }
    }
  }

  DiffusionOutcome out;
  double sum = 0.0;
  for (auto c : counts) sum += c;
  out.mean_spread = sum / static_cast<double>(runs);
  if (runs > 1) {
    double ss = 0.0;
    for (auto c : counts) ss += (c - out.mean_spread) * (c - out.mean_spread);
    out.std_error = std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs));
  }
  if (cfg.keep_runs) out.per_run_final_counts = std::move(counts);
  return out;
}

inline constexpr std::size_t kExactMaxNodes = 20;
inline constexpr std::size_t kExactMaxSteps = 6;

/// Exact expected final infected count, propagating the full distribution
/// over infected sets. Same transmission semantics as simulate_si.
/// Requires n <= 20 and end_t - start_t <= 6.
inline double exact_sigma(const TemporalNetwork& net, const SeedSet& seeds, double lambda, std::size_t start_t,
                          std::size_t end_t) {
  seeds.validate(net.node_count());
  detail::check_lambda(lambda);
  detail::check_window(net, start_t, end_t);
  const std::size_t n = net.node_count();
  if (n > kExactMaxNodes || end_t - start_t > kExactMaxSteps)
    throw std::length_error("exact_sigma limited to n <= " + std::to_string(kExactMaxNodes) + " and at most " +
                            std::to_string(kExactMaxSteps + 1) + " snapshots; got n = " + std::to_string(n) +
                            ", " + std::to_string(end_t - start_t + 1) + " snapshots");

  std::uint32_t seed_mask = 0;
  for (auto s : seeds.nodes()) seed_mask |= 1u << s;

  std::unordered_map<std::uint32_t, double> dist{{seed_mask, 1.0}};
  std::vector<std::uint32_t> adj(n);
  std::vector<std::uint32_t> frontier;
  std::vector<double> hit;
  for (std::size_t t = start_t; t <= end_t; ++t) {
    std::fill(adj.begin(), adj.end(), 0u);
    for (const auto& e : net.snapshot(t).edges()) {
      adj[e.u] |= 1u << e.v;
      adj[e.v] |= 1u << e.u;
    }
    std::unordered_map<std::uint32_t, double> next;
    for (const auto& [mask, prob] : dist) {
      frontier.clear();
      hit.clear();
      for (std::uint32_t v = 0; v < n; ++v) {
        if (mask & (1u << v)) continue;
        const int m = std::popcount(adj[v] & mask);
        if (m == 0) continue;
        frontier.push_back(v);
        hit.push_back(1.0 - std::pow(1.0 - lambda, m));
      }
      const std::uint32_t outcomes = 1u << frontier.size();
      for (std::uint32_t o = 0; o < outcomes; ++o) {
        double p = prob;
        std::uint32_t new_mask = mask;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
          if (o & (1u << i)) {
            p *= hit[i];
            new_mask |= 1u << frontier[i];
          } else {
            p *= 1.0 - hit[i];
          }
        }
        if (p > 0.0) next[new_mask] += p;
      }
    }
    dist = std::move(next);
  }
  double sigma = 0.0;
  for (const auto& [mask, prob] : dist) sigma += prob * std::popcount(mask);
  return sigma;
}

}  // namespace tempim
