#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <utility>
#include <vector>

#include "tempim/core.hpp"

namespace tempim {

/// Summary statistics of a temporal network.
struct DatasetStats {
  std::size_t nodes = 0;          // n
  std::size_t unique_links = 0;   // m
  double mean_density = 0.0;      // mean over snapshots of |E_t| / C(n,2)
  std::size_t snapshots = 0;      // T
  double frac_nodes_half = 0.0;   // fNT: active nodes seen in the first half
  double frac_links_half = 0.0;   // fLT: unique links seen in the first half
  double frac_nodes_ends = 0.0;   // FNT: active nodes seen in both the first and last 5%
  double frac_links_ends = 0.0;   // FLT: unique links seen in both the first and last 5%
  double degree_assortativity = 0.0;  // DA of the time-aggregated graph
};

/// Newman degree assortativity; 0 for graphs where it is undefined.
inline double degree_assortativity(const Snapshot& g) {
  if (g.empty()) return 0.0;
  const auto deg = g.degrees();
  double sum_prod = 0.0, sum_half = 0.0, sum_sq = 0.0;
  for (const auto& e : g.edges()) {
    const auto j = static_cast<double>(deg[e.u]);
    const auto k = static_cast<double>(deg[e.v]);
    sum_prod += j * k;
    sum_half += 0.5 * (j + k);
    sum_sq += 0.5 * (j * j + k * k);
  }
  const double m = static_cast<double>(g.edge_count());
  const double mean = sum_half / m;
  const double den = sum_sq / m - mean * mean;
  if (den <= 0.0) return 0.0;
  return (sum_prod / m - mean * mean) / den;
}

namespace detail {

// Fractions of active nodes / unique links that occur in `first` (and, if
// given, also in `last`), where occurrence sets are memory graphs.
inline std::pair<double, double> presence_fractions(const Snapshot& all, const Snapshot& first,
                                                    const Snapshot* last) {
  const std::size_t nodes_all = all.active_node_count();
  const auto link_in = [](const Snapshot& g, const Edge& e) { return g.has_edge(e.u, e.v); };
  std::size_t links = 0;
  for (const auto& e : all.edges())
    if (link_in(first, e) && (last == nullptr || link_in(*last, e))) ++links;
  const auto dfirst = first.degrees();
  std::vector<std::size_t> dlast = last ? last->degrees() : std::vector<std::size_t>{};
  std::size_t nodes = 0;
  for (std::size_t v = 0; v < dfirst.size(); ++v)
    if (dfirst[v] > 0 && (last == nullptr || dlast[v] > 0)) ++nodes;
  const double fn = nodes_all ? static_cast<double>(nodes) / static_cast<double>(nodes_all) : 0.0;
  const double fl = all.edge_count() ? static_cast<double>(links) / static_cast<double>(all.edge_count()) : 0.0;
  return {fn, fl};
}

}  // namespace detail

/// Snapshot-level statistics. The temporal presence measures use the first
/// ceil(T/2) snapshots for "half" and ceil(0.05 T) snapshots at each end.
inline DatasetStats dataset_stats(const TemporalNetwork& net) {
  DatasetStats s;
  s.nodes = net.node_count();
  s.snapshots = net.horizon();
  const Snapshot all = memory_graph(net, net.horizon());
  s.unique_links = all.edge_count();
  if (net.horizon() == 0) return s;
  const double pairs = pair_count(net.node_count());
  double total = 0.0;
  for (const auto& g : net.snapshots()) total += pairs > 0 ? static_cast<double>(g.edge_count()) / pairs : 0.0;
  s.mean_density = total / static_cast<double>(net.horizon());

  const std::size_t half = (net.horizon() + 1) / 2;
  const auto ends = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(net.horizon())));
  const Snapshot first_half = memory_graph(net, half);
  const Snapshot head = memory_graph(net, ends);
  const Snapshot tail = memory_graph(net.slice(net.horizon() - ends, net.horizon()), ends);
  std::tie(s.frac_nodes_half, s.frac_links_half) = detail::presence_fractions(all, first_half, nullptr);
  std::tie(s.frac_nodes_ends, s.frac_links_ends) = detail::presence_fractions(all, head, &tail);
  s.degree_assortativity = degree_assortativity(all);
  return s;
}

}  // namespace tempim
