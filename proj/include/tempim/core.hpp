#pragma once

// Temporal graph data model: snapshots over a fixed node set, event-log
// ingestion and aggregation, density statistics, and the canonical snapshot
// text format.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tempim {

using NodeId = std::uint32_t;

/// Undirected edge stored canonically with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// One static graph G_t. Edges are sorted, unique, and loop-free.
class Snapshot {
 public:
  Snapshot() = default;
  explicit Snapshot(std::size_t n) : n_(n) {}

  /// Builds a snapshot from arbitrary (i, j) pairs: orientation is
  /// canonicalized and duplicates merged. Self-loops and out-of-range ids
  /// are rejected.
  template <typename Pairs>
  static Snapshot from_pairs(std::size_t n, const Pairs& pairs) {
    Snapshot s(n);
    for (const auto& [a, b] : pairs) {
      const auto i = static_cast<NodeId>(a);
      const auto j = static_cast<NodeId>(b);
      if (i >= n || j >= n) throw std::out_of_range("snapshot edge endpoint out of range");
      if (i == j) throw std::invalid_argument("snapshot edges must not be self-loops");
      s.edges_.push_back(i < j ? Edge{i, j} : Edge{j, i});
    }
    s.normalize();
    return s;
  }

  static Snapshot from_pairs(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> pairs) {
    return from_pairs<std::initializer_list<std::pair<NodeId, NodeId>>>(n, pairs);
  }

  /// Takes ownership of an edge list that may be unsorted or duplicated.
  static Snapshot from_edges(std::size_t n, std::vector<Edge> edges) {
    for (auto& e : edges) {
      if (e.u >= n || e.v >= n) throw std::out_of_range("snapshot edge endpoint out of range");
      if (e.u == e.v) throw std::invalid_argument("snapshot edges must not be self-loops");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    Snapshot s(n);
    s.edges_ = std::move(edges);
    s.normalize();
    return s;
  }

  static Snapshot complete(std::size_t n) {
    Snapshot s(n);
    s.edges_.reserve(n * (n - (n > 0 ? 1 : 0)) / 2);
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j) s.edges_.push_back({i, j});
    return s;
  }

  std::size_t node_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  bool has_edge(NodeId i, NodeId j) const {
    if (i == j) return false;
    const Edge e = i < j ? Edge{i, j} : Edge{j, i};
    return std::binary_search(edges_.begin(), edges_.end(), e);
  }

  /// Sorted neighbor lists.
  std::vector<std::vector<NodeId>> adjacency() const {
    std::vector<std::vector<NodeId>> adj(n_);
    for (const auto& e : edges_) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> d(n_, 0);
    for (const auto& e : edges_) {
      ++d[e.u];
      ++d[e.v];
    }
    return d;
  }

  /// Number of nodes with at least one incident edge.
  std::size_t active_node_count() const {
    std::size_t count = 0;
    for (auto d : degrees()) count += d > 0 ? 1 : 0;
    return count;
  }

  friend bool operator==(const Snapshot&, const Snapshot&) = default;

 private:
  void normalize() {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

/// Number of unordered node pairs, C(n, 2).
inline double pair_count(std::size_t n) {
  return 0.5 * static_cast<double>(n) * static_cast<double>(n > 0 ? n - 1 : 0);
}

/// Ordered sequence of snapshots G_0..G_{T-1} over a fixed node set.
class TemporalNetwork {
 public:
  TemporalNetwork() = default;

  TemporalNetwork(std::size_t n, std::vector<Snapshot> snapshots)
      : n_(n), snapshots_(std::move(snapshots)) {
    for (const auto& s : snapshots_)
      if (s.node_count() != n_)
        throw std::invalid_argument("all snapshots must share the network node count");
  }

  std::size_t node_count() const { return n_; }
  std::size_t horizon() const { return snapshots_.size(); }
  const Snapshot& snapshot(std::size_t t) const { return snapshots_.at(t); }
  std::span<const Snapshot> snapshots() const { return snapshots_; }

  /// Snapshots [begin, end) as a new network.
  TemporalNetwork slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > horizon()) throw std::out_of_range("invalid snapshot slice");
    return TemporalNetwork(n_, {snapshots_.begin() + static_cast<std::ptrdiff_t>(begin),
                                snapshots_.begin() + static_cast<std::ptrdiff_t>(end)});
  }

  /// Number of nodes with an edge in any snapshot.
  std::size_t active_node_count() const {
    std::vector<bool> seen(n_, false);
    for (const auto& s : snapshots_)
      for (const auto& e : s.edges()) seen[e.u] = seen[e.v] = true;
    return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
  }

  friend bool operator==(const TemporalNetwork&, const TemporalNetwork&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Snapshot> snapshots_;
};

// ---------------------------------------------------------------------------
// Event logs and aggregation
// ---------------------------------------------------------------------------

struct Event {
  double timestamp = 0.0;
  std::string u;
  std::string v;
};

struct RawEventLog {
  std::vector<Event> events;
};

enum class BinScheme { equal_time, equal_count };

/// Column order of an event file.
enum class EventColumns { time_u_v, u_v_time };

namespace detail {

inline bool parse_integer(std::string_view s, long long& out) {
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline double parse_double(std::string_view s) {
  double value = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw std::runtime_error("malformed timestamp '" + std::string(s) + "'");
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  const auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

}  // namespace detail

inline RawEventLog read_events(std::istream& in, EventColumns columns = EventColumns::time_u_v) {
  RawEventLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto fields = detail::split_fields(view);
    if (fields.empty()) continue;
    if (fields.size() < 3)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 'timestamp u v'");
    try {
      if (columns == EventColumns::time_u_v)
        log.events.push_back({detail::parse_double(fields[0]), std::string(fields[1]), std::string(fields[2])});
      else
        log.events.push_back({detail::parse_double(fields[2]), std::string(fields[0]), std::string(fields[1])});
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

inline RawEventLog read_events_file(const std::string& path, EventColumns columns = EventColumns::time_u_v) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open event file '" + path + "'");
  return read_events(in, columns);
}

/// Distinct endpoint labels in index order: numeric order when every label
/// is an integer, lexicographic otherwise.
inline std::vector<std::string> node_labels(const RawEventLog& log) {
  std::vector<std::string> labels;
  labels.reserve(log.events.size() * 2);
  for (const auto& e : log.events) {
    labels.push_back(e.u);
    labels.push_back(e.v);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  std::vector<std::pair<long long, std::string>> numeric;
  numeric.reserve(labels.size());
  for (const auto& l : labels) {
    long long v = 0;
    if (!detail::parse_integer(l, v)) return labels;
    numeric.emplace_back(v, l);
  }
  std::sort(numeric.begin(), numeric.end());
  for (std::size_t i = 0; i < numeric.size(); ++i) labels[i] = numeric[i].second;
  return labels;
}

/// Bin index for every event (same order as log.events).
inline std::vector<std::size_t> assign_bins(const RawEventLog& log, std::size_t n_bins, BinScheme scheme) {
  if (log.events.empty()) throw std::invalid_argument("cannot aggregate an empty event log");
  if (n_bins < 1) throw std::invalid_argument("n_bins must be positive");

  std::vector<std::size_t> bins(log.events.size(), 0);
  if (scheme == BinScheme::equal_time) {
    auto [lo_it, hi_it] = std::minmax_element(log.events.begin(), log.events.end(),
                                              [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    const double lo = lo_it->timestamp;
    const double hi = hi_it->timestamp;
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t e = 0; e < log.events.size(); ++e) {
      if (width <= 0.0) continue;
      const double pos = (log.events[e].timestamp - lo) / width;
      auto b = static_cast<std::size_t>(std::floor(pos));
      bins[e] = std::min(b, n_bins - 1);  // final bin is closed
    }
    return bins;
  }

  // Equal-count: distinct timestamps split into contiguous groups whose sizes
  // differ by at most one (earlier groups take the remainder).
  std::vector<double> distinct;
  distinct.reserve(log.events.size());
  for (const auto& e : log.events) distinct.push_back(e.timestamp);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (n_bins > distinct.size())
    throw std::invalid_argument("equal-count binning needs at least n_bins distinct timestamps");
  const std::size_t base = distinct.size() / n_bins;
  const std::size_t extra = distinct.size() % n_bins;
  std::vector<std::size_t> group_of(distinct.size());
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) group_of[pos++] = b;
  }
  for (std::size_t e = 0; e < log.events.size(); ++e) {
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), log.events[e].timestamp);
    bins[e] = group_of[static_cast<std::size_t>(it - distinct.begin())];
  }
  return bins;
}

/// Aggregates timestamped contacts into n_bins snapshots. Directed events
/// are symmetrized and self-contacts dropped; nodes are indexed by
/// node_labels().
inline TemporalNetwork aggregate(const RawEventLog& log, std::size_t n_bins, BinScheme scheme) {
  if (n_bins < 1) throw std::invalid_argument("n_bins must be positive");
  const auto bins = assign_bins(log, n_bins, scheme);
  const auto labels = node_labels(log);
  std::map<std::string_view, NodeId> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], static_cast<NodeId>(i));

  std::vector<std::vector<Edge>> per_bin(n_bins);
  for (std::size_t e = 0; e < log.events.size(); ++e) {
    const NodeId a = index.at(log.events[e].u);
    const NodeId b = index.at(log.events[e].v);
    if (a == b) continue;
    per_bin[bins[e]].push_back(a < b ? Edge{a, b} : Edge{b, a});
  }
  std::vector<Snapshot> snaps;
  snaps.reserve(n_bins);
  for (auto& edges : per_bin) snaps.push_back(Snapshot::from_edges(labels.size(), std::move(edges)));
  return TemporalNetwork(labels.size(), std::move(snaps));
}

// ---------------------------------------------------------------------------
// Density statistics and aggregate graphs
// ---------------------------------------------------------------------------

struct DensityProfile {
  std::vector<double> per_snapshot;  // rho_t for t < upto
  double weighted = 0.0;             // recency-weighted mean rho*
  double decay = 1.0;                // xi
};

/// Edge density of the first `upto` snapshots and their recency-weighted
/// mean, weight xi^(upto-1-t) (0^0 = 1).
inline DensityProfile density_profile(const TemporalNetwork& net, std::size_t upto, double xi) {
  if (net.node_count() < 2) throw std::invalid_argument("density needs at least two nodes");
  if (upto < 1 || upto > net.horizon()) throw std::out_of_range("density_profile: upto outside [1, T]");
  if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("density_profile: xi must lie in [0, 1]");

  DensityProfile profile;
  profile.decay = xi;
  const double pairs = pair_count(net.node_count());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < upto; ++t) {
    const double rho = static_cast<double>(net.snapshot(t).edge_count()) / pairs;
    profile.per_snapshot.push_back(rho);
    const auto age = static_cast<double>(upto - 1 - t);
    const double w = age == 0.0 ? 1.0 : std::pow(xi, age);
    num += w * rho;
    den += w;
  }
  profile.weighted = num / den;
  return profile;
}

/// Union of the edge sets of snapshots [0, upto).
inline Snapshot memory_graph(const TemporalNetwork& net, std::size_t upto) {
  if (upto > net.horizon()) throw std::out_of_range("memory_graph: upto exceeds horizon");
  std::vector<Edge> all;
  for (std::size_t t = 0; t < upto; ++t) {
    const auto& e = net.snapshot(t).edges();
    all.insert(all.end(), e.begin(), e.end());
  }
  return Snapshot::from_edges(net.node_count(), std::move(all));
}

inline std::size_t unique_links(const TemporalNetwork& net) {
  return memory_graph(net, net.horizon()).edge_count();
}

// ---------------------------------------------------------------------------
// Canonical snapshot format: "n T" header, then "t i j" per edge, sorted.
// ---------------------------------------------------------------------------

inline void write_snapshots(std::ostream& out, const TemporalNetwork& net) {
  out << net.node_count() << ' ' << net.horizon() << '\n';
  for (std::size_t t = 0; t < net.horizon(); ++t)
    for (const auto& e : net.snapshot(t).edges()) out << t << ' ' << e.u << ' ' << e.v << '\n';
}

inline std::string to_snapshot_text(const TemporalNetwork& net) {
  std::ostringstream out;
  write_snapshots(out, net);
  return out.str();
}

inline TemporalNetwork read_snapshots(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::size_t n = 0;
  std::size_t horizon = 0;
  std::vector<std::vector<Edge>> per_t;
  const auto as_count = [&](std::string_view f) {
    long long v = 0;
    if (!detail::parse_integer(f, v) || v < 0)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected a non-negative integer");
    return static_cast<std::size_t>(v);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto fields = detail::split_fields(view);
    if (fields.empty()) continue;
    if (!have_header) {
      if (fields.size() != 2) throw std::runtime_error("snapshot file header must be 'n T'");
      n = as_count(fields[0]);
      horizon = as_count(fields[1]);
      per_t.resize(horizon);
      have_header = true;
      continue;
    }
    if (fields.size() != 3) throw std::runtime_error("line " + std::to_string(lineno) + ": expected 't i j'");
    const auto t = as_count(fields[0]);
    const auto i = as_count(fields[1]);
    const auto j = as_count(fields[2]);
    if (t >= horizon || i >= n || j >= n || i == j)
      throw std::runtime_error("line " + std::to_string(lineno) + ": edge out of range");
    per_t[t].push_back(i < j ? Edge{static_cast<NodeId>(i), static_cast<NodeId>(j)}
                             : Edge{static_cast<NodeId>(j), static_cast<NodeId>(i)});
  }
  if (!have_header) throw std::runtime_error("snapshot file is empty");
  std::vector<Snapshot> snaps;
  snaps.reserve(horizon);
  for (auto& edges : per_t) snaps.push_back(Snapshot::from_edges(n, std::move(edges)));
  return TemporalNetwork(n, std::move(snaps));
}

inline TemporalNetwork read_snapshots_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot file '" + path + "'");
  return read_snapshots(in);
}

}  // namespace tempim
