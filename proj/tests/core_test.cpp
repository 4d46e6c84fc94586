#include "tempim/core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "test_util.hpp"

namespace tempim {
namespace {

RawEventLog parse(const std::string& text, EventColumns columns = EventColumns::time_u_v) {
  std::istringstream in(text);
  return read_events(in, columns);
}

TEST(SnapshotTest, CanonicalizesAndDeduplicates) {
  const auto g = Snapshot::from_pairs(4, {{2, 1}, {1, 2}, {0, 3}});
  ASSERT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.edges()[0], (Edge{0, 3}));
  EXPECT_EQ(g.edges()[1], (Edge{1, 2}));
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_FALSE(g.has_edge(0, 1));
}

TEST(SnapshotTest, RejectsSelfLoopsAndOutOfRange) {
  EXPECT_THROW(Snapshot::from_pairs(3, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(Snapshot::from_pairs(3, {{0, 3}}), std::out_of_range);
  EXPECT_THROW(TemporalNetwork(3, {Snapshot(4)}), std::invalid_argument);
}

TEST(EventParseTest, CommentsSeparatorsAndColumnOrder) {
  const auto log = parse("# header\n0, a, b\n\n5\tb c  # trailing\n");
  ASSERT_EQ(log.events.size(), 2u);
  EXPECT_DOUBLE_EQ(log.events[1].timestamp, 5.0);
  EXPECT_EQ(log.events[1].v, "c");

  const auto uvt = parse("x y 3.5 extra\n", EventColumns::u_v_time);
  ASSERT_EQ(uvt.events.size(), 1u);
  EXPECT_DOUBLE_EQ(uvt.events[0].timestamp, 3.5);
  EXPECT_EQ(uvt.events[0].u, "x");

  EXPECT_THROW(parse("0 a\n"), std::runtime_error);
  EXPECT_THROW(parse("zero a b\n"), std::runtime_error);
}

TEST(EventParseTest, NumericLabelsSortNumerically) {
  const auto labels = node_labels(parse("0 10 2\n1 2 9\n"));
  EXPECT_EQ(labels, (std::vector<std::string>{"2", "9", "10"}));
  const auto mixed = node_labels(parse("0 b 10\n1 a 2\n"));
  EXPECT_EQ(mixed, (std::vector<std::string>{"10", "2", "a", "b"}));
}

TEST(AggregateTest, EqualTimeHalfOpenBinsWithClosedFinalBin) {
  // Bins [0, 5) and [5, 10]: the t = 5 contact opens the second bin.
  const auto net = aggregate(parse("0 a b\n5 a b\n10 b c\n"), 2, BinScheme::equal_time);
  ASSERT_EQ(net.horizon(), 2u);
  ASSERT_EQ(net.node_count(), 3u);
  EXPECT_EQ(net.snapshot(0), Snapshot::from_pairs(3, {{0, 1}}));
  EXPECT_EQ(net.snapshot(1), Snapshot::from_pairs(3, {{0, 1}, {1, 2}}));
}

TEST(AggregateTest, SingleEventLeavesLaterBinsEmpty) {
  const auto net = aggregate(parse("0 a b\n"), 2, BinScheme::equal_time);
  EXPECT_EQ(net.snapshot(0), Snapshot::from_pairs(2, {{0, 1}}));
  EXPECT_TRUE(net.snapshot(1).empty());
}

TEST(AggregateTest, SymmetrizesAndDropsSelfContacts) {
  const auto net = aggregate(parse("0 a b\n1 b a\n2 c c\n"), 1, BinScheme::equal_time);
  EXPECT_EQ(net.node_count(), 3u);
  EXPECT_EQ(net.snapshot(0).edge_count(), 1u);
}

TEST(AggregateTest, EqualCountSplitsDistinctTimestamps) {
  const auto log = parse("0 a b\n0 a c\n1 b c\n2 a b\n3 c d\n");
  const auto net = aggregate(log, 2, BinScheme::equal_count);
  // Distinct times {0,1,2,3} -> {0,1}, {2,3}.
  EXPECT_EQ(net.snapshot(0).edge_count(), 3u);
  EXPECT_EQ(net.snapshot(1).edge_count(), 2u);
  EXPECT_THROW(aggregate(log, 5, BinScheme::equal_count), std::invalid_argument);
}

TEST(AggregateTest, RejectsEmptyLog) {
  EXPECT_THROW(aggregate(RawEventLog{}, 2, BinScheme::equal_time), std::invalid_argument);
}

TEST(AggregateTest, EveryEventLandsInExactlyOneBin) {
  SplitMix64 rng(11);
  RawEventLog log;
  for (int e = 0; e < 400; ++e)
    log.events.push_back({rng.uniform() * 100.0, std::to_string(rng.below(12)), std::to_string(rng.below(12))});
  for (auto scheme : {BinScheme::equal_time, BinScheme::equal_count}) {
    const auto bins = assign_bins(log, 7, scheme);
    for (auto b : bins) EXPECT_LT(b, 7u);
    // Bins are ordered in time.
    for (std::size_t a = 0; a < log.events.size(); ++a)
      for (std::size_t b = 0; b < log.events.size(); ++b) {
        if (log.events[a].timestamp < log.events[b].timestamp) ASSERT_LE(bins[a], bins[b]);
      }
    const auto net = aggregate(log, 7, scheme);
    std::size_t incidences = 0;
    for (const auto& g : net.snapshots()) incidences += g.edge_count();
    EXPECT_GE(incidences, unique_links(net));
  }
}

TEST(DensityTest, WeightedMean) {
  // n = 5 has 10 pairs: one edge then two edges gives rho = (0.1, 0.2).
  const TemporalNetwork net(5, {Snapshot::from_pairs(5, {{0, 1}}), Snapshot::from_pairs(5, {{0, 1}, {2, 3}})});
  const auto half = density_profile(net, 2, 0.5);
  EXPECT_DOUBLE_EQ(half.per_snapshot[0], 0.1);
  EXPECT_DOUBLE_EQ(half.per_snapshot[1], 0.2);
  EXPECT_NEAR(half.weighted, 0.25 / 1.5, 1e-15);
  EXPECT_NEAR(density_profile(net, 2, 1.0).weighted, 0.15, 1e-15);
  EXPECT_DOUBLE_EQ(density_profile(net, 2, 0.0).weighted, 0.2);
  EXPECT_DOUBLE_EQ(density_profile(net, 1, 0.3).weighted, 0.1);
}

TEST(DensityTest, RejectsBadArguments) {
  const TemporalNetwork tiny(1, {Snapshot(1)});
  EXPECT_THROW(density_profile(tiny, 1, 0.5), std::invalid_argument);
  const auto net = testing::random_network(4, 3, 0.5, 1);
  EXPECT_THROW(density_profile(net, 0, 0.5), std::out_of_range);
  EXPECT_THROW(density_profile(net, 4, 0.5), std::out_of_range);
  EXPECT_THROW(density_profile(net, 2, 1.5), std::invalid_argument);
}

TEST(DensityTest, WeightedDensityBracketedAndContinuous) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SplitMix64 rng(seed);
    const auto net = testing::random_network(3 + rng.below(8), 1 + rng.below(8), rng.uniform(), seed + 1000);
    const std::size_t upto = 1 + rng.below(net.horizon());
    const double xi = rng.uniform();
    const auto prof = density_profile(net, upto, xi);
    const auto [lo, hi] = std::minmax_element(prof.per_snapshot.begin(), prof.per_snapshot.end());
    EXPECT_GE(prof.weighted, *lo - 1e-15);
    EXPECT_LE(prof.weighted, *hi + 1e-15);
    if (xi > 0.0) {
      const double nearby = density_profile(net, upto, std::min(1.0, xi + 1e-9)).weighted;
      EXPECT_NEAR(prof.weighted, nearby, 1e-6);
    }
  }
}

TEST(MemoryGraphTest, UnionOfEdgeSets) {
  const TemporalNetwork net(3, {Snapshot::from_pairs(3, {{0, 1}}), Snapshot::from_pairs(3, {{1, 2}})});
  EXPECT_EQ(memory_graph(net, 2), Snapshot::from_pairs(3, {{0, 1}, {1, 2}}));
  EXPECT_EQ(memory_graph(net, 1), net.snapshot(0));

  const auto same = testing::repeat(Snapshot::from_pairs(4, {{0, 3}, {1, 2}}), 5);
  EXPECT_EQ(memory_graph(same, 5), same.snapshot(0));

  const TemporalNetwork empty(3, {Snapshot(3), Snapshot(3)});
  EXPECT_TRUE(memory_graph(empty, 2).empty());
  EXPECT_EQ(unique_links(empty), 0u);
}

TEST(MemoryGraphTest, MonotoneInWindow) {
  const auto net = testing::random_network(9, 10, 0.15, 3);
  for (std::size_t p = 1; p < net.horizon(); ++p) {
    const auto small = memory_graph(net, p);
    const auto large = memory_graph(net, p + 1);
    for (const auto& e : small.edges()) EXPECT_TRUE(large.has_edge(e.u, e.v));
  }
}

TEST(UniqueLinksTest, DisjointSingletons) {
  std::vector<Snapshot> snaps;
  for (NodeId t = 0; t < 5; ++t) snaps.push_back(Snapshot::from_pairs(10, {{2 * t, 2 * t + 1}}));
  EXPECT_EQ(unique_links(TemporalNetwork(10, snaps)), 5u);
}

TEST(SnapshotFormatTest, RoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto net = testing::random_network(2 + seed % 9, 1 + seed % 5, 0.3, seed);
    const auto text = to_snapshot_text(net);
    std::istringstream in(text);
    const auto back = read_snapshots(in);
    EXPECT_EQ(back, net);
    EXPECT_EQ(to_snapshot_text(back), text);
  }
}

TEST(SnapshotFormatTest, KeepsEmptySnapshotsAndRejectsGarbage) {
  std::istringstream in("3 3\n1 0 2\n");
  const auto net = read_snapshots(in);
  EXPECT_EQ(net.horizon(), 3u);
  EXPECT_TRUE(net.snapshot(0).empty());
  EXPECT_TRUE(net.snapshot(2).empty());

  std::istringstream bad("3 1\n0 0 3\n");
  EXPECT_THROW(read_snapshots(bad), std::runtime_error);
  std::istringstream empty("");
  EXPECT_THROW(read_snapshots(empty), std::runtime_error);
}

}  // namespace
}  // namespace tempim
