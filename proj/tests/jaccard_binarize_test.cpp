#include <gtest/gtest.h>

#include "tempim/linkpred/binarize.hpp"
#include "tempim/linkpred/jaccard.hpp"
#include "test_util.hpp"

namespace tempim {
namespace {

TEST(JaccardTest, WorkedCoefficient) {
  // N_0 = {2, 3}, N_1 = {3, 4}.
  const auto g = Snapshot::from_pairs(5, {{0, 2}, {0, 3}, {1, 3}, {1, 4}});
  const auto scores = jaccard_scores(g);
  const auto it = std::find_if(scores.begin(), scores.end(), [](const ScoredPair& s) { return s.edge == Edge{0, 1}; });
  ASSERT_NE(it, scores.end());
  EXPECT_DOUBLE_EQ(it->score, 1.0 / 3.0);
  for (const auto& s : scores) {
    EXPECT_FALSE(g.has_edge(s.edge.u, s.edge.v));
    EXPECT_GT(s.score, 0.0);
  }
}

TEST(JaccardTest, CompleteGraphOnlyRemoves) {
  const auto g = Snapshot::complete(6);
  EXPECT_TRUE(jaccard_scores(g).empty());
  const auto next = jaccard_evolve(g, 0.5, 0.2, 1);
  EXPECT_EQ(next.edge_count(), 15u - 3u);
  for (const auto& e : next.edges()) EXPECT_TRUE(g.has_edge(e.u, e.v));
}

TEST(JaccardTest, ZeroFractionsAreIdentity) {
  const auto g = testing::random_network(12, 1, 0.3, 2).snapshot(0);
  EXPECT_EQ(jaccard_evolve(g, 0.0, 0.0, 7), g);
}

TEST(JaccardTest, AdditionsOnlyNeverLowerDegree) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = testing::random_network(15, 1, 0.2, seed).snapshot(0);
    const auto next = jaccard_evolve(g, 0.3, 0.0, seed);
    const auto before = g.degrees(), after = next.degrees();
    for (std::size_t v = 0; v < before.size(); ++v) EXPECT_GE(after[v], before[v]);
    const auto scored = jaccard_scores(g);
    EXPECT_EQ(next.edge_count(), g.edge_count() + static_cast<std::size_t>(std::llround(0.3 * scored.size())));
  }
}

TEST(JaccardTest, RolloutIsSeededAndReproducible) {
  const auto g = testing::random_network(20, 1, 0.15, 3).snapshot(0);
  const auto a = jaccard_rollout(g, 4, 0.05, 0.05, 11);
  EXPECT_EQ(a, jaccard_rollout(g, 4, 0.05, 0.05, 11));
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[1], jaccard_evolve(a[0], 0.05, 0.05, stream_seed(11, 1)));
  EXPECT_THROW(jaccard_evolve(g, 1.5, 0.0, 1), std::invalid_argument);
}

TEST(BinarizeTest, Examples) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(4, 4, 0.1);
  p.diagonal().setZero();
  p(0, 1) = p(1, 0) = 0.9;
  p(2, 3) = p(3, 2) = 0.5;
  const ScoreMatrix s(p, ScoreKind::probability);
  EXPECT_EQ(binarize(s, 2.0 / 6.0), Snapshot::from_pairs(4, {{0, 1}, {2, 3}}));
  EXPECT_TRUE(binarize(s, 0.0).empty());
  EXPECT_EQ(binarize(s, 1.0), Snapshot::complete(4));
  // Ties among the 0.1 entries go to the smallest pairs.
  EXPECT_EQ(binarize(s, 3.0 / 6.0), Snapshot::from_pairs(4, {{0, 1}, {2, 3}, {0, 2}}));
  EXPECT_THROW(binarize(s, 1.1), std::invalid_argument);
}

TEST(BinarizeTest, EdgeCountContract) {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) p(i, j) = p(j, i) = static_cast<double>(rng.below(4)) / 3.0;
    const double rho = rng.uniform();
    const auto g = binarize(ScoreMatrix(p, ScoreKind::probability), rho);
    EXPECT_EQ(g.edge_count(), static_cast<std::size_t>(std::llround(static_cast<double>(n * (n - 1) / 2) * rho)));
  }
}

}  // namespace
}  // namespace tempim
