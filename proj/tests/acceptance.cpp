// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "tempim/core.hpp"
#include "tempim/diffusion.hpp"
#include "tempim/experiment.hpp"
#include "tempim/linkpred.hpp"
#include "tempim/select.hpp"
#include "tempim/stats.hpp"
#include "tempim/synthetic.hpp"
#include "test_util.hpp"

namespace {

using namespace tempim;

enum class Verdict { pass, fail, skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome check(bool ok, std::string detail) { return {ok ? Verdict::pass : Verdict::fail, std::move(detail)}; }

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// 1. Monte Carlo mean agrees with the exact expectation.
Outcome mc_vs_exact() {
  const double lambdas[] = {0.1, 0.3, 0.7};
  int agree = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    SplitMix64 rng(stream_seed(1001, i));
    const std::size_t n = 3 + rng.below(4);
    const std::size_t horizon = 1 + rng.below(3);
    const auto net = testing::random_network(n, horizon, 0.3 + 0.3 * rng.uniform(), rng());
    std::vector<NodeId> seeds{static_cast<NodeId>(rng.below(n))};
    if (rng.uniform() < 0.3) {
      const auto extra = static_cast<NodeId>(rng.below(n));
      if (extra != seeds[0]) seeds.push_back(extra);
    }
    DiffusionConfig cfg;
    cfg.lambda = lambdas[i % 3];
    cfg.end_t = horizon - 1;
    cfg.mc_runs = 100000;
    cfg.rng_seed = rng();
    cfg.keep_runs = false;
    const auto mc = simulate_si(net, SeedSet(seeds), cfg);
    const double exact = exact_sigma(net, SeedSet(seeds), cfg.lambda, 0, horizon - 1);
    const double gap = std::abs(mc.mean_spread - exact);
    if (gap <= 3.0 * mc.std_error) ++agree;
    if (mc.std_error > 0.0) worst = std::max(worst, gap / mc.std_error);
  }
  return check(agree >= 49, std::to_string(agree) + "/50 within 3 stderr (worst " + fmt(worst) + " stderr)");
}

// 2. Greedy reaches 1 - 1/e of the exhaustive optimum.
Outcome greedy_quality() {
  double worst = 1.0;
  for (int i = 0; i < 30; ++i) {
    SplitMix64 rng(stream_seed(2002, i));
    const std::size_t n = 4 + rng.below(5);
    const std::size_t k = 1 + rng.below(3);
    const std::size_t horizon = 1 + rng.below(3);
    const auto net = testing::random_network(n, horizon, 0.2 + 0.3 * rng.uniform(), rng());
    const auto sigma = exact_estimator(net, 0.1 + 0.6 * rng.uniform(), 0, horizon - 1);
    const double greedy = sigma(greedy_select(net, k, sigma));
    worst = std::min(worst, greedy / oracle::exhaustive_optimum(n, k, sigma));
  }
  return check(worst >= 0.63, "worst greedy/optimum ratio " + fmt(worst));
}

// 3. Dynamic degree against set arithmetic, and the two-node discount.
Outcome dynamic_degree_correctness() {
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    SplitMix64 rng(stream_seed(3003, i));
    const std::size_t horizon = 2 + rng.below(4);
    const auto net = testing::random_network(2 + rng.below(7), horizon, rng.uniform(), rng());
    const std::size_t ta = rng.below(horizon - 1);
    const std::size_t tb = ta + 1 + rng.below(horizon - ta - 1);
    if (dynamic_degree(net, ta, tb) != oracle::set_dynamic_degree(net, ta, tb)) ++mismatches;
  }
  DynamicDegreeTable table({5.0, 3.0}, {{1}, {0}});
  const auto seeds = dyn_deg_discount(table, 2, 0.1);
  const double dd = table.discounted[1];
  const bool example = seeds.nodes() == std::vector<NodeId>{0, 1} && std::abs(dd - 0.8) <= 1e-12;
  return check(mismatches == 0 && example,
               std::to_string(mismatches) + "/1000 mismatches; two-node dd = " + fmt(dd, 17));
}

// 4. Binarization keeps exactly round(C(n,2) rho) edges.
Outcome binarization_contract() {
  int wrong = 0;
  for (int i = 0; i < 100; ++i) {
    SplitMix64 rng(stream_seed(4004, i));
    const std::size_t n = 2 + rng.below(40);
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = a + 1; b < m; ++b) p(a, b) = p(b, a) = rng.uniform() < 0.5 ? 0.5 : rng.uniform();
    const double rho = rng.uniform();
    const auto g = binarize(ScoreMatrix(p, ScoreKind::probability), rho);
    const auto want = static_cast<std::size_t>(std::llround(static_cast<double>(n * (n - 1) / 2) * rho));
    if (g.edge_count() != want) ++wrong;
  }
  return check(wrong == 0, std::to_string(wrong) + "/100 wrong edge counts");
}

// 5. L1 logistic recovery on a separable alternating pattern.
Outcome lasso_recovery() {
  std::vector<Snapshot> snaps;
  for (std::size_t t = 0; t < 24; ++t)
    snaps.push_back(t % 2 == 0 ? Snapshot::from_pairs(4, {{0, 1}}) : Snapshot::from_pairs(4, {{2, 3}}));
  const TemporalNetwork net(4, snaps);
  const auto model = fit_lasso_logit(net, 20);
  double best = 0.0;
  for (double auc : model.validation_auc) best = std::max(best, auc);
  LassoOptions heavy;
  heavy.alpha_grid = {10.0};
  const auto zeroed = fit_lasso_logit(net, 20, heavy);
  const auto noisy = fit_lasso_logit(testing::random_network(10, 16, 0.3, 5), 16, heavy);
  const std::size_t nonzero = zeroed.nonzero_count() + noisy.nonzero_count();
  return check(best == 1.0 && nonzero == 0,
               "best validation AUC " + fmt(best) + "; nonzero coefficients at alpha=10: " + std::to_string(nonzero));
}

// 6. NMF loss descent and rank-1 recovery.
Outcome nmf_descent() {
  double worst_rise = 0.0;
  for (int i = 0; i < 20; ++i) {
    SplitMix64 rng(stream_seed(6006, i));
    const std::size_t n = 10 + rng.below(20);
    const auto net = testing::random_network(n, 2 + rng.below(4), 0.05 + 0.3 * rng.uniform(), rng());
    NmfOptions opts;
    opts.rank = 1 + rng.below(3);
    opts.restarts = 1;
    opts.max_iterations = 300;
    opts.tolerance = 0.0;
    opts.seed = rng();
    const auto model = fit_temporal_nmf(net, net.horizon(), opts);
    for (std::size_t t = 1; t < model.loss_history.size(); ++t)
      worst_rise = std::max(worst_rise, model.loss_history[t] - model.loss_history[t - 1]);
  }
  Eigen::VectorXd x(8), y(8);
  x << 1.0, 0.5, 2.0, 1.5, 0.2, 3.0, 0.8, 1.1;
  y << 0.3, 1.2, 0.7, 2.2, 1.0, 0.4, 0.9, 1.6;
  const Eigen::MatrixXd a = x * y.transpose();
  const std::vector<SparseMatrix> mats(4, SparseMatrix(a.sparseView()));
  NmfOptions opts;
  opts.rank = 1;
  opts.restarts = 3;
  opts.max_iterations = 20000;
  opts.tolerance = 1e-14;
  const auto model = fit_temporal_nmf(mats, opts);
  const double rel = (a - model.u_star * model.v_star).norm() / a.norm();
  return check(worst_rise <= 1e-10 && rel <= 1e-3,
               "largest loss increase " + fmt(worst_rise) + "; rank-1 relative error " + fmt(rel));
}

std::filesystem::path bundled_dataset() { return std::filesystem::path(TEMPIM_DATA_DIR) / "synthetic_hub.txt"; }

// 7. Oracle dominance and static-mem quality on the bundled dataset.
Outcome oracle_dominance() {
  const auto path = bundled_dataset();
  if (!std::filesystem::exists(path)) return {Verdict::fail, "missing " + path.string()};
  const auto net = read_snapshots_file(path.string());
  std::vector<ExperimentSpec> specs;
  for (auto m : kAllMethods)
    for (std::size_t k : {2, 5, 10}) {
      ExperimentSpec s;
      s.dataset.path = path.filename().string();
      s.p = 16;
      s.horizon = 20;
      s.lambda = 0.1;
      s.k = k;
      s.method = m;
      s.im = ImAlgorithm::greedy;
      s.mc_runs = 1000;
      s.seed = 2024;
      specs.push_back(s);
    }
  const auto sweep = run_sweep(specs, 1, &net);
  if (!sweep.all_ok()) return {Verdict::fail, "sweep had failing specs"};
  std::map<std::size_t, const ResultRecord*> oracle;
  for (const auto& r : sweep.records)
    if (r.spec.method == Method::oracle) oracle[r.spec.k] = &r;
  bool dominated = true;
  double worst_margin = 1e300, worst_mem_ratio = 1e300;
  std::ostringstream table;
  for (const auto& r : sweep.records) {
    const auto& o = *oracle.at(r.spec.k);
    const double pooled = std::sqrt(o.std_error * o.std_error + r.std_error * r.std_error);
    const double margin = (o.mean_spread - r.mean_spread) / std::max(pooled, 1e-12);
    if (r.spec.method != Method::oracle) worst_margin = std::min(worst_margin, margin);
    if (o.mean_spread < r.mean_spread - 2.0 * pooled) dominated = false;
    if (r.spec.method == Method::static_mem) worst_mem_ratio = std::min(worst_mem_ratio, r.mean_spread / o.mean_spread);
  }
  for (std::size_t k : {2, 5, 10}) {
    table << " k=" << k << ":";
    for (auto m : kAllMethods)
      for (const auto& r : sweep.records)
        if (r.spec.k == k && r.spec.method == m) table << ' ' << to_string(m) << '=' << fmt(r.mean_spread);
  }
  std::cout << "    spreads" << table.str() << '\n';
  return check(dominated && worst_mem_ratio >= 0.85, "worst oracle margin " + fmt(worst_margin) +
                                                         " pooled stderr; static-mem/oracle >= " +
                                                         fmt(worst_mem_ratio));
}

// 8. Identical sweeps give byte-identical tables.
Outcome determinism() {
  const auto path = bundled_dataset();
  if (!std::filesystem::exists(path)) return {Verdict::fail, "missing " + path.string()};
  const auto net = read_snapshots_file(path.string());
  std::vector<ExperimentSpec> specs;
  for (auto m : kAllMethods)
    for (std::size_t k : {1, 4}) {
      ExperimentSpec s;
      s.dataset.path = path.filename().string();
      s.p = 16;
      s.lambda = 0.1;
      s.k = k;
      s.method = m;
      s.im = ImAlgorithm::dyndeg;
      s.mc_runs = 300;
      s.seed = 99;
      s.hyper.nmf_restarts = 5;
      specs.push_back(s);
    }
  const auto first = results_csv(run_sweep(specs, 1, &net));
  const auto second = results_csv(run_sweep(specs, 2, &net));
  return check(first == second, std::to_string(first.size()) + " bytes, " +
                                    (first == second ? "identical" : "different"));
}

// 9. Table statistics on user-supplied data (TEMPIM_DATASETS directory).
Outcome dataset_table() {
  const char* dir = std::getenv("TEMPIM_DATASETS");
  if (dir == nullptr) return {Verdict::skip, "set TEMPIM_DATASETS to a directory with reality/office/hospital files"};
  struct Row {
    const char* name;
    std::size_t n, m;
    double density;
  };
  const Row rows[] = {{"reality", 64, 722, 0.024}, {"office", 92, 755, 0.042}, {"hospital", 75, 1139, 0.052}};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& row : rows) {
    const auto base = std::filesystem::path(dir) / row.name;
    DatasetSource src;
    if (std::filesystem::exists(base.string() + ".snapshots")) {
      src = {base.string() + ".snapshots", DatasetFormat::snapshots, 0, BinScheme::equal_time};
    } else if (std::filesystem::exists(base.string() + ".events")) {
      src = {base.string() + ".events", DatasetFormat::events, find_preset(row.name).horizon, BinScheme::equal_time};
    } else {
      detail << row.name << ": missing; ";
      ok = false;
      continue;
    }
    const auto s = dataset_stats(load_dataset(src));
    const bool good = s.nodes == row.n && s.unique_links == row.m && std::abs(s.mean_density - row.density) <= 0.001;
    ok = ok && good;
    detail << row.name << ": n=" << s.nodes << " m=" << s.unique_links << " density=" << fmt(s.mean_density) << "; ";
  }
  return check(ok, detail.str());
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 MC vs exact oracle", mc_vs_exact},
      {"2 greedy quality", greedy_quality},
      {"3 dynamic degree correctness", dynamic_degree_correctness},
      {"4 binarization contract", binarization_contract},
      {"5 LASSO-logit recovery", lasso_recovery},
      {"6 NMF descent and recovery", nmf_descent},
      {"7 oracle dominance end-to-end", oracle_dominance},
      {"8 determinism", determinism},
      {"9 dataset statistics (optional, needs data)", dataset_table},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = out.verdict == Verdict::pass ? "PASS" : out.verdict == Verdict::fail ? "FAIL" : "SKIP";
    if (out.verdict == Verdict::fail) ++failures;
    std::cout << tag << "  criterion " << name << ": " << out.detail << " (" << fmt(secs, 3) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
