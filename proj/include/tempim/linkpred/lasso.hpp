#pragma once

// Per-pair L1-penalized logistic autoregression over historical node pairs.
// Pair i at step t+1 is modelled as expit(b_i + sum_j x_j(t) beta_ij),
// where x_j(t) indicates an edge on historical pair j at step t.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/linkpred/binarize.hpp"
#include "tempim/parallel.hpp"
#include "tempim/scores.hpp"

namespace tempim {

inline double expit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Node pairs with at least one edge in snapshots [0, p), in (i, j) order.
struct PairIndex {
  std::vector<Edge> pairs;

  static PairIndex build(const TemporalNetwork& net, std::size_t p) { return {memory_graph(net, p).edges()}; }

  std::size_t size() const { return pairs.size(); }

  std::optional<std::size_t> find(NodeId i, NodeId j) const {
    const Edge e = i < j ? Edge{i, j} : Edge{j, i};
    const auto it = std::lower_bound(pairs.begin(), pairs.end(), e);
    if (it == pairs.end() || *it != e) return std::nullopt;
    return static_cast<std::size_t>(it - pairs.begin());
  }

  /// Indicator of each pair in snapshot g.
  std::vector<double> indicator(const Snapshot& g) const {
    std::vector<double> x(pairs.size(), 0.0);
    for (const auto& e : g.edges())
      if (auto pos = find(e.u, e.v)) x[*pos] = 1.0;
    return x;
  }
};

/// 0/1 design matrix stored both by column and by row.
struct BinaryDesign {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::uint32_t>> col_rows;
  std::vector<std::vector<std::uint32_t>> row_cols;

  BinaryDesign() = default;
  BinaryDesign(std::size_t r, std::size_t c) : rows(r), cols(c), col_rows(c), row_cols(r) {}

  void set(std::size_t r, std::size_t c) {
    col_rows[c].push_back(static_cast<std::uint32_t>(r));
    row_cols[r].push_back(static_cast<std::uint32_t>(c));
  }

  /// First `r` rows only.
  BinaryDesign head(std::size_t r) const {
    BinaryDesign out(r, cols);
    for (std::size_t row = 0; row < r; ++row)
      for (auto c : row_cols[row]) out.set(row, c);
    return out;
  }
};

struct L1LogisticOptions {
  double tolerance = 1e-6;  // max absolute coefficient change per sweep
  std::size_t max_sweeps = 10000;
};

struct L1LogisticFit {
  double intercept = 0.0;
  std::vector<double> beta;  // dense, one per design column
  std::size_t sweeps = 0;
  bool converged = true;

  std::size_t nonzero() const {
    return static_cast<std::size_t>(std::count_if(beta.begin(), beta.end(), [](double b) { return b != 0.0; }));
  }

  double linear_predictor(std::span<const std::uint32_t> active_cols) const {
    double eta = intercept;
    for (auto c : active_cols) eta += beta[c];
    return eta;
  }
};

/// Minimizes mean logistic loss + alpha * sum |beta_j| (intercept
/// unpenalized) by cyclic coordinate descent on the 1/4-curvature quadratic
/// majorizer with soft-thresholding. A constant target gets an
/// intercept-only fit at the base rate clipped to [1/(2N), 1 - 1/(2N)].
inline L1LogisticFit fit_l1_logistic(const BinaryDesign& x, std::span<const std::uint8_t> y, double alpha,
                                     const L1LogisticOptions& opts = {}, const L1LogisticFit* warm = nullptr) {
  if (y.size() != x.rows) throw std::invalid_argument("fit_l1_logistic: target length mismatch");
  if (x.rows == 0) throw std::invalid_argument("fit_l1_logistic: no samples");
  if (!(alpha >= 0.0)) throw std::invalid_argument("fit_l1_logistic: alpha must be non-negative");
  const auto n = static_cast<double>(x.rows);

  L1LogisticFit fit;
  fit.beta.assign(x.cols, 0.0);
  double ones = 0.0;
  for (auto v : y) ones += v ? 1.0 : 0.0;
  const double base = ones / n;
  if (ones == 0.0 || ones == n) {
    const double lo = 0.5 / n;
    fit.intercept = logit(std::clamp(base, lo, 1.0 - lo));
    return fit;
  }

  if (warm != nullptr && warm->beta.size() == x.cols) {
    fit.beta = warm->beta;
    fit.intercept = warm->intercept;
  } else {
    fit.intercept = logit(base);
  }

  std::vector<double> eta(x.rows, fit.intercept);
  for (std::size_t c = 0; c < x.cols; ++c)
    if (fit.beta[c] != 0.0)
      for (auto r : x.col_rows[c]) eta[r] += fit.beta[c];

  const auto update_intercept = [&] {
    double g = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) g += expit(eta[r]) - y[r];
    const double delta = -4.0 * g / n;
    fit.intercept += delta;
    for (auto& e : eta) e += delta;
    return std::abs(delta);
  };
  const auto update_coord = [&](std::size_t c) {
    const auto& rows = x.col_rows[c];
    if (rows.empty()) return 0.0;
    double g = 0.0;
    for (auto r : rows) g += expit(eta[r]) - y[r];
    const double h = static_cast<double>(rows.size()) / (4.0 * n);
    const double z = fit.beta[c] - (g / n) / h;
    const double shrink = alpha / h;
    const double next = z > shrink ? z - shrink : (z < -shrink ? z + shrink : 0.0);
    const double delta = next - fit.beta[c];
    if (delta != 0.0) {
      for (auto r : rows) eta[r] += delta;
      fit.beta[c] = next;
    }
    return std::abs(delta);
  };

  std::vector<std::size_t> active;
  fit.converged = false;
  while (fit.sweeps < opts.max_sweeps) {
    double change = update_intercept();
    for (std::size_t c = 0; c < x.cols; ++c) change = std::max(change, update_coord(c));
    ++fit.sweeps;
    if (change < opts.tolerance) {
      fit.converged = true;
      break;
    }
    active.clear();
    for (std::size_t c = 0; c < x.cols; ++c)
      if (fit.beta[c] != 0.0) active.push_back(c);
    while (fit.sweeps < opts.max_sweeps) {
      double inner = update_intercept();
      for (auto c : active) inner = std::max(inner, update_coord(c));
      ++fit.sweeps;
      if (inner < opts.tolerance) break;
    }
  }
  if (fit.nonzero() == 0) fit.intercept = logit(base);
  return fit;
}

/// Rank-based (Mann-Whitney) AUC with average ranks for ties; 0.5 when a
/// class is missing.
inline double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: size mismatch");
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positives = 0.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t m = i; m < j; ++m)
      if (labels[order[m]]) {
        rank_sum += avg_rank;
        positives += 1.0;
      }
    i = j;
  }
  const double negatives = static_cast<double>(scores.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) return 0.5;
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

/// 20 points log-spaced over [1e-4, 10].
inline std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  constexpr int points = 20;
  for (int i = 0; i < points; ++i) grid.push_back(std::pow(10.0, -4.0 + 5.0 * i / (points - 1)));
  return grid;
}

struct LassoOptions {
  std::vector<double> alpha_grid = default_alpha_grid();
  double train_fraction = 0.75;
  L1LogisticOptions solver;
  std::size_t workers = 1;
};

struct LassoLogitModel {
  PairIndex index;
  std::vector<double> intercepts;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> coefficients;  // nonzero beta_ij per pair
  double alpha = 0.0;
  std::vector<double> alpha_grid;
  std::vector<double> validation_auc;  // per grid point
  double best_validation_auc = 0.0;

  std::size_t pair_count() const { return index.size(); }

  std::size_t nonzero_count() const {
    std::size_t total = 0;
    for (const auto& c : coefficients) total += c.size();
    return total;
  }

  /// Fraction of non-intercept coefficients that are exactly zero.
  double sparsity() const {
    const double total = static_cast<double>(pair_count()) * static_cast<double>(pair_count());
    return total == 0.0 ? 1.0 : 1.0 - static_cast<double>(nonzero_count()) / total;
  }

  /// Next-step edge probability for every pair given current pair states
  /// (0/1 observations or propagated probabilities).
  std::vector<double> predict(std::span<const double> state) const {
    if (state.size() != pair_count()) throw std::invalid_argument("LassoLogitModel::predict: state size mismatch");
    std::vector<double> out(pair_count());
    for (std::size_t i = 0; i < pair_count(); ++i) {
      double eta = intercepts[i];
      for (const auto& [j, b] : coefficients[i]) eta += b * state[j];
      out[i] = expit(eta);
    }
    return out;
  }

  ScoreMatrix to_scores(std::size_t n, std::span<const double> probabilities) const {
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < pair_count(); ++i) {
      const auto& e = index.pairs[i];
      values(e.u, e.v) = values(e.v, e.u) = probabilities[i];
    }
    return ScoreMatrix(std::move(values), ScoreKind::probability);
  }
};

namespace detail {

struct PairDesign {
  BinaryDesign design;  // row t: features x(t), t = 0..p-2
  std::vector<std::vector<std::uint8_t>> targets;  // per pair: x_i(t+1), t = 0..p-2
};

inline PairDesign build_pair_design(const TemporalNetwork& net, std::size_t p, const PairIndex& index) {
  const std::size_t samples = p - 1;
  PairDesign out{BinaryDesign(samples, index.size()), {}};
  out.targets.assign(index.size(), std::vector<std::uint8_t>(samples, 0));
  for (std::size_t t = 0; t < p; ++t) {
    for (const auto& e : net.snapshot(t).edges()) {
      const auto pos = index.find(e.u, e.v);
      if (!pos) continue;
      if (t < samples) out.design.set(t, *pos);
      if (t > 0) out.targets[*pos][t - 1] = 1;
    }
  }
  for (auto& row : out.design.row_cols) std::sort(row.begin(), row.end());
  return out;
}

/// Groups pairs by their target vector restricted to the first `rows`
/// samples. Pairs in one group share the design, hence the fit.
inline std::vector<std::vector<std::size_t>> group_targets(const std::vector<std::vector<std::uint8_t>>& targets,
                                                           std::size_t rows) {
  std::map<std::vector<std::uint8_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < targets.size(); ++i)
    groups[std::vector<std::uint8_t>(targets[i].begin(), targets[i].begin() + static_cast<std::ptrdiff_t>(rows))]
        .push_back(i);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(groups.size());
  for (auto& [key, members] : groups) out.push_back(std::move(members));
  return out;
}

}  // namespace detail

/// Fits one L1 logistic model per historical pair on transitions inside
/// [0, p). The penalty is chosen on the grid by pooled validation AUC over
/// the transitions after the first floor(train_fraction * (p-1)); ties go
/// to the larger penalty. The chosen model is refit on all p-1 transitions.
inline LassoLogitModel fit_lasso_logit(const TemporalNetwork& net, std::size_t p, const LassoOptions& opts = {}) {
  if (opts.alpha_grid.empty()) throw std::invalid_argument("fit_lasso_logit: empty penalty grid");
  if (p < 3 || p > net.horizon()) throw std::invalid_argument("fit_lasso_logit: need 3 <= p <= T");
  for (double a : opts.alpha_grid)
    if (!(a > 0.0)) throw std::invalid_argument("fit_lasso_logit: penalties must be positive");

  LassoLogitModel model;
  model.index = PairIndex::build(net, p);
  const std::size_t m = model.index.size();
  if (m == 0) throw std::invalid_argument("fit_lasso_logit: no historical edges in the training window");

  const auto pd = detail::build_pair_design(net, p, model.index);
  const std::size_t samples = p - 1;
  const std::size_t train_rows =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(opts.train_fraction * static_cast<double>(samples))),
                              1, samples - 1);
  const std::size_t val_rows = samples - train_rows;

  // Penalty path, largest first, warm-started per target group.
  std::vector<double> grid = opts.alpha_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  model.alpha_grid = grid;

  const BinaryDesign train = pd.design.head(train_rows);
  const auto groups = detail::group_targets(pd.targets, train_rows);
  // predictions[g][a][v]: validation prediction of group g under grid[a].
  std::vector<std::vector<std::vector<double>>> predictions(groups.size());
  parallel_for(groups.size(), opts.workers, [&](std::size_t g) {
    const auto& y_full = pd.targets[groups[g].front()];
    const std::span<const std::uint8_t> y(y_full.data(), train_rows);
    predictions[g].resize(grid.size());
    std::optional<L1LogisticFit> previous;
    for (std::size_t a = 0; a < grid.size(); ++a) {
      auto fit = fit_l1_logistic(train, y, grid[a], opts.solver, previous ? &*previous : nullptr);
      auto& pred = predictions[g][a];
      pred.resize(val_rows);
      for (std::size_t v = 0; v < val_rows; ++v)
        pred[v] = expit(fit.linear_predictor(pd.design.row_cols[train_rows + v]));
      previous = std::move(fit);
    }
  });

  std::vector<std::uint8_t> labels;
  labels.reserve(m * val_rows);
  for (const auto& members : groups)
    for (auto i : members)
      for (std::size_t v = 0; v < val_rows; ++v) labels.push_back(pd.targets[i][train_rows + v]);

  model.validation_auc.assign(grid.size(), 0.0);
  std::size_t best = 0;
  std::vector<double> pooled;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    pooled.clear();
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t rep = 0; rep < groups[g].size(); ++rep)
        pooled.insert(pooled.end(), predictions[g][a].begin(), predictions[g][a].end());
    model.validation_auc[a] = roc_auc(pooled, labels);
    if (model.validation_auc[a] > model.validation_auc[best]) best = a;
  }
  model.alpha = grid[best];
  model.best_validation_auc = model.validation_auc[best];

  // Refit on every transition at the chosen penalty.
  const auto full_groups = detail::group_targets(pd.targets, samples);
  std::vector<L1LogisticFit> fits(full_groups.size());
  parallel_for(full_groups.size(), opts.workers, [&](std::size_t g) {
    fits[g] = fit_l1_logistic(pd.design, pd.targets[full_groups[g].front()], model.alpha, opts.solver);
  });
  model.intercepts.assign(m, 0.0);
  model.coefficients.assign(m, {});
  for (std::size_t g = 0; g < full_groups.size(); ++g) {
    std::vector<std::pair<std::uint32_t, double>> sparse;
    for (std::size_t c = 0; c < fits[g].beta.size(); ++c)
      if (fits[g].beta[c] != 0.0) sparse.emplace_back(static_cast<std::uint32_t>(c), fits[g].beta[c]);
    for (auto i : full_groups[g]) {
      model.intercepts[i] = fits[g].intercept;
      model.coefficients[i] = sparse;
    }
  }
  return model;
}

/// Probability scores for snapshots p..p+steps-1: the first step conditions
/// on the observed snapshot p-1, later steps feed back the previous
/// probabilities. Pairs outside the index score 0.
inline std::vector<ScoreMatrix> lasso_rollout(const LassoLogitModel& model, const TemporalNetwork& net, std::size_t p,
                                              std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("lasso_rollout: steps must be at least 1");
  if (p < 1 || p > net.horizon()) throw std::out_of_range("lasso_rollout: p outside [1, T]");
  std::vector<double> state = model.index.indicator(net.snapshot(p - 1));
  std::vector<ScoreMatrix> out;
  out.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    state = model.predict(state);
    out.push_back(model.to_scores(net.node_count(), state));
  }
  return out;
}

// Portable text format:
//   lasso-logit <M> <alpha>
//   <M lines> i j intercept nnz [col value]...
inline void write_lasso_model(std::ostream& out, const LassoLogitModel& model) {
  const auto old = out.precision(17);
  out << "lasso-logit " << model.pair_count() << ' ' << model.alpha << '\n';
  for (std::size_t i = 0; i < model.pair_count(); ++i) {
    out << model.index.pairs[i].u << ' ' << model.index.pairs[i].v << ' ' << model.intercepts[i] << ' '
        << model.coefficients[i].size();
    for (const auto& [c, b] : model.coefficients[i]) out << ' ' << c << ' ' << b;
    out << '\n';
  }
  out.precision(old);
}

inline LassoLogitModel read_lasso_model(std::istream& in) {
  std::string tag;
  std::size_t m = 0;
  LassoLogitModel model;
  if (!(in >> tag >> m >> model.alpha) || tag != "lasso-logit") throw std::runtime_error("not a lasso-logit model");
  model.intercepts.resize(m);
  model.coefficients.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Edge e;
    std::size_t nnz = 0;
    if (!(in >> e.u >> e.v >> model.intercepts[i] >> nnz)) throw std::runtime_error("truncated lasso-logit model");
    model.index.pairs.push_back(e);
    for (std::size_t k = 0; k < nnz; ++k) {
      std::uint32_t c = 0;
      double b = 0.0;
      if (!(in >> c >> b) || c >= m) throw std::runtime_error("bad lasso-logit coefficient");
      model.coefficients[i].emplace_back(c, b);
    }
  }
  return model;
}

}  // namespace tempim
