#pragma once

// Temporal NMF with consensus coupling. For snapshots A_0..A_{p-1} with
// weights w_t = phi^(p-1-t), minimizes
//   sum_t w_t (|A_t - U_t V_t|^2 + |U_t - U*|^2 + |V_t - V*|^2)
// over non-negative U_t (n x q) and V_t (q x n), where U*, V* are the
// w-weighted means of the per-snapshot factors.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/linkpred/binarize.hpp"
#include "tempim/parallel.hpp"
#include "tempim/random.hpp"
#include "tempim/scores.hpp"

namespace tempim {

using SparseMatrix = Eigen::SparseMatrix<double>;

inline SparseMatrix adjacency_matrix(const Snapshot& g) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * g.edge_count());
  for (const auto& e : g.edges()) {
    entries.emplace_back(e.u, e.v, 1.0);
    entries.emplace_back(e.v, e.u, 1.0);
  }
  const auto n = static_cast<Eigen::Index>(g.node_count());
  SparseMatrix a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

/// Default latent dimension: max(1, round(0.05 n)).
inline std::size_t default_nmf_rank(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(n))));
}

struct NmfOptions {
  std::size_t rank = 1;
  double attenuation = 0.9;  // phi
  std::size_t restarts = 25;
  std::size_t max_iterations = 500;
  double tolerance = 1e-4;  // relative loss change
  double epsilon = 1e-9;    // denominator guard
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct NmfModel {
  std::vector<Eigen::MatrixXd> u;  // per snapshot, n x q
  std::vector<Eigen::MatrixXd> v;  // per snapshot, q x n
  Eigen::MatrixXd u_star;
  Eigen::MatrixXd v_star;
  double attenuation = 1.0;
  double loss = 0.0;
  std::vector<double> loss_history;  // entry 0 is the initial loss
  bool converged = false;
  std::size_t restart = 0;

  std::size_t rank() const { return static_cast<std::size_t>(v_star.rows()); }
  std::size_t node_count() const { return static_cast<std::size_t>(v_star.cols()); }
  std::size_t snapshots() const { return u.size(); }
};

namespace detail {

inline std::vector<double> nmf_weights(std::size_t count, double phi) {
  std::vector<double> w(count);
  for (std::size_t t = 0; t < count; ++t) w[t] = std::pow(phi, static_cast<double>(count - 1 - t));
  return w;
}

inline void update_consensus(NmfModel& m, std::span<const double> w) {
  double total = 0.0;
  m.u_star.setZero(m.u.front().rows(), m.u.front().cols());
  m.v_star.setZero(m.v.front().rows(), m.v.front().cols());
  for (std::size_t t = 0; t < m.u.size(); ++t) {
    m.u_star += w[t] * m.u[t];
    m.v_star += w[t] * m.v[t];
    total += w[t];
  }
  m.u_star /= total;
  m.v_star /= total;
}

/// |A - U V|^2 = |A|^2 - 2 tr(U^T A V^T) + tr((U^T U)(V V^T)).
inline double reconstruction_error(const SparseMatrix& a, double a_norm2, const Eigen::MatrixXd& u,
                                   const Eigen::MatrixXd& v) {
  const Eigen::MatrixXd av = a * v.transpose();  // n x q
  const double cross = (u.array() * av.array()).sum();
  const Eigen::MatrixXd utu = u.transpose() * u;
  const Eigen::MatrixXd vvt = v * v.transpose();
  const double quad = (utu.array() * vvt.array()).sum();
  return std::max(0.0, a_norm2 - 2.0 * cross + quad);
}

inline double nmf_loss(std::span<const SparseMatrix> a, std::span<const double> a_norm2, const NmfModel& m,
                       std::span<const double> w) {
  double loss = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    loss += w[t] * (reconstruction_error(a[t], a_norm2[t], m.u[t], m.v[t]) + (m.u[t] - m.u_star).squaredNorm() +
                    (m.v[t] - m.v_star).squaredNorm());
  }
  return loss;
}

/// Multiplicative updates, one block (U_t, then V_t) at a time. With
/// R = sum_{s != t} w_s U_s and W = sum w, the loss restricted to U_t is
/// w_t (|A_t - U_t V_t|^2 + (1 - w_t/W)|U_t|^2 - 2/W <U_t, R>) + const,
/// whose multiplicative update is non-increasing.
inline void nmf_iterate(std::span<const SparseMatrix> a, NmfModel& m, std::span<const double> w, double eps) {
  double total = 0.0;
  for (double x : w) total += x;
  Eigen::MatrixXd u_sum = m.u_star * total;
  Eigen::MatrixXd v_sum = m.v_star * total;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double keep = 1.0 - w[t] / total;
    {
      auto& u = m.u[t];
      const auto& v = m.v[t];
      const Eigen::MatrixXd rest = (u_sum - w[t] * u) / total;
      const Eigen::MatrixXd num = a[t] * v.transpose() + rest;
      const Eigen::MatrixXd den = u * (v * v.transpose()) + keep * u;
      const Eigen::MatrixXd next = (u.array() * num.array() / (den.array() + eps)).matrix();
      u_sum += w[t] * (next - u);
      u = next;
    }
    {
      auto& v = m.v[t];
      const auto& u = m.u[t];
      const Eigen::MatrixXd rest = (v_sum - w[t] * v) / total;
      const Eigen::MatrixXd num = (a[t].transpose() * u).transpose() + rest;
      const Eigen::MatrixXd den = (u.transpose() * u) * v + keep * v;
      const Eigen::MatrixXd next = (v.array() * num.array() / (den.array() + eps)).matrix();
      v_sum += w[t] * (next - v);
      v = next;
    }
  }
  update_consensus(m, w);
}

/// Iterates from the factors already in `m` until the relative loss change
/// drops below the tolerance or the iteration cap is hit.
inline void nmf_descend(std::span<const SparseMatrix> a, NmfModel& m, const NmfOptions& opts) {
  const auto w = nmf_weights(a.size(), m.attenuation);
  std::vector<double> a_norm2(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) a_norm2[t] = a[t].squaredNorm();
  update_consensus(m, w);
  m.loss = nmf_loss(a, a_norm2, m, w);
  m.loss_history.assign(1, m.loss);
  m.converged = false;
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    nmf_iterate(a, m, w, opts.epsilon);
    const double next = nmf_loss(a, a_norm2, m, w);
    m.loss_history.push_back(next);
    const double change = std::abs(m.loss - next) / std::max(m.loss, std::numeric_limits<double>::min());
    m.loss = next;
    if (change < opts.tolerance || next == 0.0) {
      m.converged = true;
      break;
    }
  }
}

inline void check_nmf_inputs(std::span<const SparseMatrix> a, const NmfOptions& opts) {
  if (a.empty()) throw std::invalid_argument("temporal NMF needs at least one snapshot");
  const auto n = a.front().rows();
  for (const auto& m : a)
    if (m.rows() != n || m.cols() != n) throw std::invalid_argument("temporal NMF inputs must be n x n");
  if (opts.rank < 1 || opts.rank >= static_cast<std::size_t>(n))
    throw std::invalid_argument("temporal NMF rank must satisfy 1 <= q < n");
  if (!(opts.attenuation > 0.0 && opts.attenuation <= 1.0))
    throw std::invalid_argument("attenuation must lie in (0, 1]");
  if (opts.restarts < 1) throw std::invalid_argument("temporal NMF needs at least one restart");
}

}  // namespace detail

/// Temporal NMF loss of `model` on `a` (weights from model.attenuation).
inline double temporal_nmf_loss(std::span<const SparseMatrix> a, const NmfModel& model) {
  const auto w = detail::nmf_weights(a.size(), model.attenuation);
  std::vector<double> a_norm2(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) a_norm2[t] = a[t].squaredNorm();
  return detail::nmf_loss(a, a_norm2, model, w);
}

/// Fits from `restarts` random initializations (entries uniform(0,1) scaled
/// by sqrt(mean(A)/q)) and keeps the lowest final loss; ties go to the
/// lower restart index.
inline NmfModel fit_temporal_nmf(std::span<const SparseMatrix> a, const NmfOptions& opts) {
  detail::check_nmf_inputs(a, opts);
  const auto n = a.front().rows();
  const auto q = static_cast<Eigen::Index>(opts.rank);
  double mass = 0.0;
  for (const auto& m : a) mass += m.sum();
  const double mean = mass / (static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(a.size()));
  const double scale = std::sqrt(std::max(mean, 1e-12) / static_cast<double>(q));

  std::vector<NmfModel> runs(opts.restarts);
  parallel_for(opts.restarts, opts.workers, [&](std::size_t r) {
    SplitMix64 rng(stream_seed(opts.seed, r));
    NmfModel& m = runs[r];
    m.attenuation = opts.attenuation;
    m.restart = r;
    const auto random = [&](Eigen::Index rows, Eigen::Index cols) {
      Eigen::MatrixXd x(rows, cols);
      for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = rng.uniform() * scale;
      return x;
    };
    for (std::size_t t = 0; t < a.size(); ++t) {
      m.u.push_back(random(n, q));
      m.v.push_back(random(q, n));
    }
    detail::nmf_descend(a, m, opts);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].loss < runs[best].loss) best = r;
  return std::move(runs[best]);
}

inline std::vector<SparseMatrix> adjacency_matrices(const TemporalNetwork& net, std::size_t begin, std::size_t end) {
  std::vector<SparseMatrix> out;
  for (std::size_t t = begin; t < end; ++t) out.push_back(adjacency_matrix(net.snapshot(t)));
  return out;
}

inline NmfModel fit_temporal_nmf(const TemporalNetwork& net, std::size_t p, const NmfOptions& opts) {
  if (p < 1 || p > net.horizon()) throw std::out_of_range("fit_temporal_nmf: p outside [1, T]");
  const auto mats = adjacency_matrices(net, 0, p);
  return fit_temporal_nmf(mats, opts);
}

/// Continues descent from `warm` on `a`, which may carry more snapshots
/// than `warm`; new snapshots start at the current consensus factors.
inline NmfModel refine_temporal_nmf(std::span<const SparseMatrix> a, NmfModel warm, const NmfOptions& opts) {
  if (warm.u.empty()) throw std::invalid_argument("refine_temporal_nmf: empty warm start");
  if (a.size() < warm.u.size()) throw std::invalid_argument("refine_temporal_nmf: fewer snapshots than warm start");
  while (warm.u.size() < a.size()) {
    warm.u.push_back(warm.u_star);
    warm.v.push_back(warm.v_star);
  }
  detail::nmf_descend(a, warm, opts);
  return warm;
}

/// Cosine similarity between the per-node columns of V*. Zero columns score
/// 0 against everything.
inline ScoreMatrix nmf_scores(const NmfModel& model) {
  Eigen::MatrixXd v = model.v_star;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double norm = v.col(j).norm();
    if (norm > 0.0)
      v.col(j) /= norm;
    else
      v.col(j).setZero();
  }
  Eigen::MatrixXd s = v.transpose() * v;
  s = (0.5 * (s + s.transpose())).eval();
  s = s.cwiseMax(0.0).cwiseMin(1.0);
  s.diagonal().setZero();
  return ScoreMatrix(std::move(s), ScoreKind::similarity);
}

struct NmfRollout {
  PredictedFuture future;
  std::vector<double> warm_start_loss;  // per refit, before descent
  std::vector<double> refit_loss;       // per refit, after descent
  NmfModel final_model;
};

/// Multi-step forecast: score, binarize at density rho, append the
/// predicted snapshot to the training set, refit from the previous factors,
/// and repeat.
inline NmfRollout nmf_rollout(const NmfModel& model, const TemporalNetwork& net, std::size_t p, std::size_t steps,
                              double rho, const NmfOptions& opts) {
  if (steps < 1) throw std::invalid_argument("nmf_rollout: steps must be at least 1");
  if (p != model.snapshots()) throw std::invalid_argument("nmf_rollout: model was not fit on p snapshots");
  auto mats = adjacency_matrices(net, 0, p);
  NmfRollout out;
  out.final_model = model;
  out.future.edges_per_step = target_edge_count(net.node_count(), rho);
  for (std::size_t s = 0; s < steps; ++s) {
    auto scores = nmf_scores(out.final_model);
    out.future.snapshots.push_back(binarize(scores, rho));
    out.future.scores.push_back(std::move(scores));
    if (s + 1 == steps) break;
    mats.push_back(adjacency_matrix(out.future.snapshots.back()));
    NmfModel warm = out.final_model;
    warm.u.push_back(warm.u_star);
    warm.v.push_back(warm.v_star);
    out.warm_start_loss.push_back(temporal_nmf_loss(mats, warm));
    out.final_model = refine_temporal_nmf(mats, std::move(warm), opts);
    out.refit_loss.push_back(out.final_model.loss);
  }
  return out;
}

// Portable text format:
//   temporal-nmf <snapshots> <n> <q> <phi> <loss>
//   then U*, V*, and per snapshot U_t, V_t, each as "<rows> <cols>" and
//   row-major values.
inline void write_nmf_model(std::ostream& out, const NmfModel& m) {
  const auto old = out.precision(17);
  const auto matrix = [&](const Eigen::MatrixXd& x) {
    out << x.rows() << ' ' << x.cols() << '\n';
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? " " : "") << x(i, j);
      out << '\n';
    }
  };
  out << "temporal-nmf " << m.snapshots() << ' ' << m.node_count() << ' ' << m.rank() << ' ' << m.attenuation << ' '
      << m.loss << '\n';
  matrix(m.u_star);
  matrix(m.v_star);
  for (std::size_t t = 0; t < m.snapshots(); ++t) {
    matrix(m.u[t]);
    matrix(m.v[t]);
  }
  out.precision(old);
}

inline NmfModel read_nmf_model(std::istream& in) {
  std::string tag;
  std::size_t count = 0, n = 0, q = 0;
  NmfModel m;
  if (!(in >> tag >> count >> n >> q >> m.attenuation >> m.loss) || tag != "temporal-nmf")
    throw std::runtime_error("not a temporal-nmf model");
  const auto matrix = [&](std::size_t rows, std::size_t cols) {
    std::size_t r = 0, c = 0;
    if (!(in >> r >> c) || r != rows || c != cols) throw std::runtime_error("temporal-nmf shape mismatch");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (!(in >> x(i, j))) throw std::runtime_error("truncated temporal-nmf model");
    return x;
  };
  m.u_star = matrix(n, q);
  m.v_star = matrix(q, n);
  for (std::size_t t = 0; t < count; ++t) {
    m.u.push_back(matrix(n, q));
    m.v.push_back(matrix(q, n));
  }
  m.converged = true;
  return m;
}

}  // namespace tempim
