#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace tempim {

enum class ScoreKind { probability, similarity };

/// Symmetric n x n pairwise link scores with a zero diagonal.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;

  ScoreMatrix(Eigen::MatrixXd values, ScoreKind kind) : values_(std::move(values)), kind_(kind) {
    if (values_.rows() != values_.cols()) throw std::invalid_argument("score matrix must be square");
    const auto n = values_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (values_(i, i) != 0.0) throw std::invalid_argument("score matrix diagonal must be zero");
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double a = values_(i, j);
        if (a != values_(j, i)) throw std::invalid_argument("score matrix must be symmetric");
        if (!std::isfinite(a)) throw std::invalid_argument("score matrix entries must be finite");
        if (kind_ == ScoreKind::probability && (a < 0.0 || a > 1.0))
          throw std::invalid_argument("probability scores must lie in [0, 1]");
      }
    }
  }

  static ScoreMatrix zeros(std::size_t n, ScoreKind kind) {
    const auto m = static_cast<Eigen::Index>(n);
    return ScoreMatrix(Eigen::MatrixXd::Zero(m, m), kind);
  }

  std::size_t node_count() const { return static_cast<std::size_t>(values_.rows()); }
  ScoreKind kind() const { return kind_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  /// theta_i = sum_j P_ij.
  Eigen::VectorXd row_sums() const { return values_.rowwise().sum(); }

 private:
  Eigen::MatrixXd values_;
  ScoreKind kind_ = ScoreKind::similarity;
};

}  // namespace tempim
