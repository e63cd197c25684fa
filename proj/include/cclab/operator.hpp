#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "cclab/errors.hpp"

namespace cclab {

inline double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

// Invertible d x d real operator with its inverse cached at construction.
// norm is the largest singular value of mat, inv_norm the reciprocal of the
// smallest; invertibility means sigma_min > 1e-12 * sigma_max. Long products
// are accumulated as running (P, P^{-1}) pairs of factor matrices and their
// cached inverses, never by inverting the product.
class Operator {
public:
  static constexpr double kSingularTolerance = 1e-12;

  static Operator identity(int d) {
    return Operator(Eigen::MatrixXd::Identity(d, d), Eigen::MatrixXd::Identity(d, d), 1.0, 1.0);
  }

  static Operator from_matrix(const Eigen::MatrixXd& m) {
    auto [n, in] = norms_checked(m);
    return Operator(m, m.inverse(), n, in);
  }

  // Trusts the supplied inverse (drift-controlled running pair); norms come
  // from the singular values of mat per the type contract.
  static Operator from_pair(const Eigen::MatrixXd& m, const Eigen::MatrixXd& minv) {
    auto [n, in] = norms_checked(m);
    double drift = (m * minv - Eigen::MatrixXd::Identity(m.rows(), m.cols()))
                       .cwiseAbs()
                       .maxCoeff();
    if (drift > 1e-10 * std::max(1.0, n * in))
      throw SingularProduct("running inverse drifted beyond tolerance");
    return Operator(m, minv, n, in);
  }

  const Eigen::MatrixXd& mat() const { return mat_; }
  const Eigen::MatrixXd& inv() const { return inv_; }
  double norm() const { return norm_; }
  double inv_norm() const { return inv_norm_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

  // Swaps the cached pair; norms swap exactly since
  // sigma_max(A^{-1}) = 1/sigma_min(A).
  Operator inverse() const { return Operator(inv_, mat_, inv_norm_, norm_); }

  // Composition L∘R (matrix product), inverse composed in reverse.
  friend Operator operator*(const Operator& l, const Operator& r) {
    if (l.dim() != r.dim())
      throw DimensionMismatch("compose: " + std::to_string(l.dim()) + " vs " +
                              std::to_string(r.dim()));
    return Operator(l.mat_ * r.mat_, r.inv_ * l.inv_, l.mat_ * r.mat_);
  }

private:
  Operator(Eigen::MatrixXd m, Eigen::MatrixXd minv, double n, double in)
      : mat_(std::move(m)), inv_(std::move(minv)), norm_(n), inv_norm_(in) {}

  // Compose path: recompute norms of the product.
  Operator(Eigen::MatrixXd m, Eigen::MatrixXd minv, const Eigen::MatrixXd& for_norms)
      : mat_(std::move(m)), inv_(std::move(minv)) {
    auto [n, in] = norms_checked(for_norms);
    norm_ = n;
    inv_norm_ = in;
  }

  static std::pair<double, double> norms_checked(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw DimensionMismatch("operator matrix must be square and nonempty");
    double smax, smin;
    if (m.rows() == 1) {
      smax = smin = std::abs(m(0, 0));
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
      smax = svd.singularValues()(0);
      smin = svd.singularValues()(m.rows() - 1);
    }
    if (!(smin > kSingularTolerance * smax) || smax == 0.0)
      throw SingularProduct("matrix fails invertibility tolerance");
    return {smax, 1.0 / smin};
  }

  Eigen::MatrixXd mat_;
  Eigen::MatrixXd inv_;
  double norm_ = 0.0;
  double inv_norm_ = 0.0;
};

// Metric on GL(V): ||A - B|| + ||A^{-1} - B^{-1}|| in the spectral norm.
inline double op_distance(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("op_distance: " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  return spectral_norm(a.mat() - b.mat()) + spectral_norm(a.inv() - b.inv());
}

inline double distance_to_identity(const Operator& a) {
  return spectral_norm(a.mat() - Eigen::MatrixXd::Identity(a.dim(), a.dim()));
}

}  // namespace cclab
