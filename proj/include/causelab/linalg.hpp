#pragma once

#include "causelab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace causelab {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct LeastSquaresFit {
  Vector<Scalar> coefficients;
  Vector<Scalar> residuals;
  Scalar residual_variance = 0;  // RSS / (n - p)
  Matrix<Scalar> covariance;     // residual_variance * (X'X)^-1

  Scalar standard_error(Eigen::Index k) const { return std::sqrt(covariance(k, k)); }
};

// [1 | X]
template <typename Derived>
Matrix<typename Derived::Scalar> with_intercept(const Eigen::MatrixBase<Derived>& x) {
  Matrix<typename Derived::Scalar> out(x.rows(), x.cols() + 1);
  out.col(0).setOnes();
  out.rightCols(x.cols()) = x;
  return out;
}

// Ordinary least squares of y on the columns of x (no implicit intercept).
// Throws SingularSystem when x is rank deficient.
template <typename DerivedX, typename DerivedY>
LeastSquaresFit<typename DerivedX::Scalar> least_squares(const Eigen::MatrixBase<DerivedX>& x,
                                                         const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (y.rows() != n) throw InvalidInput("least_squares: row mismatch");
  if (n <= p) throw SingularSystem("least_squares: needs more rows than columns");
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) throw SingularSystem("least_squares: design matrix is rank deficient");
  LeastSquaresFit<Scalar> fit;
  fit.coefficients = qr.solve(y.derived());
  fit.residuals = y - x * fit.coefficients;
  fit.residual_variance = fit.residuals.squaredNorm() / static_cast<Scalar>(n - p);
  const Matrix<Scalar> xtx = x.transpose() * x;
  fit.covariance = fit.residual_variance * xtx.ldlt().solve(Matrix<Scalar>::Identity(p, p));
  return fit;
}

template <typename Scalar>
struct Standardized {
  Matrix<Scalar> values;
  Vector<Scalar> mean;
  Vector<Scalar> scale;
};

// Zero mean, unit (population) variance per column; constant columns keep
// scale 1.
template <typename Derived>
Standardized<typename Derived::Scalar> standardize(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Standardized<Scalar> out;
  out.mean = x.colwise().mean().transpose();
  out.values = x.rowwise() - out.mean.transpose();
  out.scale = (out.values.colwise().squaredNorm() / static_cast<Scalar>(std::max<Eigen::Index>(1, x.rows())))
                  .cwiseSqrt()
                  .transpose();
  for (Eigen::Index j = 0; j < out.scale.size(); ++j) {
    if (out.scale[j] <= Scalar(0)) out.scale[j] = Scalar(1);
  }
  out.values = out.values.array().rowwise() / out.scale.transpose().array();
  return out;
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar correlation(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const auto ac = (a.array() - a.mean()).matrix();
  const auto bc = (b.array() - b.mean()).matrix();
  const auto denom = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
  if (!(denom > 0)) throw SingularSystem("correlation: zero variance");
  return ac.dot(bc) / denom;
}

// Median of all pairwise Euclidean distances between rows.
template <typename Derived>
typename Derived::Scalar median_pairwise_distance(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> d;
  const Eigen::Index n = x.rows();
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) d.push_back((x.row(i) - x.row(j)).norm());
  }
  if (d.empty()) return Scalar(0);
  auto mid = d.begin() + static_cast<long>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

}  // namespace causelab
