#pragma once

#include "causelab/dataset.hpp"
#include "causelab/error.hpp"
#include "causelab/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace causelab {

// ---------------------------------------------------------------- kernels

struct GaussianKernel {
  double bandwidth = 1.0;  // k(x, x') = exp(-|x - x'|^2 / (2 bandwidth^2))
};
struct PolynomialKernel {
  int degree = 2;
  double offset = 1.0;  // k(x, x') = (<x, x'> + offset)^degree
};
struct LinearKernel {};

class Kernel {
 public:
  using Variant = std::variant<GaussianKernel, PolynomialKernel, LinearKernel>;

  Kernel() : Kernel(LinearKernel{}) {}
  Kernel(Variant spec);  // NOLINT: implicit wrapper

  static Kernel gaussian(double bandwidth) { return Kernel(GaussianKernel{bandwidth}); }
  static Kernel polynomial(int degree, double offset = 1.0) { return Kernel(PolynomialKernel{degree, offset}); }
  static Kernel linear() { return Kernel(LinearKernel{}); }

  const Variant& spec() const { return spec_; }

  template <typename DerivedA, typename DerivedB>
  typename DerivedA::Scalar operator()(const Eigen::MatrixBase<DerivedA>& x,
                                       const Eigen::MatrixBase<DerivedB>& y) const {
    using Scalar = typename DerivedA::Scalar;
    if (const auto* g = std::get_if<GaussianKernel>(&spec_)) {
      return std::exp(-(x - y).squaredNorm() / (Scalar(2) * g->bandwidth * g->bandwidth));
    }
    if (const auto* p = std::get_if<PolynomialKernel>(&spec_)) {
      return std::pow(x.dot(y) + p->offset, p->degree);
    }
    return x.dot(y);
  }

 private:
  Variant spec_;
};

// Rows of `xs` are sample points. Dense O(m^2); m is capped at 5000.
inline constexpr Eigen::Index kMaxGramSize = 5000;

template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> cross_gram(const Kernel& k, const Eigen::MatrixBase<DerivedA>& xs,
                                             const Eigen::MatrixBase<DerivedB>& ys) {
  if (xs.rows() > kMaxGramSize || ys.rows() > kMaxGramSize) {
    throw LimitExceeded("Gram matrix larger than " + std::to_string(kMaxGramSize) + " points");
  }
  Matrix<typename DerivedA::Scalar> g(xs.rows(), ys.rows());
  for (Eigen::Index j = 0; j < ys.rows(); ++j) {
    for (Eigen::Index i = 0; i < xs.rows(); ++i) g(i, j) = k(xs.row(i), ys.row(j));
  }
  return g;
}

template <typename Derived>
Matrix<typename Derived::Scalar> gram(const Kernel& k, const Eigen::MatrixBase<Derived>& xs) {
  if (xs.rows() == 0) throw InvalidInput("gram: empty sample");
  if (xs.rows() > kMaxGramSize) {
    throw LimitExceeded("Gram matrix larger than " + std::to_string(kMaxGramSize) + " points");
  }
  const Eigen::Index n = xs.rows();
  Matrix<typename Derived::Scalar> g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      g(i, j) = k(xs.row(i), xs.row(j));
      g(j, i) = g(i, j);
    }
  }
  return g;
}

// Gaussian kernel with the median pairwise distance as bandwidth. Falls back
// to 1 when all points coincide.
Kernel median_heuristic_kernel(const Eigen::Ref<const Eigen::MatrixXd>& xs);

// HKH with H = I - 11'/m.
Eigen::MatrixXd center_gram(const Eigen::Ref<const Eigen::MatrixXd>& k);

// ---------------------------------------------------------------- tests

struct EmbeddingDistance {
  double statistic = 0.0;  // biased squared MMD, >= 0
  double unbiased = 0.0;   // U-statistic; may dip slightly below zero
  double p_value = 1.0;
  int permutations = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultPermutations = 500;

// Permutation p-values are (1 + #{perm >= observed}) / (1 + perms).
EmbeddingDistance mmd(const Kernel& k, const Eigen::Ref<const Eigen::MatrixXd>& xs,
                      const Eigen::Ref<const Eigen::MatrixXd>& ys, int permutations = kDefaultPermutations,
                      std::uint64_t seed = 0);

// <mu(X), f> for f = sum_j coeffs[j] k(anchors_j, .), i.e. (1/m) sum_i f(x_i).
double mean_map_apply(const Kernel& k, const Eigen::Ref<const Eigen::MatrixXd>& xs,
                      const Eigen::Ref<const Eigen::MatrixXd>& anchors, const Eigen::Ref<const Eigen::VectorXd>& coeffs);

struct CiTestResult {
  std::string test;
  double statistic = 0.0;
  double p_value = 1.0;
  int conditioning_size = 0;

  bool rejects(double alpha) const { return p_value <= alpha; }
};

// HSIC = trace(K H L H) / m^2, p-value by permuting the pairing of ys.
CiTestResult hsic_test(const Kernel& kx, const Kernel& ky, const Eigen::Ref<const Eigen::MatrixXd>& xs,
                       const Eigen::Ref<const Eigen::MatrixXd>& ys, int permutations = kDefaultPermutations,
                       std::uint64_t seed = 0);
// Median-heuristic Gaussian kernels on both sides.
CiTestResult hsic_test(const Eigen::Ref<const Eigen::MatrixXd>& xs, const Eigen::Ref<const Eigen::MatrixXd>& ys,
                       int permutations = kDefaultPermutations, std::uint64_t seed = 0);

enum class CiMethod { kPartialCorrelation, kKernelResidual };

struct CiOptions {
  CiMethod method = CiMethod::kPartialCorrelation;
  double alpha = 0.05;
  int max_conditioning = 4;
  int permutations = kDefaultPermutations;
  std::uint64_t seed = 0;
  // Ridge penalty is ridge_factor * m.
  double ridge_factor = 1e-3;
};

CiTestResult ci_test(const Dataset& data, const std::string& a, const std::string& b,
                     const std::vector<std::string>& z, const CiOptions& options = {});

// Kernel ridge regression residuals y - K (K + lambda I)^-1 y after centering y.
Eigen::VectorXd kernel_ridge_residuals(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                       const Eigen::Ref<const Eigen::VectorXd>& y, double ridge_factor = 1e-3);

// R_emp + sqrt((h (log(2m/h) + 1) + log(4/delta)) / m).
double vc_bound(double empirical_risk, int vc_dimension, long long samples, double delta);

}  // namespace causelab
