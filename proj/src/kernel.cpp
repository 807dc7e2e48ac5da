#include "causelab/kernel.hpp"

#include "causelab/parallel.hpp"
#include "causelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace causelab {

Kernel::Kernel(Variant spec) : spec_(spec) {
  if (const auto* g = std::get_if<GaussianKernel>(&spec_)) {
    if (!(g->bandwidth > 0) || !std::isfinite(g->bandwidth)) throw InvalidInput("kernel bandwidth must be positive");
  }
  if (const auto* p = std::get_if<PolynomialKernel>(&spec_)) {
    if (p->degree < 1) throw InvalidInput("polynomial kernel degree must be >= 1");
  }
}

Kernel median_heuristic_kernel(const Eigen::Ref<const Eigen::MatrixXd>& xs) {
  double bw = median_pairwise_distance(xs);
  if (!(bw > 0)) {
    double sum = 0.0;
    long count = 0;
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < xs.rows(); ++j) {
        const double d = (xs.row(i) - xs.row(j)).norm();
        if (d > 0) {
          sum += d;
          ++count;
        }
      }
    }
    bw = count > 0 ? sum / static_cast<double>(count) : 1.0;
  }
  return Kernel::gaussian(bw);
}

Eigen::MatrixXd center_gram(const Eigen::Ref<const Eigen::MatrixXd>& k) {
  const Eigen::VectorXd row_mean = k.rowwise().mean();
  const Eigen::RowVectorXd col_mean = k.colwise().mean();
  const double grand = k.mean();
  Eigen::MatrixXd out = k;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean;
  out.array() += grand;
  return out;
}

namespace {

// (1 + #{null >= observed}) / (1 + perms). A tiny relative slack keeps
// permutations that reproduce the observed statistic up to rounding counted.
double permutation_p_value(double observed, const std::vector<double>& null) {
  const double slack = 1e-12 * std::max(1.0, std::abs(observed));
  const auto hits = std::count_if(null.begin(), null.end(), [&](double s) { return s >= observed - slack; });
  return (1.0 + static_cast<double>(hits)) / (1.0 + static_cast<double>(null.size()));
}

void check_permutations(int permutations) {
  if (permutations < 1) throw InvalidInput("permutation count must be >= 1");
}

}  // namespace

EmbeddingDistance mmd(const Kernel& k, const Eigen::Ref<const Eigen::MatrixXd>& xs,
                      const Eigen::Ref<const Eigen::MatrixXd>& ys, int permutations, std::uint64_t seed) {
  if (xs.rows() == 0 || ys.rows() == 0) throw InvalidInput("mmd: both samples must be nonempty");
  if (xs.cols() != ys.cols()) throw InvalidInput("mmd: samples have different dimension");
  check_permutations(permutations);
  const Eigen::Index m = xs.rows();
  const Eigen::Index n = ys.rows();
  const Eigen::Index total = m + n;
  Eigen::MatrixXd pooled(total, xs.cols());
  pooled << xs, ys;
  const Eigen::MatrixXd g = gram(k, pooled);
  const Eigen::VectorXd col_sum = g.colwise().sum().transpose();
  const double all = col_sum.sum();
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);

  // Given the first-group membership, everything follows from the in-group
  // block sum and the column sums.
  auto biased = [&](const std::vector<int>& first) {
    double sxx = 0.0;
    double cx = 0.0;
    for (int i : first) {
      cx += col_sum[i];
      for (int j : first) sxx += g(i, j);
    }
    const double sxy = cx - sxx;
    const double syy = all - 2.0 * sxy - sxx;
    return sxx / (md * md) + syy / (nd * nd) - 2.0 * sxy / (md * nd);
  };

  std::vector<int> identity(static_cast<std::size_t>(m));
  std::iota(identity.begin(), identity.end(), 0);

  EmbeddingDistance out;
  out.permutations = permutations;
  out.seed = seed;
  out.statistic = std::max(0.0, biased(identity));
  {
    const double sxx = g.topLeftCorner(m, m).sum();
    const double syy = g.bottomRightCorner(n, n).sum();
    const double sxy = g.topRightCorner(m, n).sum();
    const double txx = g.diagonal().head(m).sum();
    const double tyy = g.diagonal().tail(n).sum();
    double u = -2.0 * sxy / (md * nd);
    if (m > 1) u += (sxx - txx) / (md * (md - 1));
    if (n > 1) u += (syy - tyy) / (nd * (nd - 1));
    out.unbiased = u;
  }

  std::vector<double> null(static_cast<std::size_t>(permutations));
  parallel_for(permutations, [&](int p) {
    const auto perm = random_permutation(static_cast<int>(total), seed, static_cast<std::uint64_t>(p));
    std::vector<int> first(perm.begin(), perm.begin() + m);
    null[static_cast<std::size_t>(p)] = biased(first);
  });
  out.p_value = permutation_p_value(out.statistic, null);
  return out;
}

double mean_map_apply(const Kernel& k, const Eigen::Ref<const Eigen::MatrixXd>& xs,
                      const Eigen::Ref<const Eigen::MatrixXd>& anchors, const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
  if (xs.rows() == 0) throw InvalidInput("mean_map_apply: empty sample");
  if (anchors.rows() != coeffs.size()) throw InvalidInput("mean_map_apply: anchors and coefficients differ in length");
  if (anchors.rows() == 0) return 0.0;
  if (anchors.cols() != xs.cols()) throw InvalidInput("mean_map_apply: dimension mismatch");
  const Eigen::MatrixXd kx = cross_gram(k, xs, anchors);
  return (kx * coeffs).mean();
}

CiTestResult hsic_test(const Kernel& kx, const Kernel& ky, const Eigen::Ref<const Eigen::MatrixXd>& xs,
                       const Eigen::Ref<const Eigen::MatrixXd>& ys, int permutations, std::uint64_t seed) {
  if (xs.rows() != ys.rows()) throw InvalidInput("hsic: samples must be paired");
  if (xs.rows() < 20) throw PreconditionFailed("hsic: needs at least 20 paired samples");
  check_permutations(permutations);
  const Eigen::Index m = xs.rows();
  const Eigen::MatrixXd kc = center_gram(gram(kx, xs));
  const Eigen::MatrixXd lc = center_gram(gram(ky, ys));
  const double scale = 1.0 / (static_cast<double>(m) * static_cast<double>(m));

  CiTestResult out;
  out.test = "hsic";
  out.statistic = (kc.array() * lc.array()).sum() * scale;

  std::vector<double> null(static_cast<std::size_t>(permutations));
  parallel_for(permutations, [&](int p) {
    const auto perm = random_permutation(static_cast<int>(m), seed, static_cast<std::uint64_t>(p));
    double s = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto lcol = lc.col(perm[static_cast<std::size_t>(j)]);
      const auto kcol = kc.col(j);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) acc += kcol[i] * lcol[perm[static_cast<std::size_t>(i)]];
      s += acc;
    }
    null[static_cast<std::size_t>(p)] = s * scale;
  });
  out.p_value = permutation_p_value(out.statistic, null);
  return out;
}

CiTestResult hsic_test(const Eigen::Ref<const Eigen::MatrixXd>& xs, const Eigen::Ref<const Eigen::MatrixXd>& ys,
                       int permutations, std::uint64_t seed) {
  return hsic_test(median_heuristic_kernel(xs), median_heuristic_kernel(ys), xs, ys, permutations, seed);
}

Eigen::VectorXd kernel_ridge_residuals(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                       const Eigen::Ref<const Eigen::VectorXd>& y, double ridge_factor) {
  if (x.rows() != y.size()) throw InvalidInput("kernel ridge: row mismatch");
  if (!(ridge_factor > 0)) throw InvalidInput("kernel ridge: ridge factor must be positive");
  const Eigen::VectorXd yc = y.array() - y.mean();
  if (x.cols() == 0) return yc;
  const Eigen::MatrixXd k = gram(median_heuristic_kernel(x), x);
  Eigen::MatrixXd reg = k;
  reg.diagonal().array() += ridge_factor * static_cast<double>(x.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(reg);
  if (llt.info() != Eigen::Success) throw SingularSystem("kernel ridge: regularized Gram matrix not positive definite");
  const Eigen::VectorXd alpha = llt.solve(yc);
  return yc - k * alpha;
}

CiTestResult ci_test(const Dataset& data, const std::string& a, const std::string& b,
                     const std::vector<std::string>& z, const CiOptions& options) {
  if (!(options.alpha > 0 && options.alpha < 1)) throw InvalidInput("ci_test: alpha must lie in (0, 1)");
  if (static_cast<int>(z.size()) > options.max_conditioning) {
    throw LimitExceeded("ci_test: conditioning set larger than " + std::to_string(options.max_conditioning));
  }
  for (const auto& v : z) {
    if (v == a || v == b) throw InvalidInput("ci_test: conditioning set contains a tested variable");
  }
  const Eigen::VectorXd va = data.column(a);
  const Eigen::VectorXd vb = data.column(b);
  const Eigen::MatrixXd vz = data.matrix(z);
  const Eigen::Index n = data.rows();

  CiTestResult out;
  out.conditioning_size = static_cast<int>(z.size());
  if (options.method == CiMethod::kPartialCorrelation) {
    out.test = "partial-correlation";
    const auto dof = static_cast<double>(n) - static_cast<double>(z.size()) - 3.0;
    if (dof <= 0) throw InvalidInput("ci_test: too few rows for the conditioning set");
    const Eigen::MatrixXd design = with_intercept(vz);
    const auto ra = least_squares(design, va).residuals;
    const auto rb = least_squares(design, vb).residuals;
    double r = correlation(ra, rb);
    r = std::clamp(r, -1.0 + 1e-15, 1.0 - 1e-15);
    const double stat = std::sqrt(dof) * std::atanh(r);
    out.statistic = stat;
    out.p_value = std::erfc(std::abs(stat) / std::sqrt(2.0));
    return out;
  }
  out.test = "kernel-residual";
  if (n < 20) throw PreconditionFailed("ci_test: needs at least 20 rows");
  Eigen::VectorXd ra;
  Eigen::VectorXd rb;
  if (z.empty()) {
    ra = va.array() - va.mean();
    rb = vb.array() - vb.mean();
  } else {
    const Eigen::MatrixXd zs = standardize(vz).values;
    ra = kernel_ridge_residuals(zs, va, options.ridge_factor);
    rb = kernel_ridge_residuals(zs, vb, options.ridge_factor);
  }
  const auto h = hsic_test(ra, rb, options.permutations, options.seed);
  out.statistic = h.statistic;
  out.p_value = h.p_value;
  return out;
}

double vc_bound(double empirical_risk, int vc_dimension, long long samples, double delta) {
  if (!(empirical_risk >= 0 && empirical_risk <= 1)) throw InvalidInput("vc_bound: empirical risk must lie in [0, 1]");
  if (vc_dimension < 1) throw InvalidInput("vc_bound: VC dimension must be >= 1");
  if (samples <= vc_dimension) throw InvalidInput("vc_bound: sample count must exceed the VC dimension");
  if (!(delta > 0 && delta < 1)) throw InvalidInput("vc_bound: delta must lie in (0, 1)");
  const auto h = static_cast<double>(vc_dimension);
  const auto m = static_cast<double>(samples);
  return empirical_risk + std::sqrt((h * (std::log(2.0 * m / h) + 1.0) + std::log(4.0 / delta)) / m);
}

}  // namespace causelab
