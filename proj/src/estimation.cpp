#include "causelab/estimation.hpp"

#include "causelab/error.hpp"
#include "causelab/kernel.hpp"
#include "causelab/linalg.hpp"
#include "causelab/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace causelab {

namespace {

struct Arms {
  std::vector<int> treated;
  std::vector<int> control;
};

Arms split_arms(const Dataset& data, const std::string& t) {
  const auto& col = data.column(t);
  Arms arms;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (col[i] == 1.0) {
      arms.treated.push_back(static_cast<int>(i));
    } else if (col[i] == 0.0) {
      arms.control.push_back(static_cast<int>(i));
    } else {
      throw InvalidInput("treatment column '" + t + "' must be binary (0/1)");
    }
  }
  if (arms.treated.empty()) throw PreconditionFailed("no treated units in '" + t + "'");
  if (arms.control.empty()) throw PreconditionFailed("no control units in '" + t + "'");
  return arms;
}

void add_group_sizes(EffectEstimate& e, const Arms& arms) {
  e.diagnostics["m0"] = static_cast<double>(arms.control.size());
  e.diagnostics["m1"] = static_cast<double>(arms.treated.size());
}

double mean_of(const Eigen::VectorXd& v, const std::vector<int>& rows) {
  double s = 0.0;
  for (int r : rows) s += v[r];
  return s / static_cast<double>(rows.size());
}

double variance_of(const Eigen::VectorXd& v, const std::vector<int>& rows, double mean) {
  if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (int r : rows) s += (v[r] - mean) * (v[r] - mean);
  return s / static_cast<double>(rows.size() - 1);
}

std::string pattern_label(const std::vector<std::string>& names, const Eigen::RowVectorXd& values) {
  std::ostringstream out;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (k > 0) out << ',';
    out << names[k] << '=' << values[static_cast<Eigen::Index>(k)];
  }
  return out.str();
}

bool all_discrete(const Dataset& data, const std::vector<std::string>& z) {
  if (z.empty()) return false;
  return std::all_of(z.begin(), z.end(), [&](const std::string& c) { return data.type(c) != ColumnType::kReal; });
}

void check_columns(const Dataset& data, const std::vector<std::string>& names) {
  for (const auto& n : names) (void)data.index_of(n);
}

constexpr std::size_t kMaxCatePatterns = 64;

// Per-unit imputed contrasts f(z,1) - f(z,0) averaged by covariate pattern.
void fill_cate(EffectEstimate& e, const Dataset& data, const std::vector<std::string>& z,
               const Eigen::VectorXd& contrast) {
  if (!all_discrete(data, z)) return;
  const Eigen::MatrixXd zm = data.matrix(z);
  std::map<std::vector<double>, std::pair<double, int>> acc;
  for (Eigen::Index r = 0; r < zm.rows(); ++r) {
    auto& slot = acc[std::vector<double>(zm.row(r).begin(), zm.row(r).end())];
    slot.first += contrast[r];
    slot.second += 1;
    if (acc.size() > kMaxCatePatterns) return;
  }
  for (const auto& [key, sum] : acc) {
    Eigen::RowVectorXd v = Eigen::Map<const Eigen::RowVectorXd>(key.data(), static_cast<Eigen::Index>(key.size()));
    e.cate[pattern_label(z, v)] = sum.first / sum.second;
  }
}

}  // namespace

EffectEstimate ate_rct(const Dataset& data, const std::string& y, const std::string& t) {
  const auto arms = split_arms(data, t);
  const auto& yv = data.column(y);
  EffectEstimate e;
  e.estimator = "rct";
  const double m1 = mean_of(yv, arms.treated);
  const double m0 = mean_of(yv, arms.control);
  e.ate = m1 - m0;
  const double v1 = variance_of(yv, arms.treated, m1);
  const double v0 = variance_of(yv, arms.control, m0);
  if (std::isfinite(v1) && std::isfinite(v0)) {
    e.std_error = std::sqrt(v1 / static_cast<double>(arms.treated.size()) +
                            v0 / static_cast<double>(arms.control.size()));
  }
  add_group_sizes(e, arms);
  return e;
}

EffectEstimate ate_regression_adjustment(const Dataset& data, const std::string& y, const std::string& t,
                                         const std::vector<std::string>& z, Regressor regressor, double ridge_factor) {
  check_columns(data, z);
  const auto arms = split_arms(data, t);
  const auto& yv = data.column(y);
  const auto& tv = data.column(t);
  const Eigen::MatrixXd zm = data.matrix(z);
  const Eigen::Index m = data.rows();
  const auto p = zm.cols();

  EffectEstimate e;
  add_group_sizes(e, arms);
  Eigen::VectorXd y1(m);
  Eigen::VectorXd y0(m);

  if (regressor == Regressor::kLinear) {
    e.estimator = "regression-adjustment-linear";
    Eigen::MatrixXd design(m, 2 + 2 * p);
    design.col(0).setOnes();
    design.col(1) = tv;
    design.middleCols(2, p) = zm;
    design.rightCols(p) = zm.array().colwise() * tv.array();
    const auto fit = least_squares(design, yv);
    Eigen::MatrixXd d1 = design;
    Eigen::MatrixXd d0 = design;
    d1.col(1).setOnes();
    d1.rightCols(p) = zm;
    d0.col(1).setZero();
    d0.rightCols(p).setZero();
    y1 = d1 * fit.coefficients;
    y0 = d0 * fit.coefficients;
    // The contrast is linear in the coefficients: c'beta with c = mean(d1 - d0).
    const Eigen::VectorXd c = (d1 - d0).colwise().mean().transpose();
    e.std_error = std::sqrt(std::max(0.0, c.dot(fit.covariance * c)));
  } else {
    e.estimator = "regression-adjustment-kernel-ridge";
    if (!(ridge_factor > 0)) throw InvalidInput("ridge factor must be positive");
    if (p == 0) {
      y1.setConstant(mean_of(yv, arms.treated));
      y0.setConstant(mean_of(yv, arms.control));
    } else {
      const Eigen::MatrixXd zs = standardize(zm).values;
      const Kernel k = median_heuristic_kernel(zs.topRows(std::min<Eigen::Index>(m, 2000)));
      auto fit_arm = [&](const std::vector<int>& rows, Eigen::VectorXd& out) {
        const auto r = static_cast<Eigen::Index>(rows.size());
        if (r > kMaxGramSize) {
          throw LimitExceeded("kernel-ridge adjustment supports at most " + std::to_string(kMaxGramSize) +
                              " rows per arm");
        }
        Eigen::MatrixXd za(r, p);
        Eigen::VectorXd ya(r);
        for (Eigen::Index i = 0; i < r; ++i) {
          za.row(i) = zs.row(rows[static_cast<std::size_t>(i)]);
          ya[i] = yv[rows[static_cast<std::size_t>(i)]];
        }
        const double mu = ya.mean();
        Eigen::MatrixXd reg = gram(k, za);
        reg.diagonal().array() += ridge_factor * static_cast<double>(r);
        const Eigen::VectorXd alpha = reg.llt().solve((ya.array() - mu).matrix());
        for (Eigen::Index start = 0; start < m; start += 1000) {
          const Eigen::Index len = std::min<Eigen::Index>(1000, m - start);
          out.segment(start, len) = (cross_gram(k, zs.middleRows(start, len), za) * alpha).array() + mu;
        }
      };
      fit_arm(arms.treated, y1);
      fit_arm(arms.control, y0);
    }
  }

  // Factual outcomes for the observed arm, imputed ones for the other.
  double sum = 0.0;
  for (int r : arms.treated) sum += yv[r] - y0[r];
  for (int r : arms.control) sum += y1[r] - yv[r];
  e.ate = sum / static_cast<double>(m);
  fill_cate(e, data, z, y1 - y0);
  return e;
}

EffectEstimate ate_nn_matching(const Dataset& data, const std::string& y, const std::string& t,
                               const std::vector<std::string>& z, MatchingTies ties) {
  check_columns(data, z);
  const auto arms = split_arms(data, t);
  const auto& yv = data.column(y);
  const Eigen::MatrixXd zs = standardize(data.matrix(z)).values;
  const Eigen::Index m = data.rows();

  // Counterfactual outcome for each unit from its nearest match(es).
  Eigen::VectorXd matched(m);
  Eigen::VectorXd match_count(m);
  auto match = [&](const std::vector<int>& units, const std::vector<int>& pool) {
    parallel_for(static_cast<int>(units.size()), [&](int u) {
      const int i = units[static_cast<std::size_t>(u)];
      double best = std::numeric_limits<double>::infinity();
      double sum = 0.0;
      int count = 0;
      for (int j : pool) {
        const double d = (zs.row(i) - zs.row(j)).squaredNorm();
        if (d < best) {
          best = d;
          sum = yv[j];
          count = 1;
        } else if (d == best && ties == MatchingTies::kAverage) {
          sum += yv[j];
          ++count;
        }
      }
      matched[i] = sum / count;
      match_count[i] = count;
    });
  };
  match(arms.treated, arms.control);
  match(arms.control, arms.treated);

  double total = 0.0;
  for (int r : arms.treated) total += yv[r] - matched[r];
  for (int r : arms.control) total += matched[r] - yv[r];
  EffectEstimate e;
  e.estimator = ties == MatchingTies::kAverage ? "nn-matching" : "nn-matching-lowest-index";
  e.ate = total / static_cast<double>(m);
  add_group_sizes(e, arms);
  e.diagnostics["mean_matches_per_unit"] = match_count.mean();
  return e;
}

PropensityModel fit_propensity(const Dataset& data, const std::string& t, const std::vector<std::string>& z) {
  check_columns(data, z);
  const auto arms = split_arms(data, t);
  const auto& tv = data.column(t);
  const Eigen::MatrixXd zm = data.matrix(z);
  const auto p = zm.cols();
  const auto st = standardize(zm);
  for (Eigen::Index j = 0; j < p; ++j) {
    if ((zm.col(j).array() == zm(0, j)).all()) {
      throw SingularSystem("fit_propensity: covariate '" + z[static_cast<std::size_t>(j)] + "' is constant");
    }
  }
  const Eigen::MatrixXd x = with_intercept(st.values);
  const Eigen::Index m = x.rows();

  auto log_lik = [&](const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      // log sigma(eta) = -log1p(exp(-eta)), evaluated stably.
      const double e = eta[i];
      const double log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
      ll += tv[i] * e - log1pexp;
    }
    return ll;
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  const double rate = static_cast<double>(arms.treated.size()) / static_cast<double>(m);
  beta[0] = std::log(rate / (1.0 - rate));
  Eigen::VectorXd eta = x * beta;
  double ll = log_lik(eta);
  PropensityModel model;
  model.covariates = z;
  constexpr int kMaxIterations = 100;
  for (int it = 1; it <= kMaxIterations; ++it) {
    model.iterations = it;
    const Eigen::VectorXd prob = eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
    const Eigen::VectorXd w = prob.array() * (1.0 - prob.array());
    const Eigen::VectorXd grad = x.transpose() * (tv - prob);
    const Eigen::MatrixXd hess = x.transpose() * w.asDiagonal() * x;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
    Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) break;
    double factor = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      const Eigen::VectorXd trial = beta + factor * step;
      const Eigen::VectorXd trial_eta = x * trial;
      const double trial_ll = log_lik(trial_eta);
      if (trial_ll >= ll - 1e-12 * std::abs(ll)) {
        beta = trial;
        eta = trial_eta;
        const double gain = trial_ll - ll;
        ll = trial_ll;
        accepted = true;
        if ((factor * step).cwiseAbs().maxCoeff() < 1e-10 || gain < 1e-13 * std::max(1.0, std::abs(ll))) {
          model.converged = true;
        }
        break;
      }
      factor *= 0.5;
    }
    if (!accepted || model.converged) break;
  }

  // Perfect classification with huge linear predictors means the MLE runs
  // off to infinity.
  bool separated = eta.cwiseAbs().maxCoeff() > 25.0;
  if (separated) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if ((eta[i] > 0) != (tv[i] == 1.0)) {
        separated = false;
        break;
      }
    }
  }
  if (separated || !model.converged) {
    throw SeparationDetected("fit_propensity: logistic MLE did not converge (treatment separated by covariates)");
  }
  model.coefficients = beta.tail(p).array() / st.scale.array();
  model.intercept = beta[0] - model.coefficients.dot(st.mean);
  return model;
}

double PropensityModel::operator()(const Eigen::Ref<const Eigen::RowVectorXd>& z) const {
  if (z.size() != coefficients.size()) throw InvalidInput("propensity: covariate count mismatch");
  const double eta = intercept + z.dot(coefficients.transpose());
  return 1.0 / (1.0 + std::exp(-eta));
}

Eigen::VectorXd PropensityModel::predict(const Dataset& data) const {
  const Eigen::MatrixXd zm = data.matrix(covariates);
  const Eigen::VectorXd eta = (zm * coefficients).array() + intercept;
  return eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
}

EffectEstimate ate_stratified(const Dataset& data, const std::string& y, const std::string& t, const Strata& strata) {
  check_columns(data, strata.covariates);
  const auto arms = split_arms(data, t);
  const auto& yv = data.column(y);
  const auto& tv = data.column(t);
  const Eigen::Index m = data.rows();

  std::vector<std::vector<double>> keys(static_cast<std::size_t>(m));
  EffectEstimate e;
  if (strata.kind == Strata::Kind::kCovariatePattern) {
    e.estimator = "stratified-covariates";
    const Eigen::MatrixXd zm = data.matrix(strata.covariates);
    for (Eigen::Index r = 0; r < m; ++r) keys[static_cast<std::size_t>(r)].assign(zm.row(r).begin(), zm.row(r).end());
  } else {
    e.estimator = "stratified-propensity";
    if (strata.bins < 1) throw InvalidInput("stratification needs at least one bin");
    const Eigen::VectorXd s = fit_propensity(data, t, strata.covariates).predict(data);
    std::vector<double> sorted(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts;
    for (int k = 1; k < strata.bins; ++k) {
      cuts.push_back(sorted[static_cast<std::size_t>(static_cast<long long>(k) * m / strata.bins)]);
    }
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto bin = std::upper_bound(cuts.begin(), cuts.end(), s[r]) - cuts.begin();
      keys[static_cast<std::size_t>(r)] = {static_cast<double>(bin)};
    }
    e.diagnostics["bins"] = strata.bins;
  }

  struct Acc {
    double s1 = 0, s0 = 0, q1 = 0, q0 = 0;
    int n1 = 0, n0 = 0;
  };
  std::map<std::vector<double>, Acc> acc;
  for (Eigen::Index r = 0; r < m; ++r) {
    auto& a = acc[keys[static_cast<std::size_t>(r)]];
    if (tv[r] == 1.0) {
      a.s1 += yv[r];
      a.q1 += yv[r] * yv[r];
      ++a.n1;
    } else {
      a.s0 += yv[r];
      a.q0 += yv[r] * yv[r];
      ++a.n0;
    }
  }
  double weighted = 0.0;
  double weight = 0.0;
  double var = 0.0;
  bool have_var = true;
  int dropped = 0;
  int dropped_rows = 0;
  for (const auto& [key, a] : acc) {
    if (a.n1 == 0 || a.n0 == 0) {
      ++dropped;
      dropped_rows += a.n1 + a.n0;
      continue;
    }
    const double mk = a.n1 + a.n0;
    const double mu1 = a.s1 / a.n1;
    const double mu0 = a.s0 / a.n0;
    weighted += mk * (mu1 - mu0);
    weight += mk;
    if (a.n1 > 1 && a.n0 > 1) {
      const double v1 = (a.q1 - a.n1 * mu1 * mu1) / (a.n1 - 1);
      const double v0 = (a.q0 - a.n0 * mu0 * mu0) / (a.n0 - 1);
      var += mk * mk * (std::max(0.0, v1) / a.n1 + std::max(0.0, v0) / a.n0);
    } else {
      have_var = false;
    }
  }
  if (weight == 0) throw OverlapViolation("stratification: no stratum contains both treated and control units");
  e.ate = weighted / weight;
  if (have_var) e.std_error = std::sqrt(var) / weight;
  add_group_sizes(e, arms);
  e.diagnostics["strata"] = static_cast<double>(acc.size());
  e.diagnostics["strata_dropped"] = dropped;
  e.diagnostics["rows_dropped"] = dropped_rows;
  return e;
}

EffectEstimate ate_ipw(const Dataset& data, const std::string& y, const std::string& t,
                       const Eigen::Ref<const Eigen::VectorXd>& propensity, const IpwOptions& options) {
  const auto arms = split_arms(data, t);
  if (propensity.size() != data.rows()) throw InvalidInput("ipw: one propensity per row required");
  if (!(options.epsilon >= 0 && options.epsilon < 0.5)) throw InvalidInput("ipw: epsilon must lie in [0, 0.5)");
  const auto& yv = data.column(y);
  const auto& tv = data.column(t);
  const Eigen::Index m = data.rows();
  int clipped = 0;
  double s1 = 0, w1 = 0, s0 = 0, w0 = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double s = propensity[i];
    if (!(s >= 0 && s <= 1)) throw InvalidInput("ipw: propensities must lie in [0, 1]");
    if (s < options.epsilon || s > 1.0 - options.epsilon) {
      s = std::clamp(s, options.epsilon, 1.0 - options.epsilon);
      ++clipped;
    }
    if (s <= 0.0 || s >= 1.0) throw OverlapViolation("ipw: propensity of 0 or 1 with epsilon = 0");
    if (tv[i] == 1.0) {
      s1 += yv[i] / s;
      w1 += 1.0 / s;
    } else {
      s0 += yv[i] / (1.0 - s);
      w0 += 1.0 / (1.0 - s);
    }
  }
  EffectEstimate e;
  if (options.normalization == IpwNormalization::kHajek) {
    e.estimator = "ipw-hajek";
    e.ate = s1 / w1 - s0 / w0;
  } else {
    e.estimator = "ipw-horvitz-thompson";
    e.ate = (s1 - s0) / static_cast<double>(m);
  }
  add_group_sizes(e, arms);
  e.diagnostics["clipped"] = clipped;
  e.diagnostics["epsilon"] = options.epsilon;
  e.diagnostics["min_propensity"] = propensity.minCoeff();
  e.diagnostics["max_propensity"] = propensity.maxCoeff();
  return e;
}

EffectEstimate ate_ipw(const Dataset& data, const std::string& y, const std::string& t,
                       const std::vector<std::string>& z, const IpwOptions& options) {
  const auto model = fit_propensity(data, t, z);
  auto e = ate_ipw(data, y, t, model.predict(data), options);
  e.estimator += "-fitted";
  e.diagnostics["propensity_iterations"] = model.iterations;
  return e;
}

EffectEstimate ate_front_door(const Dataset& data, const std::string& y, const std::string& t,
                              const std::string& mediator) {
  const auto arms = split_arms(data, t);
  const auto& yv = data.column(y);
  const auto& tv = data.column(t);
  const auto& mv = data.column(mediator);
  const Eigen::Index n = data.rows();
  std::set<double> mvals(mv.begin(), mv.end());
  if (mvals.size() > 64) throw InvalidInput("front-door: mediator must be discrete (at most 64 values)");
  const std::vector<double> ms(mvals.begin(), mvals.end());
  const auto k = ms.size();
  // count[t][m], ysum[t][m]
  std::vector<std::array<double, 2>> count(k, {0, 0});
  std::vector<std::array<double, 2>> ysum(k, {0, 0});
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto mi = static_cast<std::size_t>(std::lower_bound(ms.begin(), ms.end(), mv[i]) - ms.begin());
    const auto ti = tv[i] == 1.0 ? 1 : 0;
    count[mi][ti] += 1;
    ysum[mi][ti] += yv[i];
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (int a = 0; a < 2; ++a) {
      if (count[j][static_cast<std::size_t>(a)] == 0) {
        std::ostringstream msg;
        msg << "front-door: empty cell " << t << '=' << a << ", " << mediator << '=' << ms[j];
        throw OverlapViolation(msg.str());
      }
    }
  }
  const double m1 = static_cast<double>(arms.treated.size());
  const double m0 = static_cast<double>(arms.control.size());
  const std::array<double, 2> pt{m0 / static_cast<double>(n), m1 / static_cast<double>(n)};
  auto do_mean = [&](int a) {
    const double ma = a == 1 ? m1 : m0;
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double pm = count[j][static_cast<std::size_t>(a)] / ma;
      double inner = 0.0;
      for (std::size_t b = 0; b < 2; ++b) inner += pt[b] * ysum[j][b] / count[j][b];
      total += pm * inner;
    }
    return total;
  };
  EffectEstimate e;
  e.estimator = "front-door";
  e.ate = do_mean(1) - do_mean(0);
  add_group_sizes(e, arms);
  e.diagnostics["naive_contrast"] = mean_of(yv, arms.treated) - mean_of(yv, arms.control);
  e.diagnostics["mediator_levels"] = static_cast<double>(k);
  return e;
}

EffectEstimate ate_iv_2sls(const Dataset& data, const std::string& y, const std::string& t,
                           const std::string& instrument) {
  const auto& yv = data.column(y);
  const auto& tv = data.column(t);
  const auto& iv = data.column(instrument);
  const Eigen::Index n = data.rows();
  Eigen::MatrixXd x1(n, 2);
  x1.col(0).setOnes();
  x1.col(1) = iv;
  const auto first = least_squares(x1, tv);
  const double t_stat = first.coefficients[1] / first.standard_error(1);
  if (!(std::abs(t_stat) >= kWeakInstrumentT)) {
    std::ostringstream msg;
    msg << "2sls: weak instrument, first-stage t-statistic " << t_stat << " below " << kWeakInstrumentT;
    throw WeakInstrument(msg.str());
  }
  Eigen::MatrixXd x2(n, 2);
  x2.col(0).setOnes();
  x2.col(1) = x1 * first.coefficients;
  const auto second = least_squares(x2, yv);
  // Structural residuals use the observed treatment.
  const Eigen::VectorXd u = yv.array() - second.coefficients[0] - second.coefficients[1] * tv.array();
  const double sigma2 = u.squaredNorm() / static_cast<double>(n - 2);
  const Eigen::Matrix2d xtx = x2.transpose() * x2;
  Eigen::MatrixXd xt(n, 2);
  xt.col(0).setOnes();
  xt.col(1) = tv;

  EffectEstimate e;
  e.estimator = "iv-2sls";
  e.ate = second.coefficients[1];
  e.std_error = std::sqrt(sigma2 * xtx.inverse()(1, 1));
  e.diagnostics["first_stage_coefficient"] = first.coefficients[1];
  e.diagnostics["first_stage_t"] = t_stat;
  e.diagnostics["naive_ols_slope"] = least_squares(xt, yv).coefficients[1];
  e.diagnostics["rows"] = static_cast<double>(n);
  return e;
}

EffectEstimate ate_rdd(const Dataset& data, const std::string& y, const std::string& score, double cutoff,
                       double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw InvalidInput("rdd: window epsilon must be positive");
  const auto& yv = data.column(y);
  const auto& sv = data.column(score);
  std::vector<int> left;
  std::vector<int> right;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] >= cutoff - epsilon && sv[i] < cutoff) left.push_back(static_cast<int>(i));
    if (sv[i] >= cutoff && sv[i] <= cutoff + epsilon) right.push_back(static_cast<int>(i));
  }
  auto boundary = [&](const std::vector<int>& rows, const char* side) {
    if (rows.size() < 3) {
      throw PreconditionFailed(std::string("rdd: fewer than 3 points on the ") + side + " side of the cutoff");
    }
    const auto r = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd x(r, 2);
    Eigen::VectorXd yy(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      x(i, 0) = 1.0;
      x(i, 1) = sv[rows[static_cast<std::size_t>(i)]] - cutoff;
      yy[i] = yv[rows[static_cast<std::size_t>(i)]];
    }
    return least_squares(x, yy);
  };
  const auto fl = boundary(left, "left");
  const auto fr = boundary(right, "right");
  EffectEstimate e;
  e.estimator = "rdd";
  e.ate = fr.coefficients[0] - fl.coefficients[0];
  e.std_error = std::sqrt(fl.covariance(0, 0) + fr.covariance(0, 0));
  e.diagnostics["cutoff"] = cutoff;
  e.diagnostics["epsilon"] = epsilon;
  e.diagnostics["n_left"] = static_cast<double>(left.size());
  e.diagnostics["n_right"] = static_cast<double>(right.size());
  return e;
}

Eigen::VectorXd half_sibling_regress(const Eigen::Ref<const Eigen::VectorXd>& target,
                                     const Eigen::Ref<const Eigen::MatrixXd>& siblings, Regressor regressor,
                                     double ridge_factor) {
  if (siblings.rows() != target.size()) throw InvalidInput("half-sibling: row mismatch");
  if (siblings.cols() == 0) return target.array() - target.mean();
  if (regressor == Regressor::kLinear) return least_squares(with_intercept(siblings), target).residuals;
  return kernel_ridge_residuals(standardize(siblings).values, target, ridge_factor);
}

}  // namespace causelab
