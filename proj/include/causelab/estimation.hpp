#pragma once

#include "causelab/dataset.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace causelab {

struct EffectEstimate {
  std::string estimator;
  double ate = 0.0;
  std::optional<double> std_error;
  std::map<std::string, double> cate;  // covariate pattern, e.g. "Z=1", -> contrast
  std::map<std::string, double> diagnostics;
  std::uint64_t seed = 0;
};

enum class Regressor { kLinear, kKernelRidge };

// Difference of group means.
EffectEstimate ate_rct(const Dataset& data, const std::string& y, const std::string& t);

// Fits f(z, t), imputes the missing potential outcome of every unit and
// averages the contrasts. The linear model includes t x z interactions.
EffectEstimate ate_regression_adjustment(const Dataset& data, const std::string& y, const std::string& t,
                                         const std::vector<std::string>& z, Regressor regressor = Regressor::kLinear,
                                         double ridge_factor = 1e-3);

// Nearest neighbour from the other group on standardized covariates
// (Euclidean). With discrete covariates exact ties are the norm: kAverage uses
// the mean outcome of every equidistant match, kLowestIndex keeps only the
// first one.
enum class MatchingTies { kAverage, kLowestIndex };
EffectEstimate ate_nn_matching(const Dataset& data, const std::string& y, const std::string& t,
                               const std::vector<std::string>& z, MatchingTies ties = MatchingTies::kAverage);

// Within-stratum mean differences weighted by stratum size. Strata are either
// distinct covariate patterns or quantile bins of a fitted propensity score.
struct Strata {
  enum class Kind { kCovariatePattern, kPropensityBins } kind = Kind::kCovariatePattern;
  std::vector<std::string> covariates;
  int bins = 5;
};
EffectEstimate ate_stratified(const Dataset& data, const std::string& y, const std::string& t, const Strata& strata);

struct PropensityModel {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;  // on the original covariate scale
  std::vector<std::string> covariates;
  int iterations = 0;
  bool converged = false;

  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& z) const;
  Eigen::VectorXd predict(const Dataset& data) const;
};

// Logistic regression by damped Newton on standardized covariates.
PropensityModel fit_propensity(const Dataset& data, const std::string& t, const std::vector<std::string>& z);

enum class IpwNormalization {
  kHajek,            // weights normalized to sum to one within each arm
  kHorvitzThompson,  // sums divided by the total row count
};

struct IpwOptions {
  double epsilon = 0.01;
  IpwNormalization normalization = IpwNormalization::kHajek;
};

// Either a fitted model or known per-row propensities.
EffectEstimate ate_ipw(const Dataset& data, const std::string& y, const std::string& t,
                       const Eigen::Ref<const Eigen::VectorXd>& propensity, const IpwOptions& options = {});
EffectEstimate ate_ipw(const Dataset& data, const std::string& y, const std::string& t,
                       const std::vector<std::string>& z, const IpwOptions& options = {});

// Plug-in front-door estimate from empirical frequencies of discrete t, m.
EffectEstimate ate_front_door(const Dataset& data, const std::string& y, const std::string& t,
                              const std::string& mediator);

inline constexpr double kWeakInstrumentT = 3.0;

EffectEstimate ate_iv_2sls(const Dataset& data, const std::string& y, const std::string& t,
                           const std::string& instrument);

// Local linear fits on [c - eps, c) and [c, c + eps]; the estimate is the gap
// between their values at c.
EffectEstimate ate_rdd(const Dataset& data, const std::string& y, const std::string& score, double cutoff,
                       double epsilon);

// target - E[target | siblings].
Eigen::VectorXd half_sibling_regress(const Eigen::Ref<const Eigen::VectorXd>& target,
                                     const Eigen::Ref<const Eigen::MatrixXd>& siblings,
                                     Regressor regressor = Regressor::kLinear, double ridge_factor = 1e-3);

}  // namespace causelab
