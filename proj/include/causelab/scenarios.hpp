#pragma once

#include "causelab/cgm.hpp"
#include "causelab/dataset.hpp"
#include "causelab/scm.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace causelab {

// A named generating SCM together with the facts a test needs to check
// against: which columns are hidden, the true effect or direction, and any
// closed-form quantities (naive contrasts, biased slopes).
struct Scenario {
  std::string name;
  Scm scm;
  std::vector<std::string> hidden;
  std::map<std::string, double> parameters;
  std::map<std::string, double> truth;
  std::optional<std::string> treatment;
  std::optional<std::string> outcome;
  std::optional<std::string> direction;  // for cause-effect pairs: "forward" means first -> second
  std::vector<std::string> observed() const;
};

// genes-confounded, simpson-reversal, faithfulness-violation, frontdoor,
// iv-linear, halfsibling, anm-nonlinear, plus the helpers confounded-linear,
// collider, chain and rdd. Unknown parameter keys are rejected.
std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name, const std::map<std::string, double>& overrides = {});

// Samples the SCM and drops hidden columns.
Dataset generate(const Scenario& s, Eigen::Index n, std::uint64_t seed);

// The frontdoor scenario as a discrete model with the confounder visible
// (order H, T, M, Y); the oracle for front-door estimates.
DiscreteCgm frontdoor_cgm(const std::map<std::string, double>& overrides = {});

}  // namespace causelab
