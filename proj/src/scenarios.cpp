#include "causelab/scenarios.hpp"

#include "causelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace causelab {

namespace {

using Params = std::map<std::string, double>;

Params merge(const std::string& name, Params defaults, const Params& overrides) {
  for (const auto& [k, v] : overrides) {
    const auto it = defaults.find(k);
    if (it == defaults.end()) throw InvalidInput("scenario '" + name + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw InvalidInput("scenario parameter '" + k + "' must be finite");
    it->second = v;
  }
  return defaults;
}

Expr p(const std::string& name) { return Expr::parent(name); }
Expr u() { return Expr::noise(); }
Expr c(double v) { return Expr::constant(v); }

const std::vector<double> kBinary{0.0, 1.0};

Mechanism root(const std::string& name, NoiseSpec noise) { return {name, {}, u(), std::move(noise), std::nullopt}; }

Mechanism bernoulli_root(const std::string& name, double prob) {
  return {name, {}, u(), NoiseSpec::finite({0.0, 1.0}, {1.0 - prob, prob}), kBinary};
}

// name := 1{U <= prob}, U ~ Uniform(0, 1); prob is an expression in the parents.
Mechanism bernoulli(const std::string& name, std::vector<std::string> parents, const Expr& prob) {
  return {name, std::move(parents), indicator_ge(prob - u(), 0.0), NoiseSpec::uniform(0.0, 1.0), kBinary};
}

Scenario genes_confounded(const Params& o) {
  auto prm = merge("genes-confounded", {{"confounder_mean", 2.0}, {"effect", 1.5}, {"noise_sd", 0.5}}, o);
  const double sd = prm["noise_sd"];
  Scenario s;
  s.name = "genes-confounded";
  s.parameters = prm;
  s.scm = Scm({
      root("H", NoiseSpec::gaussian(prm["confounder_mean"], 1.0)),
      {"GeneA", {"H"}, p("H") + u(), NoiseSpec::gaussian(0.0, sd * sd), std::nullopt},
      {"GeneB", {"H"}, p("H") + u(), NoiseSpec::gaussian(0.0, sd * sd), std::nullopt},
      {"Phenotype", {"GeneA"}, prm["effect"] * p("GeneA") + u(), NoiseSpec::gaussian(0.0, sd * sd), std::nullopt},
  });
  s.hidden = {"H"};
  s.treatment = "GeneA";
  s.outcome = "Phenotype";
  // E[P | do(A=0)] - E[P] and E[P | do(B=0)] - E[P].
  s.truth["knockout_shift_GeneA"] = -prm["effect"] * prm["confounder_mean"];
  s.truth["knockout_shift_GeneB"] = 0.0;
  return s;
}

// Binary confounder Z, p(T=1|Z) in {p0, p1}, Y := effect*T + gamma*Z + U.
Scenario binary_confounded(const std::string& name, const Params& prm) {
  const double p0 = prm.at("p_treat_z0");
  const double p1 = prm.at("p_treat_z1");
  const double pz = prm.at("p_z");
  const double effect = prm.at("effect");
  const double gamma = prm.at("gamma");
  Scenario s;
  s.name = name;
  s.parameters = prm;
  s.scm = Scm({
      bernoulli_root("Z", pz),
      bernoulli("T", {"Z"}, c(p0) + (p1 - p0) * p("Z")),
      {"Y", {"T", "Z"}, effect * p("T") + gamma * p("Z") + u(), NoiseSpec::gaussian(0.0, 1.0), std::nullopt},
  });
  s.treatment = "T";
  s.outcome = "Y";
  const double pt = pz * p1 + (1 - pz) * p0;
  const double z_given_t1 = pz * p1 / pt;
  const double z_given_t0 = pz * (1 - p1) / (1 - pt);
  s.truth["ate"] = effect;
  s.truth["naive_contrast"] = effect + gamma * (z_given_t1 - z_given_t0);
  s.truth["propensity_z0"] = p0;
  s.truth["propensity_z1"] = p1;
  return s;
}

Scenario confounded_linear(const Params& o) {
  return binary_confounded("confounded-linear",
                           merge("confounded-linear",
                                 {{"p_z", 0.5}, {"p_treat_z0", 0.2}, {"p_treat_z1", 0.8}, {"effect", 1.0}, {"gamma", 2.0}},
                                 o));
}

Scenario simpson_reversal(const Params& o) {
  return binary_confounded("simpson-reversal",
                           merge("simpson-reversal",
                                 {{"p_z", 0.5}, {"p_treat_z0", 0.1}, {"p_treat_z1", 0.9}, {"effect", -1.0}, {"gamma", 4.0}},
                                 o));
}

Scenario faithfulness_violation(const Params& o) {
  auto prm = merge("faithfulness-violation", {{"alpha", 1.0}, {"beta", -1.0}, {"gamma", 1.0}}, o);
  Scenario s;
  s.name = "faithfulness-violation";
  s.parameters = prm;
  const auto g = NoiseSpec::gaussian(0.0, 1.0);
  s.scm = Scm({
      root("X1", g),
      {"X2", {"X1"}, prm["alpha"] * p("X1") + u(), g, std::nullopt},
      {"X3", {"X1", "X2"}, prm["beta"] * p("X1") + prm["gamma"] * p("X2") + u(), g, std::nullopt},
  });
  // X3 = (beta + alpha gamma) X1 + gamma U2 + U3.
  s.truth["total_effect_X1_X3"] = prm["beta"] + prm["alpha"] * prm["gamma"];
  return s;
}

Scenario frontdoor(const Params& o) {
  auto prm = merge("frontdoor",
                   {{"p_h", 0.5},
                    {"t_base", 0.2},
                    {"t_h", 0.6},
                    {"m_base", 0.1},
                    {"m_t", 0.7},
                    {"y_base", 0.1},
                    {"y_m", 0.5},
                    {"y_h", 0.3}},
                   o);
  Scenario s;
  s.name = "frontdoor";
  s.parameters = prm;
  s.scm = Scm({
      bernoulli_root("H", prm["p_h"]),
      bernoulli("T", {"H"}, c(prm["t_base"]) + prm["t_h"] * p("H")),
      bernoulli("M", {"T"}, c(prm["m_base"]) + prm["m_t"] * p("T")),
      bernoulli("Y", {"M", "H"}, c(prm["y_base"]) + prm["y_m"] * p("M") + prm["y_h"] * p("H")),
  });
  s.hidden = {"H"};
  s.treatment = "T";
  s.outcome = "Y";
  s.truth["ate"] = prm["m_t"] * prm["y_m"];
  return s;
}

Scenario iv_linear(const Params& o) {
  auto prm = merge("iv-linear", {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"d", 2.0}}, o);
  const double a = prm["a"], b = prm["b"], cc = prm["c"], d = prm["d"];
  Scenario s;
  s.name = "iv-linear";
  s.parameters = prm;
  const auto g = NoiseSpec::gaussian(0.0, 1.0);
  s.scm = Scm({
      root("I", g),
      root("H", g),
      {"T", {"I", "H"}, a * p("I") + b * p("H") + u(), g, std::nullopt},
      {"Y", {"H", "T"}, cc * p("H") + d * p("T") + u(), g, std::nullopt},
  });
  s.hidden = {"H"};
  s.treatment = "T";
  s.outcome = "Y";
  s.truth["ate"] = d;
  const double vt = a * a + b * b + 1.0;
  s.truth["naive_slope"] = (d * vt + b * cc) / vt;
  return s;
}

Scenario halfsibling(const Params& o) {
  auto prm = merge("halfsibling", {{"siblings", 10.0}, {"systematic_scale", 2.0}, {"sibling_noise_sd", 0.3},
                                   {"nonlinear", 0.0}},
                   o);
  const int k = static_cast<int>(prm["siblings"]);
  if (k < 1 || k > 100 || k != prm["siblings"]) throw InvalidInput("halfsibling: siblings must be an integer in [1, 100]");
  const double sd = prm["sibling_noise_sd"];
  Scenario s;
  s.name = "halfsibling";
  s.parameters = prm;
  std::vector<Mechanism> mech{root("Q", NoiseSpec::gaussian(0.0, 1.0)), root("S", NoiseSpec::gaussian(0.0, 1.0))};
  for (int j = 1; j <= k; ++j) {
    const double w = 0.5 + 0.1 * j;
    mech.push_back({"X" + std::to_string(j), {"Q"}, w * p("Q") + u(), NoiseSpec::gaussian(0.0, sd * sd), std::nullopt});
  }
  const Expr systematic = prm["nonlinear"] != 0.0 ? prm["systematic_scale"] * tanh(2.0 * p("Q")) + cube(p("Q"))
                                                   : prm["systematic_scale"] * p("Q");
  mech.push_back({"Y", {"S", "Q"}, p("S") + systematic + u(), NoiseSpec::dirac(0.0), std::nullopt});
  s.scm = Scm(std::move(mech));
  s.hidden = {"Q"};
  s.outcome = "Y";
  return s;
}

Scenario anm_nonlinear(const Params& o) {
  auto prm = merge("anm-nonlinear", {{"linear_gaussian", 0.0}, {"noise_half_width", 0.2}}, o);
  Scenario s;
  s.name = "anm-nonlinear";
  s.parameters = prm;
  if (prm["linear_gaussian"] != 0.0) {
    s.scm = Scm({
        root("X", NoiseSpec::gaussian(0.0, 1.0)),
        {"Y", {"X"}, p("X") + u(), NoiseSpec::gaussian(0.0, 1.0), std::nullopt},
    });
    s.direction = "undecided";
  } else {
    const double w = prm["noise_half_width"];
    s.scm = Scm({
        root("X", NoiseSpec::uniform(-1.0, 1.0)),
        {"Y", {"X"}, cube(p("X")) + p("X") + u(), NoiseSpec::uniform(-w, w), std::nullopt},
    });
    s.direction = "forward";
  }
  s.treatment = "X";
  s.outcome = "Y";
  return s;
}

Scenario linear_three(const std::string& name, const Params& o, bool collider) {
  auto prm = merge(name, {{"weight", 1.0}}, o);
  const double w = prm["weight"];
  const auto g = NoiseSpec::gaussian(0.0, 1.0);
  Scenario s;
  s.name = name;
  s.parameters = prm;
  if (collider) {
    s.scm = Scm({root("X", g), root("Z", g), {"Y", {"X", "Z"}, w * p("X") + w * p("Z") + u(), g, std::nullopt}});
  } else {
    s.scm = Scm({root("X", g), {"Y", {"X"}, w * p("X") + u(), g, std::nullopt},
                 {"Z", {"Y"}, w * p("Y") + u(), g, std::nullopt}});
  }
  return s;
}

Scenario rdd(const Params& o) {
  auto prm = merge("rdd", {{"cutoff", 0.0}, {"jump", 2.0}, {"slope", 1.0}, {"noise_sd", 0.5}}, o);
  const double sd = prm["noise_sd"];
  Scenario s;
  s.name = "rdd";
  s.parameters = prm;
  s.scm = Scm({
      root("S", NoiseSpec::uniform(-1.0, 1.0)),
      {"T", {"S"}, indicator_ge(p("S"), prm["cutoff"]), NoiseSpec::dirac(0.0), kBinary},
      {"Y", {"T", "S"}, prm["jump"] * p("T") + prm["slope"] * p("S") + u(), NoiseSpec::gaussian(0.0, sd * sd),
       std::nullopt},
  });
  s.treatment = "T";
  s.outcome = "Y";
  s.truth["ate"] = prm["jump"];
  return s;
}

const std::map<std::string, std::function<Scenario(const Params&)>>& registry() {
  static const std::map<std::string, std::function<Scenario(const Params&)>> r{
      {"genes-confounded", genes_confounded},
      {"simpson-reversal", simpson_reversal},
      {"faithfulness-violation", faithfulness_violation},
      {"frontdoor", frontdoor},
      {"iv-linear", iv_linear},
      {"halfsibling", halfsibling},
      {"anm-nonlinear", anm_nonlinear},
      {"confounded-linear", confounded_linear},
      {"collider", [](const Params& o) { return linear_three("collider", o, true); }},
      {"chain", [](const Params& o) { return linear_three("chain", o, false); }},
      {"rdd", rdd},
  };
  return r;
}

}  // namespace

std::vector<std::string> Scenario::observed() const {
  std::vector<std::string> out;
  for (const auto& n : scm.graph().names()) {
    if (std::find(hidden.begin(), hidden.end(), n) == hidden.end()) out.push_back(n);
  }
  return out;
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, make] : registry()) out.push_back(name);
  return out;
}

Scenario make_scenario(const std::string& name, const std::map<std::string, double>& overrides) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw InvalidInput("unknown scenario '" + name + "'");
  return it->second(overrides);
}

Dataset generate(const Scenario& s, Eigen::Index n, std::uint64_t seed) {
  return sample(s.scm, n, seed).select(s.observed());
}

DiscreteCgm frontdoor_cgm(const std::map<std::string, double>& overrides) {
  const auto prm = make_scenario("frontdoor", overrides).parameters;
  const Dag dag = Dag::from_named_edges({"H", "T", "M", "Y"}, {{"H", "T"}, {"T", "M"}, {"M", "Y"}, {"H", "Y"}});
  auto bern = [](double q) {
    Eigen::RowVector2d r(1.0 - q, q);
    return r;
  };
  Eigen::MatrixXd th(1, 2);
  th.row(0) = bern(prm.at("p_h"));
  Eigen::MatrixXd tt(2, 2);
  tt.row(0) = bern(prm.at("t_base"));
  tt.row(1) = bern(prm.at("t_base") + prm.at("t_h"));
  Eigen::MatrixXd tm(2, 2);
  tm.row(0) = bern(prm.at("m_base"));
  tm.row(1) = bern(prm.at("m_base") + prm.at("m_t"));
  // Y's parents in index order: H (more significant), then M.
  Eigen::MatrixXd ty(4, 2);
  for (int h = 0; h < 2; ++h) {
    for (int m = 0; m < 2; ++m) {
      ty.row(2 * h + m) = bern(prm.at("y_base") + prm.at("y_m") * m + prm.at("y_h") * h);
    }
  }
  return DiscreteCgm(dag, {kBinary, kBinary, kBinary, kBinary}, {th, tt, tm, ty});
}

}  // namespace causelab
