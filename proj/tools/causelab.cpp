#include "causelab/cgm.hpp"
#include "causelab/dataset.hpp"
#include "causelab/discovery.hpp"
#include "causelab/error.hpp"
#include "causelab/estimation.hpp"
#include "causelab/graph.hpp"
#include "causelab/io.hpp"
#include "causelab/kernel.hpp"
#include "causelab/scenarios.hpp"
#include "causelab/scm.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace causelab;
using io::Json;

namespace {

// Missing or inconsistent flags detected after parsing; reported like a CLI
// parse error (usage text, exit 2).
class UsageError : public InvalidInput {
 public:
  UsageError(const CLI::App* app, const std::string& what) : InvalidInput(what), app_(app) {}
  const CLI::App* app() const { return app_; }

 private:
  const CLI::App* app_;
};

double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw InvalidInput(what + ": '" + s + "' is not a finite number");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (item.empty()) throw InvalidInput("empty name in list '" + text + "'");
    out.push_back(item);
  }
  if (out.empty()) throw InvalidInput("expected at least one name");
  return out;
}

std::map<std::string, double> parse_assignments(const std::vector<std::string>& items, const std::string& what) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidInput(what + ": expected NAME=VALUE, got '" + item + "'");
    const auto name = item.substr(0, eq);
    if (!out.emplace(name, parse_real(item.substr(eq + 1), what)).second) {
      throw InvalidInput(what + ": '" + name + "' given twice");
    }
  }
  return out;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    io::write_file_atomic(out_path, content);
  }
}

std::string csv_text(const Dataset& d) {
  std::ostringstream s;
  write_csv(s, d);
  return s.str();
}

Dataset load_data(const std::string& path) {
  Dataset d = read_csv_file(path);
  if (d.rows() == 0) throw InvalidInput(path + ": dataset has no rows");
  return d;
}

NodeSet names_to_set(const Dag& g, const std::vector<std::string>& names) { return g.node_set(names); }

Json names_of(const Dag& g, const NodeSet& s) {
  Json out = Json::array();
  for (int v : s) out.push_back(g.name(v));
  return out;
}

struct Common {
  std::string out;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  int perms = kDefaultPermutations;
};

CLI::Option* add_seed(CLI::App* sub, Common& c, bool required) {
  auto* opt = sub->add_option("--seed", c.seed, "Random seed");
  if (required) opt->required();
  return opt;
}

void add_out(CLI::App* sub, Common& c) { sub->add_option("--out", c.out, "Output file (default: stdout)"); }

CiMethod ci_method(const std::string& s) {
  return s == "kernel-residual" ? CiMethod::kKernelResidual : CiMethod::kPartialCorrelation;
}

Regressor regressor_of(const std::string& s) { return s == "kernel-ridge" ? Regressor::kKernelRidge : Regressor::kLinear; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causelab: causal inference from graphs, models and data"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  Common c;

  // dsep
  std::string graph_path;
  std::string list_a, list_b;
  std::vector<std::string> set_a, set_b, given;
  auto* dsep = app.add_subcommand("dsep", "Decide d-separation of A and B given Z in a DAG");
  dsep->add_option("graph", graph_path, "Graph JSON")->required();
  dsep->add_option("a", list_a, "First variable set (comma separated)")->required();
  dsep->add_option("b", list_b, "Second variable set (comma separated)")->required();
  dsep->add_option("--given", given, "Conditioning set")->delimiter(',');
  add_out(dsep, c);

  // adjust
  std::string treatment, outcome;
  std::vector<std::string> check_set;
  bool check_requested = false;
  auto* adjust = app.add_subcommand("adjust", "Enumerate valid adjustment sets for T -> Y");
  adjust->add_option("graph", graph_path, "Graph JSON")->required();
  adjust->add_option("treatment", treatment)->required();
  adjust->add_option("outcome", outcome)->required();
  auto* check_opt = adjust->add_option("--check", check_set, "Only test this set (comma separated, may be empty)")
                        ->delimiter(',')
                        ->expected(0, 64);
  add_out(adjust, c);

  // count-dags
  int dag_nodes = 0;
  auto* count = app.add_subcommand("count-dags", "Count labeled DAGs on n nodes");
  count->add_option("n", dag_nodes)->required();
  add_out(count, c);

  // simulate
  std::string model_path;
  long long rows = 0;
  bool reduced = false;
  auto* simulate = app.add_subcommand("simulate", "Sample an SCM (CSV)");
  simulate->add_option("scm", model_path, "SCM JSON")->required();
  simulate->add_option("--n", rows, "Row count")->required()->check(CLI::NonNegativeNumber);
  simulate->add_flag("--reduced-form", reduced, "Evaluate the reduced form instead of the mechanisms");
  add_seed(simulate, c, true);
  add_out(simulate, c);

  // intervene
  std::vector<std::string> do_items, evidence_items;
  std::string target;
  auto* intervene_cmd = app.add_subcommand("intervene", "Interventional mean of a target, or the intervened SCM");
  intervene_cmd->add_option("scm", model_path, "SCM JSON")->required();
  intervene_cmd->add_option("--do", do_items, "NAME=VALUE (repeatable)")->required();
  intervene_cmd->add_option("--target", target, "Target variable; omit to print the intervened SCM");
  intervene_cmd->add_option("--n", rows, "Monte-Carlo rows")->check(CLI::PositiveNumber);
  add_seed(intervene_cmd, c, true);
  add_out(intervene_cmd, c);

  // counterfactual
  auto* cf = app.add_subcommand("counterfactual", "Abduction, action, prediction for one observed row");
  cf->add_option("scm", model_path, "SCM JSON")->required();
  cf->add_option("--evidence", evidence_items, "NAME=VALUE for every variable")->required();
  cf->add_option("--do", do_items, "NAME=VALUE (repeatable)")->required();
  cf->add_option("--target", target)->required();
  add_out(cf, c);

  // generate
  std::string scenario;
  std::vector<std::string> params;
  auto* gen = app.add_subcommand("generate", "Write a scenario dataset (CSV) and its ground truth (JSON)");
  gen->add_option("scenario", scenario)->required()->check(CLI::IsMember(scenario_names()));
  gen->add_option("--n", rows, "Row count")->required()->check(CLI::NonNegativeNumber);
  gen->add_option("--param", params, "Scenario parameter NAME=VALUE (repeatable)");
  add_seed(gen, c, true);
  gen->add_option("--out", c.out, "CSV path; ground truth goes to <stem>.truth.json")->required();

  // discover
  std::string data_path, method, ci = "partial-correlation", search = "greedy", score_model = "auto";
  std::string var_x, var_y;
  int max_cond = 4;
  auto* discover = app.add_subcommand("discover", "Causal discovery from a CSV dataset");
  discover->add_option("data", data_path, "CSV")->required();
  discover->add_option("--method", method)->required()->check(CLI::IsMember({"pc", "sgs", "score", "anm"}));
  discover->add_option("--alpha", c.alpha)->check(CLI::Range(0.0, 1.0));
  discover->add_option("--ci", ci)->check(CLI::IsMember({"partial-correlation", "kernel-residual"}));
  discover->add_option("--max-conditioning", max_cond)->check(CLI::NonNegativeNumber);
  discover->add_option("--search", search)->check(CLI::IsMember({"exhaustive", "greedy"}));
  discover->add_option("--score", score_model)->check(CLI::IsMember({"auto", "multinomial", "linear-gaussian"}));
  discover->add_option("--x", var_x, "Cause candidate (anm)");
  discover->add_option("--y", var_y, "Effect candidate (anm)");
  discover->add_option("--perms", c.perms)->check(CLI::PositiveNumber);
  add_seed(discover, c, true);
  add_out(discover, c);

  // estimate
  std::string est_method, mediator, instrument, score_col, propensity_col, regressor = "linear", strata = "covariates";
  std::string normalization = "hajek";
  std::vector<std::string> covariates;
  double cutoff = 0.0, epsilon = 0.01;
  int bins = 5;
  auto* estimate = app.add_subcommand("estimate", "Treatment-effect estimation from a CSV dataset");
  estimate->add_option("data", data_path, "CSV")->required();
  estimate->add_option("--method", est_method)
      ->required()
      ->check(CLI::IsMember({"rct", "regression", "matching", "stratified", "ipw", "front-door", "2sls", "rdd"}));
  estimate->add_option("--y", var_y, "Outcome column")->required();
  estimate->add_option("--t", treatment, "Treatment column");
  estimate->add_option("--z", covariates, "Covariates (comma separated)")->delimiter(',');
  estimate->add_option("--mediator", mediator);
  estimate->add_option("--instrument", instrument);
  estimate->add_option("--score", score_col, "Running score column (rdd)");
  auto* cutoff_opt = estimate->add_option("--cutoff", cutoff);
  auto* eps_opt = estimate->add_option("--epsilon", epsilon, "IPW clipping level, or the rdd window");
  estimate->add_option("--regressor", regressor)->check(CLI::IsMember({"linear", "kernel-ridge"}));
  estimate->add_option("--strata", strata)->check(CLI::IsMember({"covariates", "propensity"}));
  estimate->add_option("--bins", bins)->check(CLI::PositiveNumber);
  estimate->add_option("--propensity-column", propensity_col, "Known propensities (ipw)");
  estimate->add_option("--normalization", normalization)->check(CLI::IsMember({"hajek", "horvitz-thompson"}));
  add_seed(estimate, c, false);
  add_out(estimate, c);

  // half-sibling
  std::vector<std::string> siblings;
  auto* halfsib = app.add_subcommand("half-sibling", "Remove what siblings predict from a target column (CSV)");
  halfsib->add_option("data", data_path, "CSV")->required();
  halfsib->add_option("--y", var_y, "Target column")->required();
  halfsib->add_option("--siblings", siblings, "Sibling columns (comma separated)")->required()->delimiter(',');
  halfsib->add_option("--regressor", regressor)->check(CLI::IsMember({"linear", "kernel-ridge"}));
  add_out(halfsib, c);

  // test-ci
  auto* testci = app.add_subcommand("test-ci", "Conditional independence test on a CSV dataset");
  testci->add_option("data", data_path, "CSV")->required();
  testci->add_option("a", var_x)->required();
  testci->add_option("b", var_y)->required();
  testci->add_option("--given", given)->delimiter(',');
  testci->add_option("--method", ci)->check(CLI::IsMember({"partial-correlation", "kernel-residual"}));
  testci->add_option("--alpha", c.alpha)->check(CLI::Range(0.0, 1.0));
  testci->add_option("--perms", c.perms)->check(CLI::PositiveNumber);
  add_seed(testci, c, true);
  add_out(testci, c);

  // mmd
  std::string second_path;
  std::vector<std::string> columns;
  double bandwidth = 0.0;
  auto* mmd_cmd = app.add_subcommand("mmd", "Kernel two-sample test between two CSV files");
  mmd_cmd->add_option("first", data_path, "CSV")->required();
  mmd_cmd->add_option("second", second_path, "CSV")->required();
  mmd_cmd->add_option("--columns", columns, "Columns to compare (default: all of the first file)")->delimiter(',');
  mmd_cmd->add_option("--bandwidth", bandwidth, "Gaussian bandwidth (default: median heuristic)")
      ->check(CLI::PositiveNumber);
  mmd_cmd->add_option("--perms", c.perms)->check(CLI::PositiveNumber);
  add_seed(mmd_cmd, c, true);
  add_out(mmd_cmd, c);

  // hsic
  std::vector<std::string> cols_x, cols_y;
  auto* hsic_cmd = app.add_subcommand("hsic", "Kernel independence test between two column groups");
  hsic_cmd->add_option("data", data_path, "CSV")->required();
  hsic_cmd->add_option("--x", cols_x)->required()->delimiter(',');
  hsic_cmd->add_option("--y", cols_y)->required()->delimiter(',');
  hsic_cmd->add_option("--perms", c.perms)->check(CLI::PositiveNumber);
  add_seed(hsic_cmd, c, true);
  add_out(hsic_cmd, c);

  // vc-bound
  double r_emp = 0.0, delta = 0.05;
  int vc_h = 1;
  long long vc_m = 0;
  auto* vc = app.add_subcommand("vc-bound", "Risk bound from the VC dimension");
  vc->add_option("--r-emp", r_emp, "Empirical risk in [0, 1]")->required();
  vc->add_option("--vc-dim", vc_h, "VC dimension")->required();
  vc->add_option("--m", vc_m, "Sample count")->required();
  vc->add_option("--delta", delta, "Confidence parameter in (0, 1)")->required();
  add_out(vc, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    const CLI::App* active = &app;
    for (const auto* sub : app.get_subcommands()) active = sub;
    std::cerr << active->help();
    return 2;
  }

  try {
    if (dsep->parsed()) {
      const Dag g = io::dag_from_json(io::read_json_file(graph_path));
      set_a = split_list(list_a);
      set_b = split_list(list_b);
      const bool sep = d_separated(g, names_to_set(g, set_a), names_to_set(g, set_b), names_to_set(g, given));
      emit(c.out, io::dump({{"a", set_a}, {"b", set_b}, {"given", given}, {"d_separated", sep}}));
    } else if (adjust->parsed()) {
      const Dag g = io::dag_from_json(io::read_json_file(graph_path));
      const int t = g.index_of(treatment);
      const int y = g.index_of(outcome);
      check_requested = check_opt->count() > 0;
      Json out{{"treatment", treatment}, {"outcome", outcome}};
      if (check_requested) {
        std::erase(check_set, std::string());
      const NodeSet z = names_to_set(g, check_set);
        out["set"] = names_of(g, z);
        out["valid"] = is_valid_adjustment_set(g, t, y, z);
      } else {
        const auto sets = enumerate_adjustment_sets(g, t, y);
        Json list = Json::array();
        for (const auto& s : sets.sets) list.push_back(names_of(g, s));
        out["adjustment_sets"] = list;
        out["parent_adjustment"] = sets.parent_adjustment ? names_of(g, sets.sets[*sets.parent_adjustment]) : Json(nullptr);
      }
      emit(c.out, io::dump(out));
    } else if (count->parsed()) {
      emit(c.out, io::dump({{"n", dag_nodes}, {"count", count_dags(dag_nodes).str()}}));
    } else if (simulate->parsed()) {
      const Scm m = io::scm_from_json(io::read_json_file(model_path));
      const Dataset d = reduced ? reduced_form_sample(m, rows, c.seed) : sample(m, rows, c.seed);
      emit(c.out, csv_text(d));
    } else if (intervene_cmd->parsed()) {
      const Scm m = io::scm_from_json(io::read_json_file(model_path));
      const auto iv = parse_assignments(do_items, "--do");
      if (target.empty()) {
        emit(c.out, io::dump(io::to_json(intervene(m, iv))));
      } else {
        if (rows <= 0) throw UsageError(intervene_cmd, "--n is required with --target");
        const auto r = interventional_mean(m, iv, target, rows, c.seed);
        emit(c.out, io::dump({{"target", target},
                              {"intervention", iv},
                              {"mean", r.mean},
                              {"stderr", r.std_error},
                              {"n", r.n},
                              {"seed", c.seed}}));
      }
    } else if (cf->parsed()) {
      const Scm m = io::scm_from_json(io::read_json_file(model_path));
      const auto ev = parse_assignments(evidence_items, "--evidence");
      const auto iv = parse_assignments(do_items, "--do");
      Json out = io::to_json(counterfactual(m, ev, iv, target));
      out["target"] = target;
      out["evidence"] = ev;
      out["intervention"] = iv;
      emit(c.out, io::dump(out));
    } else if (gen->parsed()) {
      const Scenario s = make_scenario(scenario, parse_assignments(params, "--param"));
      const Dataset d = generate(s, rows, c.seed);
      std::filesystem::path truth_path(c.out);
      truth_path.replace_extension(".truth.json");
      Json truth{{"scenario", s.name},
                 {"n", rows},
                 {"seed", c.seed},
                 {"parameters", s.parameters},
                 {"truth", s.truth},
                 {"graph", io::to_json(s.scm.graph())},
                 {"hidden", s.hidden},
                 {"observed", s.observed()},
                 {"scm", io::to_json(s.scm)}};
      if (s.treatment) truth["treatment"] = *s.treatment;
      if (s.outcome) truth["outcome"] = *s.outcome;
      if (s.direction) truth["direction"] = *s.direction;
      emit(c.out, csv_text(d));
      io::write_file_atomic(truth_path.string(), io::dump(truth));
    } else if (discover->parsed()) {
      const Dataset d = load_data(data_path);
      DiscoveryConfig cfg;
      cfg.ci.method = ci_method(ci);
      cfg.ci.alpha = c.alpha;
      cfg.ci.max_conditioning = max_cond;
      cfg.ci.permutations = c.perms;
      cfg.ci.seed = c.seed;
      cfg.anm_permutations = discover->count("--perms") > 0 ? c.perms : cfg.anm_permutations;
      cfg.search = search == "exhaustive" ? SearchMode::kExhaustive : SearchMode::kGreedy;
      cfg.score = score_model == "multinomial"       ? ScoreModel::kMultinomial
                  : score_model == "linear-gaussian" ? ScoreModel::kLinearGaussian
                                                     : ScoreModel::kAutomatic;
      Json out;
      if (method == "pc" || method == "sgs") {
        const auto skel = method == "pc" ? pc_skeleton(d, cfg) : sgs_skeleton(d, cfg);
        const auto o = orient(skel);
        for (const auto& w : o.conflicts) std::cerr << "warning: " << w << "\n";
        out = io::to_json(skel, o);
        out["ci_test"] = ci;
      } else if (method == "score") {
        const auto r = score_search(d, cfg);
        out = {{"dag", io::to_json(r.dag)},
               {"cpdag", io::to_json(cpdag_of(r.dag))},
               {"score", r.score},
               {"graphs_scored", r.graphs_scored},
               {"search", search}};
      } else {
        if (var_x.empty() || var_y.empty()) throw UsageError(discover, "--method anm needs --x and --y");
        const auto v = anm_direction(d, var_x, var_y, cfg);
        out = {{"x", var_x},
               {"y", var_y},
               {"direction", to_string(v.direction)},
               {"p_forward", v.p_forward},
               {"p_backward", v.p_backward},
               {"margin", v.margin}};
      }
      out["method"] = method;
      out["alpha"] = c.alpha;
      out["seed"] = c.seed;
      emit(c.out, io::dump(out));
    } else if (estimate->parsed()) {
      const Dataset d = load_data(data_path);
      auto need = [&](const std::string& value, const std::string& flag) {
        if (value.empty()) throw UsageError(estimate, "--method " + est_method + " requires " + flag);
      };
      if (est_method != "rdd") need(treatment, "--t");
      EffectEstimate e;
      if (est_method == "rct") {
        e = ate_rct(d, var_y, treatment);
      } else if (est_method == "regression") {
        e = ate_regression_adjustment(d, var_y, treatment, covariates, regressor_of(regressor));
      } else if (est_method == "matching") {
        e = ate_nn_matching(d, var_y, treatment, covariates);
      } else if (est_method == "stratified") {
        if (covariates.empty()) throw UsageError(estimate, "--method stratified requires --z");
        Strata s;
        s.kind = strata == "propensity" ? Strata::Kind::kPropensityBins : Strata::Kind::kCovariatePattern;
        s.covariates = covariates;
        s.bins = bins;
        e = ate_stratified(d, var_y, treatment, s);
      } else if (est_method == "ipw") {
        IpwOptions o;
        o.epsilon = eps_opt->count() > 0 ? epsilon : 0.01;
        o.normalization =
            normalization == "hajek" ? IpwNormalization::kHajek : IpwNormalization::kHorvitzThompson;
        if (!propensity_col.empty()) {
          e = ate_ipw(d, var_y, treatment, d.column(propensity_col), o);
        } else {
          if (covariates.empty()) throw UsageError(estimate, "--method ipw requires --z or --propensity-column");
          e = ate_ipw(d, var_y, treatment, covariates, o);
        }
      } else if (est_method == "front-door") {
        need(mediator, "--mediator");
        e = ate_front_door(d, var_y, treatment, mediator);
      } else if (est_method == "2sls") {
        need(instrument, "--instrument");
        e = ate_iv_2sls(d, var_y, treatment, instrument);
      } else {
        need(score_col, "--score");
        if (cutoff_opt->count() == 0) throw UsageError(estimate, "--method rdd requires --cutoff");
        if (eps_opt->count() == 0) throw UsageError(estimate, "--method rdd requires --epsilon");
        e = ate_rdd(d, var_y, score_col, cutoff, epsilon);
      }
      e.seed = c.seed;
      emit(c.out, io::dump(io::to_json(e)));
    } else if (halfsib->parsed()) {
      const Dataset d = load_data(data_path);
      const Eigen::VectorXd s = half_sibling_regress(d.column(var_y), d.matrix(siblings), regressor_of(regressor));
      emit(c.out, csv_text(Dataset({var_y + "_cleaned"}, {s}, {ColumnType::kReal})));
    } else if (testci->parsed()) {
      const Dataset d = load_data(data_path);
      CiOptions o;
      o.method = ci_method(ci);
      o.alpha = c.alpha;
      o.permutations = c.perms;
      o.seed = c.seed;
      const auto r = ci_test(d, var_x, var_y, given, o);
      emit(c.out, io::dump({{"test", r.test},
                            {"a", var_x},
                            {"b", var_y},
                            {"given", given},
                            {"statistic", r.statistic},
                            {"p_value", r.p_value},
                            {"conditioning_size", r.conditioning_size},
                            {"alpha", c.alpha},
                            {"reject", r.rejects(c.alpha)},
                            {"seed", c.seed}}));
    } else if (mmd_cmd->parsed()) {
      const Dataset a = load_data(data_path);
      const Dataset b = load_data(second_path);
      const auto cols = columns.empty() ? a.names() : columns;
      const Eigen::MatrixXd xa = a.matrix(cols);
      const Eigen::MatrixXd xb = b.matrix(cols);
      Kernel k;
      if (bandwidth > 0) {
        k = Kernel::gaussian(bandwidth);
      } else {
        Eigen::MatrixXd pooled(xa.rows() + xb.rows(), xa.cols());
        pooled << xa, xb;
        k = median_heuristic_kernel(pooled);
      }
      const auto r = mmd(k, xa, xb, c.perms, c.seed);
      emit(c.out, io::dump({{"statistic", r.statistic},
                            {"unbiased", r.unbiased},
                            {"p_value", r.p_value},
                            {"permutations", r.permutations},
                            {"bandwidth", std::get<GaussianKernel>(k.spec()).bandwidth},
                            {"seed", r.seed}}));
    } else if (hsic_cmd->parsed()) {
      const Dataset d = load_data(data_path);
      const auto r = hsic_test(d.matrix(cols_x), d.matrix(cols_y), c.perms, c.seed);
      emit(c.out, io::dump({{"test", r.test},
                            {"x", cols_x},
                            {"y", cols_y},
                            {"statistic", r.statistic},
                            {"p_value", r.p_value},
                            {"permutations", c.perms},
                            {"seed", c.seed}}));
    } else if (vc->parsed()) {
      emit(c.out, io::dump({{"r_emp", r_emp},
                            {"h", vc_h},
                            {"m", vc_m},
                            {"delta", delta},
                            {"bound", vc_bound(r_emp, vc_h, vc_m, delta)}}));
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << e.app()->help();
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
