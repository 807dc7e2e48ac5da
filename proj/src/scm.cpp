#include "causelab/scm.hpp"

#include "causelab/error.hpp"
#include "causelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace causelab {

// ---------------------------------------------------------------- Expr

Expr Expr::constant(double c) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kConst;
  n->value = c;
  return Expr(std::move(n));
}

Expr Expr::parent(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kParent;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::noise(std::string owner) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kNoise;
  n->name = std::move(owner);
  return Expr(std::move(n));
}

Expr Expr::table(std::vector<Expr> inputs, std::map<std::vector<double>, double> rows) {
  for (const auto& [key, value] : rows) {
    if (key.size() != inputs.size()) throw InvalidInput("table expression: row arity mismatch");
  }
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kTable;
  n->args = std::move(inputs);
  n->table = std::move(rows);
  return Expr(std::move(n));
}

Expr Expr::make(ExprOp op, std::vector<Expr> args, double value) {
  std::size_t arity = 0;
  switch (op) {
    case ExprOp::kAdd:
    case ExprOp::kSub:
    case ExprOp::kMul:
    case ExprOp::kPow:
      arity = 2;
      break;
    case ExprOp::kTanh:
    case ExprOp::kCube:
    case ExprOp::kSign:
    case ExprOp::kIndicator:
      arity = 1;
      break;
    default:
      throw InvalidInput("Expr::make: use the dedicated factory for leaves and tables");
  }
  if (args.size() != arity) throw InvalidInput("Expr::make: wrong number of operands");
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->args = std::move(args);
  n->value = value;
  return Expr(std::move(n));
}

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  const ExprNode& a = *node_;
  const ExprNode& b = *other.node_;
  return a.op == b.op && a.value == b.value && a.name == b.name && a.args == b.args && a.table == b.table;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(ExprOp::kAdd, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(ExprOp::kSub, {a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(ExprOp::kMul, {a, b}); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::make(ExprOp::kPow, {base, exponent}); }
Expr tanh(const Expr& e) { return Expr::make(ExprOp::kTanh, {e}); }
Expr cube(const Expr& e) { return Expr::make(ExprOp::kCube, {e}); }
Expr sign(const Expr& e) { return Expr::make(ExprOp::kSign, {e}); }
Expr indicator_ge(const Expr& e, double threshold) { return Expr::make(ExprOp::kIndicator, {e}, threshold); }

int noise_references(const Expr& e) {
  if (e.op() == ExprOp::kNoise) return 1;
  int total = 0;
  for (const auto& a : e.args()) total += noise_references(a);
  return total;
}

namespace {

void collect_parents(const Expr& e, std::set<std::string>& out) {
  if (e.op() == ExprOp::kParent) out.insert(e.node().name);
  for (const auto& a : e.args()) collect_parents(a, out);
}

void collect_noise_owners(const Expr& e, std::set<std::string>& out) {
  if (e.op() == ExprOp::kNoise) out.insert(e.node().name);
  for (const auto& a : e.args()) collect_noise_owners(a, out);
}

bool is_own_noise(const Expr& e, const std::string& owner) {
  return e.op() == ExprOp::kNoise && (e.node().name.empty() || e.node().name == owner);
}

bool values_match(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<std::string> parent_references(const Expr& e) {
  std::set<std::string> out;
  collect_parents(e, out);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------- NoiseSpec

NoiseSpec::NoiseSpec(Variant spec) : spec_(std::move(spec)) {
  if (const auto* f = std::get_if<FiniteNoise>(&spec_)) {
    if (f->support.empty() || f->support.size() != f->probs.size()) {
      throw InvalidInput("finite noise: support and probabilities must be nonempty and of equal length");
    }
    double total = 0.0;
    for (double p : f->probs) {
      if (!(p >= 0.0)) throw InvalidInput("finite noise: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("finite noise: probabilities must sum to 1");
    std::set<double> distinct(f->support.begin(), f->support.end());
    if (distinct.size() != f->support.size()) throw InvalidInput("finite noise: duplicate support point");
  } else if (const auto* g = std::get_if<GaussianNoise>(&spec_)) {
    if (!(g->variance >= 0.0)) throw InvalidInput("gaussian noise: variance must be non-negative");
  } else if (const auto* u = std::get_if<UniformNoise>(&spec_)) {
    if (!(u->lo < u->hi)) throw InvalidInput("uniform noise: requires lo < hi");
  }
}

NoiseSpec NoiseSpec::finite(std::vector<double> support, std::vector<double> probs) {
  return NoiseSpec(FiniteNoise{std::move(support), std::move(probs)});
}
NoiseSpec NoiseSpec::gaussian(double mean, double variance) { return NoiseSpec(GaussianNoise{mean, variance}); }
NoiseSpec NoiseSpec::uniform(double lo, double hi) { return NoiseSpec(UniformNoise{lo, hi}); }
NoiseSpec NoiseSpec::dirac(double point) { return NoiseSpec(DiracNoise{point}); }

bool NoiseSpec::has_finite_support() const {
  return std::holds_alternative<FiniteNoise>(spec_) || std::holds_alternative<DiracNoise>(spec_);
}

std::vector<std::pair<double, double>> NoiseSpec::finite_support() const {
  std::vector<std::pair<double, double>> out;
  if (const auto* f = std::get_if<FiniteNoise>(&spec_)) {
    for (std::size_t k = 0; k < f->support.size(); ++k) out.emplace_back(f->support[k], f->probs[k]);
  } else if (const auto* d = std::get_if<DiracNoise>(&spec_)) {
    out.emplace_back(d->point, 1.0);
  } else {
    throw InvalidInput("noise distribution has no finite support");
  }
  return out;
}

bool NoiseSpec::in_support(double u) const {
  return std::visit(
      [u](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteNoise>) {
          for (std::size_t k = 0; k < s.support.size(); ++k) {
            if (s.support[k] == u && s.probs[k] > 0.0) return true;
          }
          return false;
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          return s.variance > 0.0 ? std::isfinite(u) : u == s.mean;
        } else if constexpr (std::is_same_v<T, UniformNoise>) {
          return u >= s.lo && u <= s.hi;
        } else {
          return u == s.point;
        }
      },
      spec_);
}

double NoiseSpec::draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t row) const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DiracNoise>) {
          return s.point;
        } else {
          const double u1 = counter_uniform(seed, stream, 2 * row);
          if constexpr (std::is_same_v<T, FiniteNoise>) {
            double acc = 0.0;
            for (std::size_t k = 0; k < s.support.size(); ++k) {
              acc += s.probs[k];
              if (u1 < acc) return s.support[k];
            }
            // Rounding left a sliver above the last cumulative sum.
            for (std::size_t k = s.support.size(); k-- > 0;) {
              if (s.probs[k] > 0.0) return s.support[k];
            }
            return s.support.back();
          } else if constexpr (std::is_same_v<T, GaussianNoise>) {
            const double u2 = counter_uniform(seed, stream, 2 * row + 1);
            return s.mean + std::sqrt(s.variance) * box_muller(u1, u2);
          } else {
            return s.lo + (s.hi - s.lo) * u1;
          }
        }
      },
      spec_);
}

// ---------------------------------------------------------------- Scm

namespace {

void check_table_totality(const Expr& e, const std::vector<Mechanism>& mechanisms, const Mechanism& owner) {
  for (const auto& a : e.args()) check_table_totality(a, mechanisms, owner);
  if (e.op() != ExprOp::kTable) return;
  std::vector<std::vector<double>> domains;
  for (const auto& input : e.args()) {
    if (input.op() == ExprOp::kNoise) {
      if (!owner.noise.has_finite_support()) {
        throw InvalidInput("'" + owner.name + "': table over noise requires finite noise support");
      }
      std::vector<double> d;
      for (const auto& [u, p] : owner.noise.finite_support()) d.push_back(u);
      domains.push_back(std::move(d));
    } else if (input.op() == ExprOp::kParent) {
      auto it = std::find_if(mechanisms.begin(), mechanisms.end(),
                             [&](const Mechanism& m) { return m.name == input.node().name; });
      if (it == mechanisms.end() || !it->domain) {
        throw InvalidInput("'" + owner.name + "': table input '" + input.node().name +
                           "' needs a declared finite domain");
      }
      domains.push_back(*it->domain);
    } else {
      throw InvalidInput("'" + owner.name + "': table inputs must be parent or noise references");
    }
  }
  // Walk the product domain.
  std::vector<std::size_t> idx(domains.size(), 0);
  for (;;) {
    std::vector<double> key;
    for (std::size_t k = 0; k < domains.size(); ++k) key.push_back(domains[k][idx[k]]);
    if (!e.node().table.contains(key)) {
      throw InvalidInput("'" + owner.name + "': table is not total over its input domains");
    }
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == domains[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
}

}  // namespace

Scm::Scm(std::vector<Mechanism> mechanisms) : mechanisms_(std::move(mechanisms)) {
  std::vector<std::string> names;
  for (const auto& m : mechanisms_) names.push_back(m.name);
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& m : mechanisms_) {
    std::set<std::string> declared;
    for (const auto& p : m.parents) {
      if (!declared.insert(p).second) throw InvalidInput("'" + m.name + "': duplicate parent '" + p + "'");
      edges.emplace_back(p, m.name);
    }
    for (const auto& ref : parent_references(m.expr)) {
      if (!declared.contains(ref)) {
        throw InvalidInput("'" + m.name + "': expression references undeclared parent '" + ref + "'");
      }
    }
    std::set<std::string> owners;
    collect_noise_owners(m.expr, owners);
    for (const auto& o : owners) {
      if (!o.empty() && o != m.name) {
        throw InvalidInput("'" + m.name + "': expression references the noise of '" + o + "'");
      }
    }
    if (m.domain && m.domain->empty()) throw InvalidInput("'" + m.name + "': empty domain");
  }
  try {
    graph_ = Dag::from_named_edges(names, edges);
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("SCM induced graph: ") + e.what());
  }
  order_ = topological_order(graph_);
  for (const auto& m : mechanisms_) {
    check_table_totality(m.expr, mechanisms_, m);
    const Expr& e = m.expr;
    bool additive = false;
    if (e.op() == ExprOp::kAdd) {
      const auto& a = e.args();
      additive = (is_own_noise(a[1], m.name) && noise_references(a[0]) == 0) ||
                 (is_own_noise(a[0], m.name) && noise_references(a[1]) == 0);
    }
    additive_.push_back(additive ? 1 : 0);
    std::vector<int> pidx;
    for (const auto& p : m.parents) pidx.push_back(graph_.index_of(p));
    parent_index_.push_back(std::move(pidx));
  }
}

double Scm::assign(int i, const Eigen::Ref<const Eigen::VectorXd>& values, double noise) const {
  const Mechanism& m = mechanisms_[static_cast<std::size_t>(i)];
  const auto& pidx = parent_index_[static_cast<std::size_t>(i)];
  auto parent = [&](const std::string& name) {
    for (std::size_t k = 0; k < m.parents.size(); ++k) {
      if (m.parents[k] == name) return values[pidx[k]];
    }
    throw InvalidInput("unresolved parent '" + name + "'");
  };
  auto own_noise = [noise](const std::string&) { return noise; };
  return evaluate(m.expr, parent, own_noise);
}

Eigen::VectorXd Scm::solve(const Eigen::Ref<const Eigen::VectorXd>& noise) const {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(size());
  for (int v : order_) values[v] = assign(v, values, noise[v]);
  return values;
}

Dag induced_graph(const Scm& m) { return m.graph(); }

Eigen::MatrixXd sample_noise(const Scm& m, Eigen::Index n, std::uint64_t seed) {
  Eigen::MatrixXd u(n, m.size());
  for (int v = 0; v < m.size(); ++v) {
    const NoiseSpec& spec = m.mechanism(v).noise;
    for (Eigen::Index r = 0; r < n; ++r) {
      u(r, v) = spec.draw(seed, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(r));
    }
  }
  return u;
}

namespace {

std::vector<ColumnType> column_types(const Scm& m) {
  std::vector<ColumnType> types;
  for (const auto& mech : m.mechanisms()) {
    if (!mech.domain) {
      types.push_back(ColumnType::kReal);
      continue;
    }
    const auto& d = *mech.domain;
    const bool binary = std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0 || x == 1.0; });
    const bool integral = std::all_of(d.begin(), d.end(), [](double x) { return std::floor(x) == x; });
    types.push_back(binary ? ColumnType::kBinary : integral ? ColumnType::kCategorical : ColumnType::kReal);
  }
  return types;
}

std::vector<std::string> variable_names(const Scm& m) { return m.graph().names(); }

Dataset to_dataset(const Scm& m, const Eigen::MatrixXd& values) {
  std::vector<Eigen::VectorXd> cols;
  for (int v = 0; v < m.size(); ++v) cols.emplace_back(values.col(v));
  auto types = column_types(m);
  // An intervention may pin a variable outside its declared domain type.
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (types[j] != ColumnType::kReal && infer_column_type(cols[j]) == ColumnType::kReal) {
      types[j] = ColumnType::kReal;
    }
    if (types[j] == ColumnType::kBinary && infer_column_type(cols[j]) != ColumnType::kBinary) {
      types[j] = ColumnType::kCategorical;
    }
  }
  return Dataset(variable_names(m), std::move(cols), std::move(types));
}

}  // namespace

Dataset sample(const Scm& m, Eigen::Index n, std::uint64_t seed) {
  if (n < 0) throw InvalidInput("sample: negative row count");
  const Eigen::MatrixXd u = sample_noise(m, n, seed);
  Eigen::MatrixXd x(n, m.size());
  for (Eigen::Index r = 0; r < n; ++r) x.row(r) = m.solve(u.row(r).transpose()).transpose();
  return to_dataset(m, x);
}

Expr reduced_form(const Scm& m, const std::string& name) {
  std::function<Expr(const Expr&, const std::string&)> substitute = [&](const Expr& e,
                                                                       const std::string& owner) -> Expr {
    switch (e.op()) {
      case ExprOp::kConst:
        return e;
      case ExprOp::kParent:
        return substitute(m.mechanism(m.index_of(e.node().name)).expr, e.node().name);
      case ExprOp::kNoise:
        return Expr::noise(e.node().name.empty() ? owner : e.node().name);
      case ExprOp::kTable: {
        std::vector<Expr> inputs;
        for (const auto& a : e.args()) inputs.push_back(substitute(a, owner));
        return Expr::table(std::move(inputs), e.node().table);
      }
      default: {
        std::vector<Expr> args;
        for (const auto& a : e.args()) args.push_back(substitute(a, owner));
        return Expr::make(e.op(), std::move(args), e.node().value);
      }
    }
  };
  return substitute(m.mechanism(m.index_of(name)).expr, name);
}

Dataset reduced_form_sample(const Scm& m, Eigen::Index n, std::uint64_t seed) {
  if (n < 0) throw InvalidInput("reduced_form_sample: negative row count");
  const Eigen::MatrixXd u = sample_noise(m, n, seed);
  std::vector<Expr> forms;
  for (const auto& name : m.graph().names()) forms.push_back(reduced_form(m, name));
  Eigen::MatrixXd x(n, m.size());
  auto no_parents = [](const std::string& name) -> double {
    throw std::logic_error("reduced form still references '" + name + "'");
  };
  for (Eigen::Index r = 0; r < n; ++r) {
    auto noise = [&](const std::string& owner) { return u(r, m.index_of(owner)); };
    for (int v = 0; v < m.size(); ++v) x(r, v) = evaluate(forms[static_cast<std::size_t>(v)], no_parents, noise);
  }
  return to_dataset(m, x);
}

Scm intervene(const Scm& m, const Intervention& i) {
  std::vector<Mechanism> mechs = m.mechanisms();
  for (const auto& [name, value] : i) {
    auto it = std::find_if(mechs.begin(), mechs.end(), [&](const Mechanism& x) { return x.name == name; });
    if (it == mechs.end()) throw InvalidInput("intervention on unknown variable '" + name + "'");
    if (it->domain && std::find(it->domain->begin(), it->domain->end(), value) == it->domain->end()) {
      throw InvalidInput("intervention value outside the domain of '" + name + "'");
    }
    it->parents.clear();
    it->expr = Expr::constant(value);
  }
  return Scm(std::move(mechs));
}

Scm with_noise(const Scm& m, const std::string& name, NoiseSpec noise) {
  std::vector<Mechanism> mechs = m.mechanisms();
  mechs.at(static_cast<std::size_t>(m.index_of(name))).noise = std::move(noise);
  return Scm(std::move(mechs));
}

MonteCarloMean interventional_mean(const Scm& m, const Intervention& i, const std::string& target,
                                   Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("interventional_mean: n must be positive");
  const Dataset d = sample(intervene(m, i), n, seed);
  const Eigen::VectorXd& y = d.column(target);
  MonteCarloMean out;
  out.n = n;
  out.mean = y.mean();
  if (n > 1) {
    const double var = (y.array() - out.mean).square().sum() / static_cast<double>(n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

double Distribution::mean() const {
  double acc = 0.0;
  for (const auto& [v, p] : points) acc += v * p;
  return acc;
}

// ---------------------------------------------------------------- abduction

namespace {

// Solves e(u) = target for the single noise occurrence in e, parents fixed.
template <typename ParentFn>
double solve_for_noise(const Expr& e, double target, const ParentFn& parent, const std::string& var) {
  auto value = [&](const Expr& x) {
    return evaluate(x, parent, [](const std::string&) -> double { throw std::logic_error("noise"); });
  };
  auto non_abducible = [&](const char* why) {
    return NonAbducible("'" + var + "': mechanism is not invertible in its noise (" + why + ")");
  };
  auto impossible = [&] {
    return ZeroProbabilityEvidence("'" + var + "': observed value is unreachable by its mechanism");
  };
  const auto& a = e.args();
  switch (e.op()) {
    case ExprOp::kNoise:
      return target;
    case ExprOp::kAdd:
      if (noise_references(a[0]) == 1) return solve_for_noise(a[0], target - value(a[1]), parent, var);
      return solve_for_noise(a[1], target - value(a[0]), parent, var);
    case ExprOp::kSub:
      if (noise_references(a[0]) == 1) return solve_for_noise(a[0], target + value(a[1]), parent, var);
      return solve_for_noise(a[1], value(a[0]) - target, parent, var);
    case ExprOp::kMul: {
      const bool left = noise_references(a[0]) == 1;
      const double k = value(left ? a[1] : a[0]);
      if (k == 0.0) throw non_abducible("multiplied by zero");
      return solve_for_noise(left ? a[0] : a[1], target / k, parent, var);
    }
    case ExprOp::kCube:
      return solve_for_noise(a[0], std::cbrt(target), parent, var);
    case ExprOp::kTanh:
      if (std::abs(target) >= 1.0) throw impossible();
      return solve_for_noise(a[0], std::atanh(target), parent, var);
    case ExprOp::kPow: {
      if (noise_references(a[0]) == 1) {
        const double k = value(a[1]);
        const bool odd_integer = std::floor(k) == k && std::fmod(std::abs(k), 2.0) == 1.0;
        if (!odd_integer) throw non_abducible("power with non-odd exponent");
        const double root = std::pow(std::abs(target), 1.0 / k);
        return solve_for_noise(a[0], target < 0 ? -root : root, parent, var);
      }
      const double base = value(a[0]);
      if (!(base > 0.0) || base == 1.0) throw non_abducible("exponential with degenerate base");
      if (!(target > 0.0)) throw impossible();
      return solve_for_noise(a[1], std::log(target) / std::log(base), parent, var);
    }
    default:
      throw non_abducible("non-injective primitive");
  }
}

}  // namespace

std::vector<Distribution> abduct(const Scm& m, const Assignment& evidence) {
  const auto& names = m.graph().names();
  Eigen::VectorXd values(m.size());
  for (const auto& [k, v] : evidence) {
    if (std::find(names.begin(), names.end(), k) == names.end()) {
      throw InvalidInput("evidence references unknown variable '" + k + "'");
    }
  }
  for (int v = 0; v < m.size(); ++v) {
    auto it = evidence.find(names[static_cast<std::size_t>(v)]);
    if (it == evidence.end()) throw InvalidInput("evidence must assign every variable; missing '" + names[static_cast<std::size_t>(v)] + "'");
    values[v] = it->second;
  }

  std::vector<Distribution> posterior(static_cast<std::size_t>(m.size()));
  for (int v = 0; v < m.size(); ++v) {
    const Mechanism& mech = m.mechanism(v);
    const double x = values[v];
    auto parent = [&](const std::string& name) { return values[m.index_of(name)]; };
    Distribution& post = posterior[static_cast<std::size_t>(v)];

    if (noise_references(mech.expr) == 0) {
      if (!values_match(m.assign(v, values, 0.0), x)) {
        throw ZeroProbabilityEvidence("'" + mech.name + "': observed value contradicts its mechanism");
      }
      // The noise never enters the mechanism; any representative will do.
      if (mech.noise.has_finite_support()) {
        post.points = mech.noise.finite_support();
      } else {
        post.points = {{0.0, 1.0}};
      }
      continue;
    }
    if (mech.noise.has_finite_support()) {
      double total = 0.0;
      for (const auto& [u, p] : mech.noise.finite_support()) {
        if (p > 0.0 && values_match(m.assign(v, values, u), x)) {
          post.points.emplace_back(u, p);
          total += p;
        }
      }
      if (post.points.empty()) {
        throw ZeroProbabilityEvidence("'" + mech.name + "': no noise value reproduces the observation");
      }
      for (auto& pt : post.points) pt.second /= total;
      continue;
    }
    if (noise_references(mech.expr) > 1) {
      throw NonAbducible("'" + mech.name + "': noise appears more than once in a continuous mechanism");
    }
    const double u = solve_for_noise(mech.expr, x, parent, mech.name);
    if (!std::isfinite(u) || !mech.noise.in_support(u) || !values_match(m.assign(v, values, u), x)) {
      throw ZeroProbabilityEvidence("'" + mech.name + "': abducted noise lies outside its support");
    }
    post.points = {{u, 1.0}};
  }
  return posterior;
}

Distribution counterfactual(const Scm& m, const Assignment& evidence, const Intervention& i,
                            const std::string& target) {
  const int target_index = m.index_of(target);
  const std::vector<Distribution> posterior = abduct(m, evidence);
  const Scm modified = intervene(m, i);
  const auto& names = m.graph().names();

  Eigen::VectorXd factual(m.size());
  for (int v = 0; v < m.size(); ++v) factual[v] = evidence.at(names[static_cast<std::size_t>(v)]);

  std::size_t configurations = 1;
  for (const auto& p : posterior) {
    configurations *= p.points.size();
    if (configurations > (1U << 20)) throw LimitExceeded("counterfactual: noise posterior too large to enumerate");
  }

  std::vector<std::pair<double, double>> outcomes;
  std::vector<std::size_t> idx(posterior.size(), 0);
  for (std::size_t c = 0; c < configurations; ++c) {
    Eigen::VectorXd u(m.size());
    double weight = 1.0;
    for (std::size_t v = 0; v < posterior.size(); ++v) {
      u[static_cast<Eigen::Index>(v)] = posterior[v].points[idx[v]].first;
      weight *= posterior[v].points[idx[v]].second;
    }
    // Prediction. A variable that is not intervened on and whose parents all
    // keep their factual values reproduces its factual value: the abducted
    // noise was chosen to make that so.
    Eigen::VectorXd x(m.size());
    std::vector<char> unchanged(static_cast<std::size_t>(m.size()), 0);
    for (int v : modified.order()) {
      const bool intervened = i.contains(names[static_cast<std::size_t>(v)]);
      bool parents_factual = !intervened;
      for (int p : m.graph().parents(v)) parents_factual = parents_factual && unchanged[static_cast<std::size_t>(p)];
      if (parents_factual) {
        x[v] = factual[v];
      } else {
        x[v] = modified.assign(v, x, u[v]);
      }
      unchanged[static_cast<std::size_t>(v)] = x[v] == factual[v] ? 1 : 0;
    }
    outcomes.emplace_back(x[target_index], weight);

    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == posterior[k].points.size()) idx[k++] = 0;
  }

  std::sort(outcomes.begin(), outcomes.end());
  Distribution out;
  for (const auto& [value, w] : outcomes) {
    if (!out.points.empty() && values_match(out.points.back().first, value)) {
      out.points.back().second += w;
    } else {
      out.points.emplace_back(value, w);
    }
  }
  return out;
}

double ite(const Scm& m, const Assignment& noise_row, const std::string& treatment, const std::string& target) {
  const Mechanism& t = m.mechanism(m.index_of(treatment));
  const std::set<double> binary{0.0, 1.0};
  if (!t.domain || std::set<double>(t.domain->begin(), t.domain->end()) != binary) {
    throw InvalidInput("ite: treatment '" + treatment + "' must have domain {0, 1}");
  }
  Eigen::VectorXd u(m.size());
  for (int v = 0; v < m.size(); ++v) {
    auto it = noise_row.find(m.graph().name(v));
    if (it == noise_row.end()) throw InvalidInput("ite: noise row must assign every variable");
    u[v] = it->second;
  }
  const int y = m.index_of(target);
  const double treated = intervene(m, {{treatment, 1.0}}).solve(u)[y];
  const double control = intervene(m, {{treatment, 0.0}}).solve(u)[y];
  return treated - control;
}

}  // namespace causelab
