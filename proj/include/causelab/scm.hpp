#pragma once

#include "causelab/dataset.hpp"
#include "causelab/graph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace causelab {

// ---------------------------------------------------------------- Expr

enum class ExprOp { kConst, kParent, kNoise, kAdd, kSub, kMul, kPow, kTanh, kCube, kSign, kIndicator, kTable };

class Expr;

struct ExprNode {
  ExprOp op = ExprOp::kConst;
  double value = 0.0;     // constant, or threshold for kIndicator
  std::string name;       // parent name; noise owner ("" = own noise)
  std::vector<Expr> args;
  // kTable: exact lookup from the values of `args` to the output.
  std::map<std::vector<double>, double> table;
};

// Immutable expression tree for a structural assignment. Copies share nodes.
class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double c);
  static Expr parent(std::string name);
  static Expr noise(std::string owner = {});
  static Expr table(std::vector<Expr> inputs, std::map<std::vector<double>, double> rows);
  static Expr make(ExprOp op, std::vector<Expr> args, double value = 0.0);

  const ExprNode& node() const { return *node_; }
  ExprOp op() const { return node_->op; }
  const std::vector<Expr>& args() const { return node_->args; }

  bool operator==(const Expr& other) const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
inline Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
inline Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
Expr pow(const Expr& base, const Expr& exponent);
Expr tanh(const Expr& e);
Expr cube(const Expr& e);
Expr sign(const Expr& e);
// 1 when e >= threshold, else 0.
Expr indicator_ge(const Expr& e, double threshold);

// Number of noise references in the tree.
int noise_references(const Expr& e);
std::vector<std::string> parent_references(const Expr& e);

template <typename ParentFn, typename NoiseFn>
double evaluate(const Expr& e, const ParentFn& parent, const NoiseFn& noise);

// ---------------------------------------------------------------- noise

struct FiniteNoise {
  std::vector<double> support;
  std::vector<double> probs;
};
struct GaussianNoise {
  double mean = 0.0;
  double variance = 1.0;
};
struct UniformNoise {
  double lo = 0.0;
  double hi = 1.0;
};
struct DiracNoise {
  double point = 0.0;
};

class NoiseSpec {
 public:
  using Variant = std::variant<FiniteNoise, GaussianNoise, UniformNoise, DiracNoise>;

  NoiseSpec() : NoiseSpec(GaussianNoise{}) {}
  NoiseSpec(Variant spec);  // NOLINT: implicit by design of the variant wrapper

  static NoiseSpec finite(std::vector<double> support, std::vector<double> probs);
  static NoiseSpec gaussian(double mean, double variance);
  static NoiseSpec uniform(double lo, double hi);
  static NoiseSpec dirac(double point);

  const Variant& spec() const { return spec_; }
  bool has_finite_support() const;
  // Support points with their probabilities; Dirac gives a single point.
  std::vector<std::pair<double, double>> finite_support() const;
  bool in_support(double u) const;
  // Draw for `row` from `stream`, consuming counters 2*row and 2*row+1.
  double draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t row) const;

 private:
  Variant spec_;
};

// ---------------------------------------------------------------- Scm

struct Mechanism {
  std::string name;
  std::vector<std::string> parents;
  Expr expr;
  NoiseSpec noise;
  // Finite value domain for discrete variables.
  std::optional<std::vector<double>> domain;
};

using Intervention = std::map<std::string, double>;
using Assignment = std::map<std::string, double>;

// Structural causal model: one assignment per variable plus jointly
// independent noises. Immutable; the constructor checks that the induced
// graph is acyclic, that expressions reference only declared parents and the
// variable's own noise, and that tables are total over their domains.
class Scm {
 public:
  Scm() = default;
  explicit Scm(std::vector<Mechanism> mechanisms);

  int size() const { return static_cast<int>(mechanisms_.size()); }
  const std::vector<Mechanism>& mechanisms() const { return mechanisms_; }
  const Mechanism& mechanism(int i) const { return mechanisms_.at(static_cast<std::size_t>(i)); }
  int index_of(std::string_view name) const { return graph_.index_of(name); }
  const Dag& graph() const { return graph_; }
  const std::vector<int>& order() const { return order_; }
  // Expression has the form g(parents) + noise.
  bool additive_noise(int i) const { return additive_[static_cast<std::size_t>(i)]; }

  // Evaluates variable i given values of all variables (indexed) and its noise.
  double assign(int i, const Eigen::Ref<const Eigen::VectorXd>& values, double noise) const;
  // Full row of variable values from a full noise row.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& noise) const;

 private:
  std::vector<Mechanism> mechanisms_;
  Dag graph_;
  std::vector<int> order_;
  std::vector<char> additive_;
  std::vector<std::vector<int>> parent_index_;
};

Dag induced_graph(const Scm& m);

// rows x variables noise draws following the stream discipline in rng.hpp.
Eigen::MatrixXd sample_noise(const Scm& m, Eigen::Index n, std::uint64_t seed);

Dataset sample(const Scm& m, Eigen::Index n, std::uint64_t seed);

// Ancestral sampling through the reduced form: every variable is written as a
// function of the noises alone and evaluated without reference to the other
// variables. Same seed gives rows identical to sample().
Dataset reduced_form_sample(const Scm& m, Eigen::Index n, std::uint64_t seed);
// Reduced-form expression of variable `name`; noise references are qualified
// with their owning variable.
Expr reduced_form(const Scm& m, const std::string& name);

Scm intervene(const Scm& m, const Intervention& i);
// Soft intervention: replaces the noise distribution of one variable.
Scm with_noise(const Scm& m, const std::string& name, NoiseSpec noise);

struct MonteCarloMean {
  double mean = 0.0;
  double std_error = 0.0;
  Eigen::Index n = 0;
};

MonteCarloMean interventional_mean(const Scm& m, const Intervention& i, const std::string& target,
                                   Eigen::Index n, std::uint64_t seed);

struct Distribution {
  std::vector<std::pair<double, double>> points;  // (value, probability), sorted by value
  double mean() const;
  bool point_mass() const { return points.size() == 1; }
};

// Abduction-action-prediction. `evidence` must assign every variable.
Distribution counterfactual(const Scm& m, const Assignment& evidence, const Intervention& i,
                            const std::string& target);

// Noise posterior for each variable given a full observation (abduction step).
std::vector<Distribution> abduct(const Scm& m, const Assignment& evidence);

// Y(1) - Y(0) under a fixed full noise assignment.
double ite(const Scm& m, const Assignment& noise_row, const std::string& treatment,
           const std::string& target);

// ---------------------------------------------------------------- templates

template <typename ParentFn, typename NoiseFn>
double evaluate(const Expr& e, const ParentFn& parent, const NoiseFn& noise) {
  const ExprNode& n = e.node();
  auto arg = [&](std::size_t k) { return evaluate(n.args[k], parent, noise); };
  switch (n.op) {
    case ExprOp::kConst:
      return n.value;
    case ExprOp::kParent:
      return parent(n.name);
    case ExprOp::kNoise:
      return noise(n.name);
    case ExprOp::kAdd:
      return arg(0) + arg(1);
    case ExprOp::kSub:
      return arg(0) - arg(1);
    case ExprOp::kMul:
      return arg(0) * arg(1);
    case ExprOp::kPow:
      return std::pow(arg(0), arg(1));
    case ExprOp::kTanh:
      return std::tanh(arg(0));
    case ExprOp::kCube: {
      const double x = arg(0);
      return x * x * x;
    }
    case ExprOp::kSign: {
      const double x = arg(0);
      return static_cast<double>((x > 0.0) - (x < 0.0));
    }
    case ExprOp::kIndicator:
      return arg(0) >= n.value ? 1.0 : 0.0;
    case ExprOp::kTable: {
      std::vector<double> key;
      key.reserve(n.args.size());
      for (std::size_t k = 0; k < n.args.size(); ++k) key.push_back(arg(k));
      auto it = n.table.find(key);
      if (it == n.table.end()) throw std::out_of_range("table expression: no row for input configuration");
      return it->second;
    }
  }
  return 0.0;
}

}  // namespace causelab
