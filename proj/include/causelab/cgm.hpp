#pragma once

#include "causelab/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <vector>

namespace causelab {

// Variable index -> state index.
using StateAssignment = std::map<int, int>;

// Non-negative table over the product domain of `scope`. Entries are laid out
// in mixed radix with the first scope variable most significant.
class Factor {
 public:
  Factor() = default;
  Factor(std::vector<int> scope, std::vector<int> cards, Eigen::VectorXd values);

  const std::vector<int>& scope() const { return scope_; }
  const std::vector<int>& cards() const { return cards_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }

  Eigen::Index index(const std::vector<int>& states) const;
  std::vector<int> states(Eigen::Index index) const;
  double at(const std::vector<int>& states) const { return values_[index(states)]; }
  double sum() const { return values_.sum(); }

  // Sums out everything not in `keep`; the result is ordered as `keep`.
  Factor marginal(const std::vector<int>& keep) const;
  // Entries consistent with `evidence`, remaining variables in scope order.
  Factor reduce(const StateAssignment& evidence) const;

 private:
  std::vector<int> scope_;
  std::vector<int> cards_;
  Eigen::VectorXd values_;
};

// Pointwise product of factors over the union of their scopes (scope order:
// first appearance).
Factor product(const std::vector<Factor>& factors);
double max_abs_diff(const Factor& a, const Factor& b);

// p(child | parents): rows are parent configurations in lexicographic order
// (first parent most significant), columns child states.
struct Cpt {
  int child = 0;
  std::vector<int> parents;
  Eigen::MatrixXd table;

  Factor as_factor(const std::vector<int>& cards) const;
};

// Discrete causal graphical model: a Dag plus one conditional table per node.
// Rows are checked to be normalized at construction.
class DiscreteCgm {
 public:
  DiscreteCgm() = default;
  DiscreteCgm(Dag dag, std::vector<std::vector<double>> domains, std::vector<Eigen::MatrixXd> tables);

  const Dag& dag() const { return dag_; }
  int size() const { return dag_.size(); }
  const std::vector<double>& domain(int v) const { return domains_.at(static_cast<std::size_t>(v)); }
  int cardinality(int v) const { return static_cast<int>(domain(v).size()); }
  std::vector<int> cards() const;
  const Cpt& cpt(int v) const { return cpts_.at(static_cast<std::size_t>(v)); }
  int state_of(int v, double value) const;
  double state_space() const;

 private:
  Dag dag_;
  std::vector<std::vector<double>> domains_;
  std::vector<Cpt> cpts_;
};

inline constexpr double kDefaultStateLimit = 4194304.0;  // 2^22

Factor joint(const DiscreteCgm& m, double state_limit = kDefaultStateLimit);

// p(query | given).
Eigen::VectorXd condition(const DiscreteCgm& m, int query, const StateAssignment& given);

// p(X | do(intervention)) over all variables.
Factor truncated_factorization(const DiscreteCgm& m, const StateAssignment& intervention);

// Rows: treatment states; columns: outcome states.
Eigen::MatrixXd interventional_table(const DiscreteCgm& m, int treatment, int outcome);
Eigen::MatrixXd adjustment_formula(const DiscreteCgm& m, int treatment, int outcome, const NodeSet& z);
Eigen::MatrixXd front_door_formula(const DiscreteCgm& m, int treatment, int mediator, int outcome);

// The two halves of the front-door identity, exposed for term-by-term checks:
// p(m | t) and, for each m, sum_t' p(t') p(y | m, t').
Eigen::MatrixXd mediator_given_treatment(const DiscreteCgm& m, int treatment, int mediator);
Eigen::MatrixXd outcome_given_do_mediator(const DiscreteCgm& m, int treatment, int mediator, int outcome);

// Conditional mutual information in nats.
double cmi(const DiscreteCgm& m, int a, int b, const NodeSet& z);

// p(child | given) read back from a joint over all variables; rows in
// lexicographic order of `given`. Rows with zero mass are left as zeros.
Eigen::MatrixXd conditional_table(const Factor& joint, int child, const std::vector<int>& given);

// Chain-rule factors p(X_o[k] | X_o[k+1], ..., X_o[n-1]) for an ordering o.
std::vector<Factor> entangled_factorization(const Factor& joint, const std::vector<int>& order);

DiscreteCgm with_cpt(const DiscreteCgm& m, int v, Eigen::MatrixXd table);

// Random CPTs with every entry bounded away from zero. Domains are 0..card-1.
DiscreteCgm random_cgm(const Dag& dag, const std::vector<int>& cards, std::uint64_t seed);

}  // namespace causelab
