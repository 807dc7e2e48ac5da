#include "causelab/cgm.hpp"

#include "causelab/error.hpp"
#include "causelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace causelab {

// ---------------------------------------------------------------- Factor

Factor::Factor(std::vector<int> scope, std::vector<int> cards, Eigen::VectorXd values)
    : scope_(std::move(scope)), cards_(std::move(cards)), values_(std::move(values)) {
  if (scope_.size() != cards_.size()) throw InvalidInput("Factor: scope/cardinality mismatch");
  Eigen::Index expected = 1;
  for (int c : cards_) {
    if (c < 1) throw InvalidInput("Factor: cardinality must be positive");
    expected *= c;
  }
  if (values_.size() != expected) throw InvalidInput("Factor: value count does not match scope");
  if ((values_.array() < 0.0).any()) throw InvalidInput("Factor: negative entry");
}

Eigen::Index Factor::index(const std::vector<int>& states) const {
  Eigen::Index idx = 0;
  for (std::size_t k = 0; k < scope_.size(); ++k) idx = idx * cards_[k] + states[k];
  return idx;
}

std::vector<int> Factor::states(Eigen::Index index) const {
  std::vector<int> s(scope_.size());
  for (std::size_t k = scope_.size(); k-- > 0;) {
    s[k] = static_cast<int>(index % cards_[k]);
    index /= cards_[k];
  }
  return s;
}

Factor Factor::marginal(const std::vector<int>& keep) const {
  std::vector<std::size_t> pos;
  std::vector<int> cards;
  for (int v : keep) {
    auto it = std::find(scope_.begin(), scope_.end(), v);
    if (it == scope_.end()) throw InvalidInput("Factor::marginal: variable not in scope");
    pos.push_back(static_cast<std::size_t>(it - scope_.begin()));
    cards.push_back(cards_[pos.back()]);
  }
  Eigen::Index out_size = 1;
  for (int c : cards) out_size *= c;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(out_size);
  std::vector<int> s(scope_.size(), 0);
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    Eigen::Index j = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) j = j * cards[k] + s[pos[k]];
    out[j] += values_[i];
    for (std::size_t k = s.size(); k-- > 0;) {
      if (++s[k] < cards_[k]) break;
      s[k] = 0;
    }
  }
  return Factor(keep, std::move(cards), std::move(out));
}

Factor Factor::reduce(const StateAssignment& evidence) const {
  std::vector<int> keep_scope;
  std::vector<int> keep_cards;
  for (std::size_t k = 0; k < scope_.size(); ++k) {
    if (!evidence.contains(scope_[k])) {
      keep_scope.push_back(scope_[k]);
      keep_cards.push_back(cards_[k]);
    }
  }
  Eigen::Index out_size = 1;
  for (int c : keep_cards) out_size *= c;
  Eigen::VectorXd out(out_size);
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const auto s = states(i);
    bool consistent = true;
    for (std::size_t k = 0; k < scope_.size() && consistent; ++k) {
      auto it = evidence.find(scope_[k]);
      if (it != evidence.end() && it->second != s[k]) consistent = false;
    }
    if (consistent) out[j++] = values_[i];
  }
  return Factor(std::move(keep_scope), std::move(keep_cards), std::move(out));
}

Factor product(const std::vector<Factor>& factors) {
  std::vector<int> scope;
  std::vector<int> cards;
  for (const auto& f : factors) {
    for (std::size_t k = 0; k < f.scope().size(); ++k) {
      auto it = std::find(scope.begin(), scope.end(), f.scope()[k]);
      if (it == scope.end()) {
        scope.push_back(f.scope()[k]);
        cards.push_back(f.cards()[k]);
      } else if (cards[static_cast<std::size_t>(it - scope.begin())] != f.cards()[k]) {
        throw InvalidInput("product: inconsistent cardinalities");
      }
    }
  }
  Eigen::Index size = 1;
  for (int c : cards) size *= c;
  Factor shape(scope, cards, Eigen::VectorXd::Zero(size));
  Eigen::VectorXd out = Eigen::VectorXd::Ones(size);
  for (const auto& f : factors) {
    std::vector<std::size_t> pos;
    for (int v : f.scope()) pos.push_back(static_cast<std::size_t>(std::find(scope.begin(), scope.end(), v) - scope.begin()));
    for (Eigen::Index i = 0; i < size; ++i) {
      const auto s = shape.states(i);
      std::vector<int> sub;
      for (auto p : pos) sub.push_back(s[p]);
      out[i] *= f.at(sub);
    }
  }
  return Factor(std::move(scope), std::move(cards), std::move(out));
}

double max_abs_diff(const Factor& a, const Factor& b) {
  const Factor aligned = b.marginal(a.scope());
  if (aligned.size() != a.size() || b.size() != a.size()) throw InvalidInput("max_abs_diff: scopes differ");
  return (a.values() - aligned.values()).cwiseAbs().maxCoeff();
}

Factor Cpt::as_factor(const std::vector<int>& cards) const {
  std::vector<int> scope = parents;
  scope.push_back(child);
  std::vector<int> fc;
  for (int v : scope) fc.push_back(cards[static_cast<std::size_t>(v)]);
  Eigen::VectorXd values(table.size());
  // Row-major flattening matches the mixed-radix layout (parents, child).
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) values[r * table.cols() + c] = table(r, c);
  }
  return Factor(std::move(scope), std::move(fc), std::move(values));
}

// ---------------------------------------------------------------- model

DiscreteCgm::DiscreteCgm(Dag dag, std::vector<std::vector<double>> domains, std::vector<Eigen::MatrixXd> tables)
    : dag_(std::move(dag)), domains_(std::move(domains)) {
  const auto n = static_cast<std::size_t>(dag_.size());
  if (domains_.size() != n || tables.size() != n) throw InvalidInput("DiscreteCgm: one domain and table per node");
  for (std::size_t v = 0; v < n; ++v) {
    const auto& d = domains_[v];
    if (d.empty()) throw InvalidInput("DiscreteCgm: empty domain for '" + dag_.name(static_cast<int>(v)) + "'");
    if (std::set<double>(d.begin(), d.end()).size() != d.size()) {
      throw InvalidInput("DiscreteCgm: duplicate domain value for '" + dag_.name(static_cast<int>(v)) + "'");
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    const int node = static_cast<int>(v);
    Cpt cpt{node, dag_.parents(node), std::move(tables[v])};
    Eigen::Index rows = 1;
    for (int p : cpt.parents) rows *= static_cast<Eigen::Index>(domains_[static_cast<std::size_t>(p)].size());
    const auto& name = dag_.name(node);
    if (cpt.table.rows() != rows || cpt.table.cols() != static_cast<Eigen::Index>(domains_[v].size())) {
      throw InvalidInput("DiscreteCgm: table for '" + name + "' must be " + std::to_string(rows) + " x " +
                         std::to_string(domains_[v].size()));
    }
    if ((cpt.table.array() < 0.0).any()) throw InvalidInput("DiscreteCgm: negative probability for '" + name + "'");
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (std::abs(cpt.table.row(r).sum() - 1.0) > 1e-12) {
        throw InvalidInput("DiscreteCgm: row " + std::to_string(r) + " of '" + name + "' does not sum to 1");
      }
    }
    cpts_.push_back(std::move(cpt));
  }
}

std::vector<int> DiscreteCgm::cards() const {
  std::vector<int> c;
  for (const auto& d : domains_) c.push_back(static_cast<int>(d.size()));
  return c;
}

int DiscreteCgm::state_of(int v, double value) const {
  const auto& d = domain(v);
  auto it = std::find(d.begin(), d.end(), value);
  if (it == d.end()) throw InvalidInput("value outside the domain of '" + dag_.name(v) + "'");
  return static_cast<int>(it - d.begin());
}

double DiscreteCgm::state_space() const {
  double total = 1.0;
  for (const auto& d : domains_) total *= static_cast<double>(d.size());
  return total;
}

// ---------------------------------------------------------------- queries

namespace {

std::vector<int> all_variables(const DiscreteCgm& m) {
  std::vector<int> v(static_cast<std::size_t>(m.size()));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Product of the CPTs, skipping the ones for `cut` (whose variable is then
// pinned by a delta at its intervened state).
Factor factorize(const DiscreteCgm& m, const StateAssignment& cut, double state_limit) {
  if (m.state_space() > state_limit) {
    throw LimitExceeded("joint state space " + std::to_string(m.state_space()) + " exceeds limit " +
                        std::to_string(state_limit));
  }
  const auto cards = m.cards();
  const std::vector<int> scope = all_variables(m);
  Eigen::Index size = 1;
  for (int c : cards) size *= c;
  Eigen::VectorXd values(size);
  std::vector<int> s(scope.size(), 0);
  for (Eigen::Index i = 0; i < size; ++i) {
    double p = 1.0;
    for (int v = 0; v < m.size() && p != 0.0; ++v) {
      auto it = cut.find(v);
      if (it != cut.end()) {
        if (s[static_cast<std::size_t>(v)] != it->second) p = 0.0;
        continue;
      }
      const Cpt& cpt = m.cpt(v);
      Eigen::Index row = 0;
      for (int pa : cpt.parents) row = row * cards[static_cast<std::size_t>(pa)] + s[static_cast<std::size_t>(pa)];
      p *= cpt.table(row, s[static_cast<std::size_t>(v)]);
    }
    values[i] = p;
    for (std::size_t k = s.size(); k-- > 0;) {
      if (++s[k] < cards[k]) break;
      s[k] = 0;
    }
  }
  return Factor(scope, cards, std::move(values));
}

void check_variable(const DiscreteCgm& m, int v) {
  if (v < 0 || v >= m.size()) throw InvalidInput("variable index " + std::to_string(v) + " out of range");
}

std::string describe_stratum(const DiscreteCgm& m, const std::vector<int>& vars, const std::vector<int>& states) {
  std::ostringstream out;
  out << "{";
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (k) out << ", ";
    out << m.dag().name(vars[k]) << "=" << m.domain(vars[k])[static_cast<std::size_t>(states[k])];
  }
  out << "}";
  return out.str();
}

}  // namespace

Factor joint(const DiscreteCgm& m, double state_limit) { return factorize(m, {}, state_limit); }

Eigen::VectorXd condition(const DiscreteCgm& m, int query, const StateAssignment& given) {
  check_variable(m, query);
  for (const auto& [v, s] : given) {
    check_variable(m, v);
    if (s < 0 || s >= m.cardinality(v)) throw InvalidInput("condition: state out of range");
  }
  auto it = given.find(query);
  if (it != given.end()) {
    Eigen::VectorXd indicator = Eigen::VectorXd::Zero(m.cardinality(query));
    // Still reject zero-probability evidence.
    const Factor reduced = joint(m).reduce(given);
    if (reduced.sum() <= 0.0) throw ZeroProbabilityEvidence("condition: evidence has probability zero");
    indicator[it->second] = 1.0;
    return indicator;
  }
  const Factor reduced = joint(m).reduce(given);
  const double mass = reduced.sum();
  if (mass <= 0.0) throw ZeroProbabilityEvidence("condition: evidence has probability zero");
  return reduced.marginal({query}).values() / mass;
}

Factor truncated_factorization(const DiscreteCgm& m, const StateAssignment& intervention) {
  for (const auto& [v, s] : intervention) {
    check_variable(m, v);
    if (s < 0 || s >= m.cardinality(v)) throw InvalidInput("truncated_factorization: intervention state out of range");
  }
  return factorize(m, intervention, kDefaultStateLimit);
}

Eigen::MatrixXd interventional_table(const DiscreteCgm& m, int treatment, int outcome) {
  check_variable(m, treatment);
  check_variable(m, outcome);
  Eigen::MatrixXd out(m.cardinality(treatment), m.cardinality(outcome));
  for (int t = 0; t < m.cardinality(treatment); ++t) {
    out.row(t) = truncated_factorization(m, {{treatment, t}}).marginal({outcome}).values().transpose();
  }
  return out;
}

Eigen::MatrixXd adjustment_formula(const DiscreteCgm& m, int treatment, int outcome, const NodeSet& z) {
  check_variable(m, treatment);
  check_variable(m, outcome);
  if (treatment == outcome || z.contains(treatment) || z.contains(outcome)) {
    throw InvalidInput("adjustment_formula: treatment, outcome and adjustment set must be disjoint");
  }
  std::vector<int> scope(z.begin(), z.end());
  for (int v : scope) check_variable(m, v);
  const std::size_t nz = scope.size();
  scope.push_back(treatment);
  scope.push_back(outcome);
  const Factor pzty = joint(m).marginal(scope);
  const int nt = m.cardinality(treatment);
  const int ny = m.cardinality(outcome);
  const Eigen::Index strata = pzty.size() / (nt * ny);

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nt, ny);
  for (Eigen::Index k = 0; k < strata; ++k) {
    // Rows of this stratum block: [t][y].
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> block(
        pzty.values().data() + k * nt * ny, nt, ny);
    const double pz = block.sum();
    if (pz <= 0.0) continue;
    for (int t = 0; t < nt; ++t) {
      const double pzt = block.row(t).sum();
      if (pzt <= 0.0) {
        std::vector<int> zs = pzty.states(k * nt * ny);
        zs.resize(nz);
        throw OverlapViolation("adjustment_formula: p(" + m.dag().name(treatment) + "=" +
                               std::to_string(m.domain(treatment)[static_cast<std::size_t>(t)]) +
                               ", z) = 0 in stratum " +
                               describe_stratum(m, std::vector<int>(scope.begin(), scope.begin() + static_cast<long>(nz)), zs));
      }
      out.row(t) += pz * block.row(t) / pzt;
    }
  }
  return out;
}

namespace {

void check_front_door_shape(const DiscreteCgm& m, int t, int med, int y) {
  const Dag& g = m.dag();
  std::vector<Edge> touching;
  for (const auto& e : g.edges()) {
    if (e.first == med || e.second == med) touching.push_back(e);
  }
  if (g.without_edges(touching).descendants({t}).contains(y)) {
    throw PreconditionFailed("front_door_formula: mediator does not intercept every directed path");
  }
  std::vector<Edge> out_of_t;
  for (int c : g.children(t)) out_of_t.emplace_back(t, c);
  if (!d_separated(g.without_edges(out_of_t), {t}, {med}, {})) {
    throw PreconditionFailed("front_door_formula: open back-door path from treatment to mediator");
  }
  std::vector<Edge> out_of_m;
  for (int c : g.children(med)) out_of_m.emplace_back(med, c);
  if (!d_separated(g.without_edges(out_of_m), {med}, {y}, {t})) {
    throw PreconditionFailed("front_door_formula: treatment does not block the mediator's back-door paths");
  }
}

Factor front_door_margin(const DiscreteCgm& m, int t, int med, int y) {
  check_variable(m, t);
  check_variable(m, med);
  check_variable(m, y);
  if (t == med || t == y || med == y) throw InvalidInput("front_door_formula: variables must be distinct");
  check_front_door_shape(m, t, med, y);
  const Factor ptmy = joint(m).marginal({t, med, y});
  const Factor ptm = ptmy.marginal({t, med});
  for (Eigen::Index i = 0; i < ptm.size(); ++i) {
    if (ptm.values()[i] <= 0.0) {
      const auto s = ptm.states(i);
      throw PreconditionFailed("front_door_formula: positivity violated, p(t, m) = 0 at " +
                               describe_stratum(m, {t, med}, s));
    }
  }
  return ptmy;
}

}  // namespace

Eigen::MatrixXd mediator_given_treatment(const DiscreteCgm& m, int treatment, int mediator) {
  const Factor ptm = joint(m).marginal({treatment, mediator});
  const int nt = m.cardinality(treatment);
  const int nm = m.cardinality(mediator);
  Eigen::MatrixXd out(nt, nm);
  for (int t = 0; t < nt; ++t) {
    const double pt = ptm.values().segment(t * nm, nm).sum();
    if (pt <= 0.0) throw ZeroProbabilityEvidence("mediator_given_treatment: p(t) = 0");
    out.row(t) = ptm.values().segment(t * nm, nm).transpose() / pt;
  }
  return out;
}

Eigen::MatrixXd outcome_given_do_mediator(const DiscreteCgm& m, int treatment, int mediator, int outcome) {
  const Factor ptmy = joint(m).marginal({treatment, mediator, outcome});
  const int nt = m.cardinality(treatment);
  const int nm = m.cardinality(mediator);
  const int ny = m.cardinality(outcome);
  const Eigen::VectorXd pt = ptmy.marginal({treatment}).values();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nm, ny);
  for (int med = 0; med < nm; ++med) {
    for (int t = 0; t < nt; ++t) {
      const Eigen::VectorXd row = ptmy.values().segment((t * nm + med) * ny, ny);
      const double ptm = row.sum();
      if (ptm <= 0.0) throw PreconditionFailed("outcome_given_do_mediator: p(t, m) = 0");
      out.row(med) += pt[t] * row.transpose() / ptm;
    }
  }
  return out;
}

Eigen::MatrixXd front_door_formula(const DiscreteCgm& m, int treatment, int mediator, int outcome) {
  front_door_margin(m, treatment, mediator, outcome);
  return mediator_given_treatment(m, treatment, mediator) * outcome_given_do_mediator(m, treatment, mediator, outcome);
}

double cmi(const DiscreteCgm& m, int a, int b, const NodeSet& z) {
  check_variable(m, a);
  check_variable(m, b);
  if (z.contains(a) || z.contains(b)) throw InvalidInput("cmi: conditioning set overlaps the query");
  const Factor full = joint(m);
  std::vector<int> zs(z.begin(), z.end());
  double total = 0.0;
  if (a == b) {
    // I(A; A | Z) = H(A | Z)
    std::vector<int> scope = zs;
    scope.push_back(a);
    const Factor paz = full.marginal(scope);
    const int na = m.cardinality(a);
    for (Eigen::Index k = 0; k < paz.size() / na; ++k) {
      const Eigen::VectorXd block = paz.values().segment(k * na, na);
      const double pz = block.sum();
      for (int i = 0; i < na; ++i) {
        if (block[i] > 0.0) total -= block[i] * std::log(block[i] / pz);
      }
    }
    return std::max(0.0, total);
  }
  std::vector<int> scope = zs;
  scope.push_back(a);
  scope.push_back(b);
  const Factor pzab = full.marginal(scope);
  const int na = m.cardinality(a);
  const int nb = m.cardinality(b);
  for (Eigen::Index k = 0; k < pzab.size() / (na * nb); ++k) {
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> block(
        pzab.values().data() + k * na * nb, na, nb);
    const double pz = block.sum();
    if (pz <= 0.0) continue;
    const Eigen::VectorXd pa = block.rowwise().sum();
    const Eigen::RowVectorXd pb = block.colwise().sum();
    for (int i = 0; i < na; ++i) {
      for (int j = 0; j < nb; ++j) {
        const double p = block(i, j);
        if (p > 0.0) total += p * std::log(p * pz / (pa[i] * pb[j]));
      }
    }
  }
  return std::max(0.0, total);
}

Eigen::MatrixXd conditional_table(const Factor& joint_factor, int child, const std::vector<int>& given) {
  std::vector<int> scope = given;
  scope.push_back(child);
  const Factor f = joint_factor.marginal(scope);
  const int nc = f.cards().back();
  const Eigen::Index rows = f.size() / nc;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, nc);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::VectorXd block = f.values().segment(r * nc, nc);
    const double mass = block.sum();
    if (mass > 0.0) out.row(r) = block.transpose() / mass;
  }
  return out;
}

std::vector<Factor> entangled_factorization(const Factor& joint_factor, const std::vector<int>& order) {
  std::vector<Factor> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::vector<int> rest(order.begin() + static_cast<long>(k) + 1, order.end());
    const Eigen::MatrixXd table = conditional_table(joint_factor, order[k], rest);
    std::vector<int> scope = rest;
    scope.push_back(order[k]);
    std::vector<int> cards;
    for (int v : scope) {
      const auto pos = std::find(joint_factor.scope().begin(), joint_factor.scope().end(), v) - joint_factor.scope().begin();
      cards.push_back(joint_factor.cards()[static_cast<std::size_t>(pos)]);
    }
    Eigen::VectorXd values(table.size());
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
      for (Eigen::Index c = 0; c < table.cols(); ++c) values[r * table.cols() + c] = table(r, c);
    }
    out.emplace_back(std::move(scope), std::move(cards), std::move(values));
  }
  return out;
}

DiscreteCgm with_cpt(const DiscreteCgm& m, int v, Eigen::MatrixXd table) {
  check_variable(m, v);
  std::vector<std::vector<double>> domains;
  std::vector<Eigen::MatrixXd> tables;
  for (int u = 0; u < m.size(); ++u) {
    domains.push_back(m.domain(u));
    tables.push_back(u == v ? table : m.cpt(u).table);
  }
  return DiscreteCgm(m.dag(), std::move(domains), std::move(tables));
}

DiscreteCgm random_cgm(const Dag& dag, const std::vector<int>& cards, std::uint64_t seed) {
  if (static_cast<int>(cards.size()) != dag.size()) throw InvalidInput("random_cgm: one cardinality per node");
  RngStream rng(seed, 0x63676d);
  std::vector<std::vector<double>> domains;
  std::vector<Eigen::MatrixXd> tables;
  for (int v = 0; v < dag.size(); ++v) {
    std::vector<double> d(static_cast<std::size_t>(cards[static_cast<std::size_t>(v)]));
    std::iota(d.begin(), d.end(), 0.0);
    domains.push_back(std::move(d));
    Eigen::Index rows = 1;
    for (int p : dag.parents(v)) rows *= cards[static_cast<std::size_t>(p)];
    Eigen::MatrixXd t(rows, cards[static_cast<std::size_t>(v)]);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = 0.05 + rng.uniform();
      t.row(r) /= t.row(r).sum();
      // Put the rounding residue on the last entry so rows sum to 1 tightly.
      t(r, t.cols() - 1) = 1.0 - t.row(r).head(t.cols() - 1).sum();
    }
    tables.push_back(std::move(t));
  }
  return DiscreteCgm(dag, std::move(domains), std::move(tables));
}

}  // namespace causelab
