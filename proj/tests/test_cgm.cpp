#include "causelab/cgm.hpp"
#include "causelab/error.hpp"
#include "causelab/graph.hpp"
#include "causelab/scenarios.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace causelab;

namespace {

// p(x) for a full state vector as a direct product of CPT entries.
double product_of_cpts(const DiscreteCgm& m, const std::vector<int>& x) {
  double p = 1.0;
  for (int v = 0; v < m.size(); ++v) {
    const auto& pa = m.dag().parents(v);
    int row = 0;
    for (int q : pa) row = row * m.cardinality(q) + x[static_cast<std::size_t>(q)];
    p *= m.cpt(v).table(row, x[static_cast<std::size_t>(v)]);
  }
  return p;
}

// Iterates every full state vector in mixed radix (first variable most significant).
template <typename Fn>
void for_each_state(const DiscreteCgm& m, Fn fn) {
  const auto cards = m.cards();
  std::vector<int> x(cards.size(), 0);
  while (true) {
    fn(x);
    int k = static_cast<int>(x.size()) - 1;
    while (k >= 0 && ++x[static_cast<std::size_t>(k)] == cards[static_cast<std::size_t>(k)]) {
      x[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

Eigen::VectorXd brute_condition(const DiscreteCgm& m, int query, const StateAssignment& given) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m.cardinality(query));
  for_each_state(m, [&](const std::vector<int>& x) {
    for (const auto& [v, s] : given) {
      if (x[static_cast<std::size_t>(v)] != s) return;
    }
    out[x[static_cast<std::size_t>(query)]] += product_of_cpts(m, x);
  });
  return out / out.sum();
}

double entropy(const Eigen::VectorXd& p) {
  double h = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

}  // namespace

TEST(Joint, SingleNode) {
  Eigen::MatrixXd t(1, 2);
  t << 0.3, 0.7;
  const DiscreteCgm m(Dag({"A"}, {}), {{0, 1}}, {t});
  const Factor j = joint(m);
  EXPECT_DOUBLE_EQ(j.values()[0], 0.3);
  EXPECT_DOUBLE_EQ(j.values()[1], 0.7);
}

TEST(Joint, MatchesProductOfCptsAndReadsBack) {
  const DiscreteCgm m = random_cgm(fixtures::triangle(), {2, 3, 2}, 5);
  const Factor j = joint(m);
  EXPECT_NEAR(j.sum(), 1.0, 1e-12);
  for_each_state(m, [&](const std::vector<int>& x) { EXPECT_NEAR(j.at(x), product_of_cpts(m, x), 1e-15); });
  for (int v = 0; v < m.size(); ++v) {
    const Eigen::MatrixXd back = conditional_table(j, v, m.dag().parents(v));
    EXPECT_LT((back - m.cpt(v).table).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Joint, EntangledFactorizationReproducesJoint) {
  const DiscreteCgm m = random_cgm(oracle::random_dag(4, 0.6, 3), {2, 2, 3, 2}, 8);
  const Factor j = joint(m);
  for (const std::vector<int>& order : {std::vector<int>{0, 1, 2, 3}, std::vector<int>{3, 1, 0, 2}}) {
    const Factor rebuilt = product(entangled_factorization(j, order)).marginal({0, 1, 2, 3});
    EXPECT_LT(max_abs_diff(rebuilt, j), 1e-12);
  }
}

TEST(Joint, RejectsBadTablesAndHugeStateSpaces) {
  Eigen::MatrixXd t(1, 2);
  t << 0.3, 0.6;
  EXPECT_THROW(DiscreteCgm(Dag({"A"}, {}), {{0, 1}}, {t}), InvalidInput);
  const DiscreteCgm m = random_cgm(Dag({"A", "B", "C"}, {}), {4, 4, 4}, 1);
  EXPECT_THROW(joint(m, 32.0), LimitExceeded);
}

TEST(Condition, SumOverTheOtherParent) {
  const DiscreteCgm m = random_cgm(fixtures::triangle(), {2, 2, 2}, 11);
  const auto& p1 = m.cpt(0).table;
  const auto& p2 = m.cpt(1).table;
  const auto& p3 = m.cpt(2).table;
  for (int x2 = 0; x2 < 2; ++x2) {
    // p(x1 | x2) by Bayes, then sum_x1 p(x1 | x2) p(X3 | x1, x2)
    Eigen::Vector2d w;
    for (int x1 = 0; x1 < 2; ++x1) w[x1] = p1(0, x1) * p2(x1, x2);
    w /= w.sum();
    Eigen::Vector2d expected = Eigen::Vector2d::Zero();
    for (int x1 = 0; x1 < 2; ++x1) expected += w[x1] * p3.row(2 * x1 + x2).transpose();
    EXPECT_LT((condition(m, 2, {{1, x2}}) - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Condition, IndicatorAndBruteForce) {
  const DiscreteCgm m = random_cgm(oracle::random_dag(4, 0.5, 2), {2, 3, 2, 2}, 4);
  const Eigen::VectorXd ind = condition(m, 1, {{0, 1}, {1, 2}, {2, 0}, {3, 1}});
  EXPECT_DOUBLE_EQ(ind[2], 1.0);
  EXPECT_DOUBLE_EQ(ind[0] + ind[1], 0.0);
  for (int q = 0; q < 4; ++q) {
    const StateAssignment given{{(q + 1) % 4, 1}, {(q + 2) % 4, 0}};
    EXPECT_LT((condition(m, q, given) - brute_condition(m, q, given)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Condition, ZeroProbabilityEvidenceIsAnError) {
  Eigen::MatrixXd a(1, 2), b(2, 2);
  a << 1.0, 0.0;
  b << 0.5, 0.5, 0.5, 0.5;
  const DiscreteCgm m(Dag({"A", "B"}, {{0, 1}}), {{0, 1}, {0, 1}}, {a, b});
  EXPECT_THROW(condition(m, 1, {{0, 1}}), ZeroProbabilityEvidence);
}

TEST(TruncatedFactorization, BackdoorSum) {
  const DiscreteCgm m = random_cgm(fixtures::triangle(), {2, 2, 2}, 13);
  const auto& p1 = m.cpt(0).table;
  const auto& p3 = m.cpt(2).table;
  for (int x2 = 0; x2 < 2; ++x2) {
    const Factor f = truncated_factorization(m, {{1, x2}}).marginal({2});
    Eigen::Vector2d expected = Eigen::Vector2d::Zero();
    for (int x1 = 0; x1 < 2; ++x1) expected += p1(0, x1) * p3.row(2 * x1 + x2).transpose();
    EXPECT_LT((f.values() - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(TruncatedFactorization, FullInterventionIsAPointMass) {
  const DiscreteCgm m = random_cgm(fixtures::triangle(), {2, 3, 2}, 2);
  const Factor f = truncated_factorization(m, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_DOUBLE_EQ(f.at({1, 2, 0}), 1.0);
  EXPECT_DOUBLE_EQ(f.sum(), 1.0);
}

TEST(TruncatedFactorization, DiffersFromConditioningOnlyUnderConfounding) {
  const Dag conf = Dag::from_named_edges({"Z", "T", "Y"}, {{"Z", "T"}, {"Z", "Y"}, {"T", "Y"}});
  const Dag root = Dag::from_named_edges({"T", "Z", "Y"}, {{"T", "Y"}, {"Z", "Y"}});
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DiscreteCgm c = random_cgm(conf, {2, 2, 2}, seed);
    const Eigen::MatrixXd iv = interventional_table(c, 1, 2);
    EXPECT_GT((iv.row(1).transpose() - condition(c, 2, {{1, 1}})).cwiseAbs().maxCoeff(), 1e-6);
    const DiscreteCgm r = random_cgm(root, {2, 2, 2}, seed);
    const Eigen::MatrixXd rv = interventional_table(r, 0, 2);
    EXPECT_LT((rv.row(1).transpose() - condition(r, 2, {{0, 1}})).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(AdjustmentFormula, ValidSetsReproduceTheInterventionalTable) {
  const Dag g = fixtures::three_covariates();
  const int t = g.index_of("T");
  const int y = g.index_of("Y");
  const NodeSet x1{0}, x2{1}, x12{0, 1}, x13{0, 2};
  int deviating = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DiscreteCgm m = random_cgm(g, {2, 2, 2, 2, 2}, seed);
    const Eigen::MatrixXd truth = interventional_table(m, t, y);
    for (const auto& z : {x1, x2, x12}) {
      EXPECT_LT((adjustment_formula(m, t, y, z) - truth).cwiseAbs().maxCoeff(), 1e-10);
    }
    if ((adjustment_formula(m, t, y, x13) - truth).cwiseAbs().maxCoeff() > 1e-3) ++deviating;
  }
  EXPECT_GE(deviating, 19);
}

TEST(AdjustmentFormula, EmptySetForRootTreatment) {
  const Dag g = Dag::from_named_edges({"T", "W", "Y"}, {{"T", "Y"}, {"W", "Y"}});
  const DiscreteCgm m = random_cgm(g, {2, 2, 3}, 6);
  const Eigen::MatrixXd adj = adjustment_formula(m, 0, 2, {});
  for (int t = 0; t < 2; ++t) {
    EXPECT_LT((adj.row(t).transpose() - condition(m, 2, {{0, t}})).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(AdjustmentFormula, GFormulaAgreesWithTheGraphicalCriterion) {
  // Every subset the criterion accepts reproduces the interventional table.
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Dag g = oracle::random_dag(5, 0.5, seed + 100);
    const auto order = topological_order(g);
    const int t = order[1];
    const int y = order[4];
    const DiscreteCgm m = random_cgm(g, {2, 2, 2, 2, 2}, seed);
    const Eigen::MatrixXd truth = interventional_table(m, t, y);
    for (const NodeSet& z : enumerate_adjustment_sets(g, t, y).sets) {
      EXPECT_LT((adjustment_formula(m, t, y, z) - truth).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(FrontDoor, MatchesTheLatentVisibleIntervention) {
  const DiscreteCgm m = frontdoor_cgm();
  const int t = 1, med = 2, y = 3;
  const Eigen::MatrixXd fd = front_door_formula(m, t, med, y);
  const Eigen::MatrixXd truth = interventional_table(m, t, y);
  EXPECT_LT((fd - truth).cwiseAbs().maxCoeff(), 1e-10);
  // the two halves
  const Eigen::MatrixXd pm = mediator_given_treatment(m, t, med);
  for (int tv = 0; tv < 2; ++tv) {
    EXPECT_LT((pm.row(tv).transpose() - condition(m, med, {{t, tv}})).cwiseAbs().maxCoeff(), 1e-12);
  }
  const Eigen::MatrixXd py = outcome_given_do_mediator(m, t, med, y);
  EXPECT_LT((py - interventional_table(m, med, y)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((pm * py - fd).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FrontDoor, MediatorIgnoringTreatmentGivesNoEffect) {
  const DiscreteCgm base = frontdoor_cgm();
  Eigen::MatrixXd flat(2, 2);
  flat << 0.4, 0.6, 0.4, 0.6;
  const DiscreteCgm m = with_cpt(base, 2, flat);
  const Eigen::MatrixXd fd = front_door_formula(m, 1, 2, 3);
  EXPECT_LT((fd.row(0) - fd.row(1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cmi, SeparatedPairsAndEntropy) {
  const DiscreteCgm chain = random_cgm(fixtures::chain(), {2, 3, 2}, 9);
  EXPECT_LT(std::abs(cmi(chain, 0, 2, {1})), 1e-10);
  EXPECT_GT(cmi(chain, 0, 2, {}), 1e-10);
  const Eigen::VectorXd px = condition(chain, 0, {});
  EXPECT_NEAR(cmi(chain, 0, 0, {}), entropy(px), 1e-12);
}

TEST(Cmi, CausalMarkovOnFourNodeGraphs) {
  const auto dags = oracle::all_dags(4);
  for (std::size_t i = 0; i < dags.size(); i += 9) {
    const DiscreteCgm m = random_cgm(dags[i], {2, 2, 2, 2}, i + 1);
    for (const auto& ind : implied_independences(dags[i])) {
      ASSERT_LT(cmi(m, ind.a, ind.b, ind.given), 1e-10) << "graph " << i;
    }
  }
}

TEST(Cmi, CancellingPathsHideADependence) {
  // p(X3=1 | x1, x2) = 0.5 - 0.15 x1 + 0.25 x2 with p(x2=1 | x1) = 0.2 + 0.6 x1:
  // the direct and mediated contributions cancel in p(X3 | x1).
  Eigen::MatrixXd p1(1, 2), p2(2, 2), p3(4, 2);
  p1 << 0.5, 0.5;
  p2 << 0.8, 0.2, 0.2, 0.8;
  p3 << 0.5, 0.5, 0.25, 0.75, 0.65, 0.35, 0.4, 0.6;
  const DiscreteCgm m(fixtures::triangle(), {{0, 1}, {0, 1}, {0, 1}}, {p1, p2, p3});
  EXPECT_FALSE(d_separated(m.dag(), {0}, {2}, {}));
  EXPECT_LT(cmi(m, 0, 2, {}), 1e-12);
  EXPECT_GT(cmi(m, 0, 2, {1}), 1e-3);
}

TEST(Mechanisms, ReplacingOneTableLeavesTheOthersIntact) {
  const Dag g = oracle::random_dag(4, 0.7, 21);
  const DiscreteCgm m = random_cgm(g, {2, 2, 2, 2}, 21);
  const auto order = topological_order(g);
  const int changed = order[0];
  const DiscreteCgm m2 = with_cpt(m, changed, random_cgm(g, {2, 2, 2, 2}, 99).cpt(changed).table);
  const Factor j1 = joint(m);
  const Factor j2 = joint(m2);
  int causal_changes = 0;
  for (int v = 0; v < 4; ++v) {
    const auto& pa = g.parents(v);
    const double d = (conditional_table(j1, v, pa) - conditional_table(j2, v, pa)).cwiseAbs().maxCoeff();
    if (v != changed) {
      EXPECT_LT(d, 1e-12);
    }
    if (d > 1e-9) ++causal_changes;
  }
  EXPECT_EQ(causal_changes, 1);

  // the entangled factorization conditions on descendants, so the change leaks
  std::vector<int> ent_order(order.begin(), order.end());
  const auto e1 = entangled_factorization(j1, ent_order);
  const auto e2 = entangled_factorization(j2, ent_order);
  int entangled_changes = 0;
  for (std::size_t k = 0; k < e1.size(); ++k) {
    if (max_abs_diff(e1[k], e2[k]) > 1e-9) ++entangled_changes;
  }
  EXPECT_GE(entangled_changes, 2);
}
