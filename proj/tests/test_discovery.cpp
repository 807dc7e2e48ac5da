#include "causelab/cgm.hpp"
#include "causelab/discovery.hpp"
#include "causelab/error.hpp"
#include "causelab/scenarios.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace causelab;

namespace {

std::set<std::pair<std::string, std::string>> named_edges(const Skeleton& s) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : s.edges) {
    auto x = s.names[static_cast<std::size_t>(a)], y = s.names[static_cast<std::size_t>(b)];
    if (y < x) std::swap(x, y);
    out.insert({x, y});
  }
  return out;
}

Dataset scenario_data(const std::string& name, Eigen::Index n, std::uint64_t seed) {
  return generate(make_scenario(name), n, seed);
}

Skeleton skeleton_from(const std::vector<std::string>& names, std::set<Edge> edges, std::map<Edge, NodeSet> sep) {
  Skeleton s;
  s.names = names;
  s.edges = std::move(edges);
  s.separating = std::move(sep);
  return s;
}

}  // namespace

TEST(Sgs, ColliderAndChainData) {
  const Dataset coll = scenario_data("collider", 5000, 1);
  DiscoveryConfig cfg;
  const Skeleton s = sgs_skeleton(coll, cfg);
  EXPECT_EQ(named_edges(s), (std::set<std::pair<std::string, std::string>>{{"X", "Y"}, {"Y", "Z"}}));
  const int x = coll.index_of("X"), z = coll.index_of("Z");
  ASSERT_TRUE(s.separating.count({std::min(x, z), std::max(x, z)}));
  EXPECT_TRUE(s.separating.at({std::min(x, z), std::max(x, z)}).empty());

  const Skeleton c = sgs_skeleton(scenario_data("chain", 5000, 2), cfg);
  EXPECT_EQ(named_edges(c), (std::set<std::pair<std::string, std::string>>{{"X", "Y"}, {"Y", "Z"}}));
}

TEST(Sgs, IndependentColumnsGiveAnEmptySkeleton) {
  RngStream rng(5, 0);
  std::vector<Eigen::VectorXd> cols(3, Eigen::VectorXd(3000));
  for (auto& c : cols) {
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.normal();
  }
  DiscoveryConfig cfg;
  cfg.ci.alpha = 0.01;
  EXPECT_TRUE(sgs_skeleton(Dataset({"A", "B", "C"}, cols), cfg).edges.empty());
}

TEST(Sgs, EnforcesVariableLimit) {
  const auto names = oracle::letters(kSgsVariableLimit + 1);
  EXPECT_THROW(sgs_skeleton(names, [](int, int, const NodeSet&) { return false; }, 2), LimitExceeded);
}

TEST(Pc, OracleSkeletonAndAgreementWithSgs) {
  for (int n = 1; n <= 5; ++n) {
    for_each_dag(oracle::letters(n), [&](const Dag& g) {
      const auto oracle_test = dsep_oracle(g);
      const Skeleton pc = pc_skeleton(g.names(), oracle_test, n);
      ASSERT_EQ(pc.edges, skeleton_and_vstructures(g).skeleton);
      if (n <= 4) {
        const Skeleton sgs = sgs_skeleton(g.names(), oracle_test, n);
        ASSERT_EQ(sgs.edges, pc.edges);
        ASSERT_EQ(orient(sgs).cpdag, orient(pc).cpdag);
      }
    });
  }
}

TEST(Pc, ColliderDataMatchesSgs) {
  const Dataset coll = scenario_data("collider", 5000, 3);
  DiscoveryConfig cfg;
  EXPECT_EQ(pc_skeleton(coll, cfg).edges, sgs_skeleton(coll, cfg).edges);
}

TEST(Pc, SingleVariable) {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(50, 0, 1);
  EXPECT_TRUE(pc_skeleton(Dataset({"X"}, {x}), DiscoveryConfig{}).edges.empty());
}

TEST(Orient, ColliderAndChainSkeletons) {
  const std::vector<std::string> names{"X", "Y", "Z"};
  const Orientation coll = orient(skeleton_from(names, {{0, 1}, {1, 2}}, {{{0, 2}, NodeSet{}}}));
  EXPECT_EQ(coll.cpdag.directed, (std::set<Edge>{{0, 1}, {2, 1}}));
  EXPECT_TRUE(coll.cpdag.undirected.empty());
  EXPECT_EQ(coll.v_structures, (std::set<VStructure>{{0, 1, 2}}));
  const Orientation chain = orient(skeleton_from(names, {{0, 1}, {1, 2}}, {{{0, 2}, NodeSet{1}}}));
  EXPECT_TRUE(chain.cpdag.directed.empty());
  EXPECT_EQ(chain.cpdag.undirected.size(), 2u);
  EXPECT_TRUE(chain.conflicts.empty());
}

TEST(Orient, ConflictingCollidersAreReported) {
  // A - B - C - D with empty separating sets for (A, C) and (B, D): both
  // B and C want to be colliders on the shared edge.
  const Orientation o = orient(skeleton_from({"A", "B", "C", "D"}, {{0, 1}, {1, 2}, {2, 3}},
                                             {{{0, 2}, NodeSet{}}, {{1, 3}, NodeSet{}}, {{0, 3}, NodeSet{}}}));
  EXPECT_FALSE(o.conflicts.empty());
  EXPECT_TRUE(o.cpdag.directed.count({0, 1}));
  EXPECT_TRUE(o.cpdag.directed.count({2, 1}));
}

TEST(Orient, OracleModeRecoversTheCpdag) {
  for (int n = 1; n <= 5; ++n) {
    for_each_dag(oracle::letters(n), [&](const Dag& g) {
      const Orientation o = orient(pc_skeleton(g.names(), dsep_oracle(g), n));
      ASSERT_EQ(o.cpdag, cpdag_of(g));
      ASSERT_TRUE(o.conflicts.empty());
    });
  }
}

TEST(Bic, EmptyGraphOnBinaryData) {
  RngStream rng(3, 0);
  std::vector<Eigen::VectorXd> cols(3, Eigen::VectorXd(2000));
  const double rates[3] = {0.2, 0.5, 0.7};
  for (int j = 0; j < 3; ++j) {
    for (Eigen::Index i = 0; i < 2000; ++i) cols[static_cast<std::size_t>(j)][i] = rng.bernoulli(rates[j]);
  }
  const Dataset d({"A", "B", "C"}, cols);
  double expected = 0;
  const double m = 2000;
  for (const auto& c : cols) {
    const double p = c.mean();
    expected += m * (p * std::log(p) + (1 - p) * std::log(1 - p));
  }
  expected -= 3.0 / 2.0 * std::log(m);
  EXPECT_NEAR(bic_score(d, Dag({"A", "B", "C"}, {}), ScoreModel::kMultinomial), expected, 1e-8);
  // one more edge adds one free parameter and never lowers the likelihood
  const double with_edge = bic_score(d, Dag({"A", "B", "C"}, {{0, 1}}), ScoreModel::kMultinomial);
  EXPECT_GE(with_edge + 0.5 * std::log(m), expected - 1e-9);
}

TEST(Bic, ChainDataPrefersTheTrueClass) {
  const Dataset d = scenario_data("chain", 10000, 4);
  const auto& names = d.names();
  const Dag truth = Dag::from_named_edges(names, {{"X", "Y"}, {"Y", "Z"}});
  const Dag empty(names, {});
  const Dag complete = Dag::from_named_edges(names, {{"X", "Y"}, {"Y", "Z"}, {"X", "Z"}});
  const double s = bic_score(d, truth);
  EXPECT_GT(s, bic_score(d, empty));
  EXPECT_GT(s, bic_score(d, complete));
}

TEST(Bic, ScoreEquivalenceOnFourNodes) {
  const DiscreteCgm m = random_cgm(oracle::random_dag(4, 0.6, 2), {2, 3, 2, 2}, 2);
  const Dataset discrete = oracle::sample_cgm(m, 3000, 1);
  const Dataset gaussian = scenario_data("chain", 2000, 5);
  const auto dags = oracle::all_dags(4);
  std::map<std::pair<std::set<Edge>, std::set<VStructure>>, double> seen;
  for (const auto& g : dags) {
    const auto sv = skeleton_and_vstructures(g);
    const Dag named(discrete.names(), g.edges());
    const double s = bic_score(discrete, named, ScoreModel::kMultinomial);
    auto [it, inserted] = seen.emplace(std::make_pair(sv.skeleton, sv.v_structures), s);
    if (!inserted) {
      ASSERT_NEAR(it->second, s, 1e-6);
    }
  }
  for (const auto& g : oracle::all_dags(3)) {
    for (const auto& h : oracle::all_dags(3)) {
      if (!markov_equivalent(g, h)) continue;
      EXPECT_NEAR(bic_score(gaussian, Dag(gaussian.names(), g.edges()), ScoreModel::kLinearGaussian),
                  bic_score(gaussian, Dag(gaussian.names(), h.edges()), ScoreModel::kLinearGaussian), 1e-6);
    }
  }
}

TEST(ScoreSearch, ExhaustiveFindsTheCollider) {
  const Dataset d = scenario_data("collider", 5000, 6);
  DiscoveryConfig cfg;
  cfg.search = SearchMode::kExhaustive;
  const auto r = score_search(d, cfg);
  EXPECT_EQ(r.graphs_scored, 25);
  EXPECT_EQ(r.dag, Dag::from_named_edges(d.names(), {{"X", "Y"}, {"Z", "Y"}}));
}

TEST(ScoreSearch, GreedyLandsInTheColliderClass) {
  const Dag truth = Dag::from_named_edges({"X", "Z", "Y"}, {{"X", "Y"}, {"Z", "Y"}});
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset d = scenario_data("collider", 5000, seed);
    const auto r = score_search(d, DiscoveryConfig{});
    if (markov_equivalent(Dag(truth.names(), r.dag.edges()), truth)) ++hits;
  }
  EXPECT_GE(hits, 9);
}

TEST(ScoreSearch, PureNoisePrefersTheEmptyGraph) {
  RngStream rng(8, 0);
  std::vector<Eigen::VectorXd> cols(4, Eigen::VectorXd(5000));
  for (auto& c : cols) {
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.normal();
  }
  const Dataset d({"A", "B", "C", "D"}, cols);
  DiscoveryConfig cfg;
  cfg.search = SearchMode::kExhaustive;
  EXPECT_TRUE(score_search(d, cfg).dag.edges().empty());
  cfg.search = SearchMode::kGreedy;
  EXPECT_TRUE(score_search(d, cfg).dag.edges().empty());
}

TEST(ScoreSearch, ExhaustiveLimit) {
  std::vector<Eigen::VectorXd> cols(6, Eigen::VectorXd::LinSpaced(30, 0, 1));
  DiscoveryConfig cfg;
  cfg.search = SearchMode::kExhaustive;
  EXPECT_THROW(score_search(Dataset(oracle::letters(6), cols), cfg), LimitExceeded);
}

TEST(Anm, LabelSymmetry) {
  const Dataset d = scenario_data("anm-nonlinear", 300, 2);
  DiscoveryConfig cfg;
  cfg.anm_permutations = 99;
  const auto fwd = anm_direction(d, "X", "Y", cfg);
  const auto bwd = anm_direction(d, "Y", "X", cfg);
  EXPECT_EQ(fwd.p_forward, bwd.p_backward);
  EXPECT_EQ(fwd.p_backward, bwd.p_forward);
  const auto swapped = fwd.direction == AnmDirection::kForward    ? AnmDirection::kBackward
                       : fwd.direction == AnmDirection::kBackward ? AnmDirection::kForward
                                                                   : AnmDirection::kUndecided;
  EXPECT_EQ(bwd.direction, swapped);
}

TEST(Anm, IndependentPairIsUndecided) {
  RngStream rng(1, 0);
  Eigen::VectorXd x(400), y(400);
  for (int i = 0; i < 400; ++i) {
    x[i] = rng.uniform(-1, 1);
    y[i] = rng.uniform(-1, 1);
  }
  DiscoveryConfig cfg;
  cfg.anm_permutations = 99;
  EXPECT_EQ(anm_direction(Dataset({"X", "Y"}, {x, y}), "X", "Y", cfg).direction, AnmDirection::kUndecided);
}

TEST(Anm, NonlinearPairGoesForward) {
  DiscoveryConfig cfg;
  cfg.anm_permutations = 99;
  int forward = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    if (anm_direction(scenario_data("anm-nonlinear", 500, seed), "X", "Y", cfg).direction == AnmDirection::kForward) {
      ++forward;
    }
  }
  EXPECT_GE(forward, 4);
}

TEST(Anm, Preconditions) {
  const Dataset small = scenario_data("anm-nonlinear", 50, 1);
  EXPECT_THROW(anm_direction(small, "X", "Y", DiscoveryConfig{}), PreconditionFailed);
  EXPECT_EQ(to_string(AnmDirection::kUndecided), "undecided");
}
