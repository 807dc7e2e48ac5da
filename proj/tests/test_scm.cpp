#include "causelab/cgm.hpp"
#include "causelab/error.hpp"
#include "causelab/linalg.hpp"
#include "causelab/scm.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace causelab;

namespace {

// Binary variables on a DAG; each mechanism is a random table over
// (parents..., U) with U uniform-ish on {0, 1, 2, 3}.
struct DiscreteFixture {
  Scm scm;
  std::vector<std::vector<double>> noise_probs;
};

DiscreteFixture random_discrete_scm(const Dag& g, std::uint64_t seed) {
  RngStream rng(seed, 11);
  DiscreteFixture out;
  std::vector<Mechanism> mechs;
  for (int v = 0; v < g.size(); ++v) {
    std::vector<double> probs(4);
    double total = 0;
    for (auto& p : probs) total += (p = 0.2 + rng.uniform());
    for (auto& p : probs) p /= total;
    // re-normalize so the last entry absorbs rounding
    double head = 0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) head += probs[k];
    probs.back() = 1.0 - head;
    out.noise_probs.push_back(probs);

    std::vector<std::string> parents;
    std::vector<Expr> inputs;
    for (int p : g.parents(v)) {
      parents.push_back(g.name(p));
      inputs.push_back(Expr::parent(g.name(p)));
    }
    inputs.push_back(Expr::noise());
    std::map<std::vector<double>, double> rows;
    const int configs = 1 << parents.size();
    for (int c = 0; c < configs; ++c) {
      for (int u = 0; u < 4; ++u) {
        std::vector<double> key;
        for (std::size_t k = 0; k < parents.size(); ++k) key.push_back(static_cast<double>(c >> (parents.size() - 1 - k) & 1));
        key.push_back(u);
        rows[key] = rng.uniform() < 0.5 ? 0.0 : 1.0;
      }
    }
    mechs.push_back({g.name(v), parents, Expr::table(inputs, rows), NoiseSpec::finite({0, 1, 2, 3}, probs),
                     std::vector<double>{0, 1}});
  }
  out.scm = Scm(mechs);
  return out;
}

// Exact joint over the binary variables by summing over every noise
// configuration. Index: first variable most significant.
std::vector<double> enumerate_joint(const DiscreteFixture& f, const Intervention& iv = {}) {
  const Scm m = intervene(f.scm, iv);
  const int n = m.size();
  std::vector<double> joint(static_cast<std::size_t>(1) << n, 0.0);
  const int configs = 1 << (2 * n);
  for (int c = 0; c < configs; ++c) {
    Eigen::VectorXd u(n);
    double p = 1.0;
    for (int v = 0; v < n; ++v) {
      const int uv = c >> (2 * v) & 3;
      u[v] = uv;
      p *= f.noise_probs[static_cast<std::size_t>(v)][static_cast<std::size_t>(uv)];
    }
    const Eigen::VectorXd x = m.solve(u);
    std::size_t idx = 0;
    for (int v = 0; v < n; ++v) idx = idx * 2 + static_cast<std::size_t>(x[v]);
    joint[idx] += p;
  }
  return joint;
}

std::vector<double> empirical_joint(const Dataset& d) {
  std::vector<double> joint(static_cast<std::size_t>(1) << d.cols(), 0.0);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    std::size_t idx = 0;
    for (int v = 0; v < d.cols(); ++v) idx = idx * 2 + static_cast<std::size_t>(d.column(v)[i]);
    joint[idx] += 1.0 / static_cast<double>(d.rows());
  }
  return joint;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return tv / 2;
}

Scm triangle_scm() {
  const auto x1 = Expr::parent("X1");
  const auto x2 = Expr::parent("X2");
  return Scm({{"X1", {}, Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt},
              {"X2", {"X1"}, 0.5 * x1 + Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt},
              {"X3", {"X1", "X2"}, x1 - x2 + Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt}});
}

}  // namespace

TEST(Scm, InducedGraphFollowsDeclaredParents) {
  EXPECT_EQ(induced_graph(triangle_scm()), fixtures::triangle());
  const Scm constants({{"A", {}, Expr::constant(1), NoiseSpec::dirac(0), std::nullopt},
                       {"B", {}, Expr::constant(2), NoiseSpec::dirac(0), std::nullopt}});
  EXPECT_TRUE(induced_graph(constants).edges().empty());
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dag g = oracle::random_dag(5, 0.5, seed);
    EXPECT_EQ(induced_graph(random_discrete_scm(g, seed).scm), g);
  }
}

TEST(Scm, RejectsInvalidModels) {
  const auto x = Expr::parent("X");
  EXPECT_THROW(Scm({{"Y", {}, x + Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt}}), InvalidInput);
  EXPECT_THROW(Scm({{"X", {"Y"}, Expr::parent("Y"), NoiseSpec::dirac(0), std::nullopt},
                    {"Y", {"X"}, x, NoiseSpec::dirac(0), std::nullopt}}),
               InvalidInput);
  EXPECT_THROW(NoiseSpec::finite({0, 1}, {0.5, 0.6}), InvalidInput);
}

TEST(Scm, AdditiveNoiseFlag) {
  const Scm m = fixtures::linear_pair();
  EXPECT_TRUE(m.additive_noise(1));
  const Scm mult({{"X", {}, Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt},
                  {"Y", {"X"}, Expr::parent("X") * Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt}});
  EXPECT_FALSE(mult.additive_noise(1));
}

TEST(Sample, LinearSlope) {
  const Dataset d = sample(fixtures::linear_pair(), 10000, 42);
  const auto fit = least_squares(with_intercept(d.matrix({"X"})), d.column("Y"));
  EXPECT_NEAR(fit.coefficients[1], 3.0, 0.05);
}

TEST(Sample, DiracNoiseGivesIdenticalRows) {
  const Scm m({{"A", {}, Expr::noise(), NoiseSpec::dirac(1.5), std::nullopt},
               {"B", {"A"}, 2.0 * Expr::parent("A") + Expr::noise(), NoiseSpec::dirac(-1), std::nullopt}});
  const Dataset d = sample(m, 50, 1);
  EXPECT_TRUE((d.column("A").array() == 1.5).all());
  EXPECT_TRUE((d.column("B").array() == 2.0).all());
}

TEST(Sample, DeterministicPerSeed) {
  const Scm m = triangle_scm();
  const Dataset a = sample(m, 200, 9);
  const Dataset b = sample(m, 200, 9);
  const Dataset c = sample(m, 200, 10);
  EXPECT_EQ(a.matrix(a.names()), b.matrix(b.names()));
  EXPECT_NE(a.matrix(a.names()), c.matrix(c.names()));
}

TEST(Sample, DiscreteJointMatchesNoiseEnumeration) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Dag g = oracle::random_dag(4, 0.5, seed);
    const auto f = random_discrete_scm(g, seed);
    const auto exact = enumerate_joint(f);
    EXPECT_LT(total_variation(exact, empirical_joint(sample(f.scm, 50000, seed))), 0.02);
  }
}

TEST(Sample, DiscreteJointMatchesEquivalentCgm) {
  const Dag g = oracle::random_dag(4, 0.6, 5);
  const auto f = random_discrete_scm(g, 5);
  // CPT p(v | pa) = sum_u p(u) [table(pa, u) = v], read off by enumeration.
  std::vector<Eigen::MatrixXd> tables;
  for (int v = 0; v < g.size(); ++v) {
    const auto& pa = g.parents(v);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(1 << pa.size(), 2);
    for (int c = 0; c < (1 << pa.size()); ++c) {
      for (int u = 0; u < 4; ++u) {
        Eigen::VectorXd vals = Eigen::VectorXd::Zero(g.size());
        for (std::size_t k = 0; k < pa.size(); ++k) vals[pa[k]] = c >> (pa.size() - 1 - k) & 1;
        const int out = static_cast<int>(f.scm.assign(v, vals, u));
        t(c, out) += f.noise_probs[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
      }
    }
    tables.push_back(t);
  }
  const DiscreteCgm cgm(g, std::vector<std::vector<double>>(4, {0, 1}), tables);
  const Factor j = joint(cgm);
  const auto exact = enumerate_joint(f);
  for (Eigen::Index i = 0; i < j.size(); ++i) EXPECT_NEAR(j.values()[i], exact[static_cast<std::size_t>(i)], 1e-12);
}

TEST(ReducedForm, RowIdenticalToSample) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = random_discrete_scm(oracle::random_dag(5, 0.5, seed), seed);
    const Dataset a = sample(f.scm, 300, seed);
    const Dataset b = reduced_form_sample(f.scm, 300, seed);
    EXPECT_EQ(a.matrix(a.names()), b.matrix(b.names()));
  }
  const Scm m = triangle_scm();
  const Dataset a = sample(m, 300, 3);
  const Dataset b = reduced_form_sample(m, 300, 3);
  EXPECT_TRUE(a.matrix(a.names()).isApprox(b.matrix(b.names()), 1e-12));
}

TEST(ReducedForm, ChainComposesCoefficients) {
  const std::vector<double> coef{2.0, -0.5, 1.5, 3.0};
  std::vector<Mechanism> mechs{{"V0", {}, Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt}};
  for (int i = 1; i <= 4; ++i) {
    const std::string prev = "V" + std::to_string(i - 1);
    mechs.push_back({"V" + std::to_string(i), {prev}, coef[static_cast<std::size_t>(i - 1)] * Expr::parent(prev) + Expr::noise(),
                     NoiseSpec::gaussian(0, 0.01), std::nullopt});
  }
  const Scm m(mechs);
  const Dataset d = reduced_form_sample(m, 5000, 8);
  const auto noise = sample_noise(m, 5000, 8);
  const Eigen::VectorXd u0 = noise.col(0);
  const auto fit = least_squares(with_intercept(Eigen::MatrixXd(u0)), d.column("V4"));
  EXPECT_NEAR(fit.coefficients[1], 2.0 * -0.5 * 1.5 * 3.0, 0.01);
}

TEST(Intervene, SurgeryOnTheInducedGraph) {
  const Scm m = triangle_scm();
  const Scm cut = intervene(m, {{"X2", 1.0}});
  EXPECT_EQ(induced_graph(cut), m.graph().without_incoming({1}));
  EXPECT_EQ(induced_graph(intervene(m, {{"X1", 0.5}})), m.graph());
  const Dataset d = sample(intervene(m, {{"X1", 0.5}, {"X2", -2.0}}), 100, 4);
  EXPECT_TRUE((d.column("X1").array() == 0.5).all());
  EXPECT_TRUE((d.column("X2").array() == -2.0).all());
  EXPECT_THROW(intervene(m, {{"Q", 1.0}}), InvalidInput);
}

TEST(Intervene, SurgeryCommutesOnRandomModels) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dag g = oracle::random_dag(5, 0.5, seed);
    const auto f = random_discrete_scm(g, seed);
    const int target = static_cast<int>(seed % 5);
    EXPECT_EQ(induced_graph(intervene(f.scm, {{g.name(target), 1.0}})), g.without_incoming({target}));
  }
}

TEST(InterventionalMean, LinearPair) {
  const auto r = interventional_mean(fixtures::linear_pair(), {{"X", 1.0}}, "Y", 10000, 5);
  EXPECT_NEAR(r.mean, 3.0, 0.05);
  EXPECT_GT(r.std_error, 0.0);
  EXPECT_EQ(interventional_mean(fixtures::linear_pair(), {{"Y", 7.25}}, "Y", 100, 5).mean, 7.25);
}

TEST(InterventionalMean, DiscreteMatchesEnumeratedIntervention) {
  const Dag g = oracle::random_dag(4, 0.7, 12);
  const auto f = random_discrete_scm(g, 12);
  const auto order = topological_order(g);
  const std::string t = g.name(order[0]);
  const int y = order[3];
  const auto exact = enumerate_joint(f, {{t, 1.0}});
  double truth = 0;
  for (std::size_t idx = 0; idx < exact.size(); ++idx) {
    if (idx >> (3 - y) & 1) truth += exact[idx];
  }
  const auto r = interventional_mean(f.scm, {{t, 1.0}}, g.name(y), 40000, 3);
  EXPECT_LT(std::abs(r.mean - truth), 4 * r.std_error + 1e-9);
}

TEST(Counterfactual, LinearPairEvidence) {
  const Scm m = fixtures::linear_pair();
  const auto d = counterfactual(m, {{"X", 2.0}, {"Y", 6.5}}, {{"X", 1.0}}, "Y");
  ASSERT_TRUE(d.point_mass());
  EXPECT_DOUBLE_EQ(d.points[0].first, 3.5);
  EXPECT_DOUBLE_EQ(d.mean() - 3.0 * 1.0, 0.5);
  const auto same = counterfactual(m, {{"X", 2.0}, {"Y", 6.5}}, {{"X", 2.0}}, "Y");
  EXPECT_DOUBLE_EQ(same.points[0].first, 6.5);
}

TEST(Counterfactual, FiniteNoiseMatchesBruteForcePosterior) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Dag g = oracle::random_dag(4, 0.6, seed + 20);
    const auto f = random_discrete_scm(g, seed + 20);
    const auto order = topological_order(g);
    const std::string t = g.name(order[0]);
    const std::string y = g.name(order[3]);
    // pick a reachable evidence row
    const Dataset obs = sample(f.scm, 1, seed);
    Assignment evidence;
    for (int v = 0; v < 4; ++v) evidence[g.name(v)] = obs.column(v)[0];
    const double flipped = 1.0 - evidence[t];

    std::map<double, double> brute;
    double mass = 0;
    const Scm acted = intervene(f.scm, {{t, flipped}});
    for (int c = 0; c < 256; ++c) {
      Eigen::VectorXd u(4);
      double p = 1;
      for (int v = 0; v < 4; ++v) {
        u[v] = c >> (2 * v) & 3;
        p *= f.noise_probs[static_cast<std::size_t>(v)][static_cast<std::size_t>(u[v])];
      }
      const Eigen::VectorXd x = f.scm.solve(u);
      bool consistent = true;
      for (int v = 0; v < 4; ++v) consistent = consistent && x[v] == evidence[g.name(v)];
      if (!consistent) continue;
      mass += p;
      brute[acted.solve(u)[g.index_of(y)]] += p;
    }
    const auto got = counterfactual(f.scm, evidence, {{t, flipped}}, y);
    std::map<double, double> got_map(got.points.begin(), got.points.end());
    double total = 0;
    for (auto& [k, v] : brute) {
      v /= mass;
      total += v;
    }
    ASSERT_EQ(got_map.size(), brute.size()) << "seed " << seed;
    for (const auto& [k, v] : brute) EXPECT_NEAR(got_map[k], v, 1e-12);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Counterfactual, ErrorsOnUnsupportedEvidence) {
  const Scm m = fixtures::linear_pair();
  EXPECT_THROW(counterfactual(m, {{"X", 2.0}}, {{"X", 1.0}}, "Y"), InvalidInput);
  const Scm squared({{"X", {}, Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt},
                     {"Y", {"X"}, Expr::parent("X") + Expr::noise() * Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt}});
  EXPECT_THROW(counterfactual(squared, {{"X", 1.0}, {"Y", 2.0}}, {{"X", 0.0}}, "Y"), NonAbducible);
  const Scm coin({{"X", {}, Expr::noise(), NoiseSpec::finite({0, 1}, {0.5, 0.5}), std::nullopt}});
  EXPECT_THROW(counterfactual(coin, {{"X", 3.0}}, {{"X", 0.0}}, "X"), ZeroProbabilityEvidence);
}

TEST(Ite, AdditiveAndInteractingTreatments) {
  const auto t = Expr::parent("T");
  const auto z = Expr::parent("Z");
  const Scm additive({{"Z", {}, Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt},
                      {"T", {}, Expr::noise(), NoiseSpec::finite({0, 1}, {0.5, 0.5}), std::vector<double>{0, 1}},
                      {"Y", {"T", "Z"}, t + z + Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt}});
  for (double u : {-1.3, 0.0, 2.2}) {
    EXPECT_DOUBLE_EQ(ite(additive, {{"Z", u}, {"T", 0}, {"Y", -u}}, "T", "Y"), 1.0);
  }
  const Scm inter({{"Z", {}, Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt},
                   {"T", {}, Expr::noise(), NoiseSpec::finite({0, 1}, {0.5, 0.5}), std::vector<double>{0, 1}},
                   {"Y", {"T", "Z"}, t * z + Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt}});
  EXPECT_DOUBLE_EQ(ite(inter, {{"Z", 2.0}, {"T", 1}, {"Y", 0.4}}, "T", "Y"), 2.0);

  // population average of ite matches the interventional contrast
  const Eigen::MatrixXd noise = sample_noise(inter, 4000, 17);
  double avg = 0;
  for (Eigen::Index i = 0; i < noise.rows(); ++i) {
    avg += ite(inter, {{"Z", noise(i, 0)}, {"T", noise(i, 1)}, {"Y", noise(i, 2)}}, "T", "Y");
  }
  avg /= static_cast<double>(noise.rows());
  const auto m1 = interventional_mean(inter, {{"T", 1}}, "Y", 4000, 17);
  const auto m0 = interventional_mean(inter, {{"T", 0}}, "Y", 4000, 17);
  EXPECT_NEAR(avg, m1.mean - m0.mean, 1e-9);
}

TEST(SoftIntervention, ReplacesOnlyTheNoise) {
  const Scm m = with_noise(fixtures::linear_pair(), "X", NoiseSpec::dirac(2.0));
  const Dataset d = sample(m, 2000, 3);
  EXPECT_TRUE((d.column("X").array() == 2.0).all());
  EXPECT_NEAR(d.column("Y").mean(), 6.0, 0.1);
  EXPECT_EQ(m.graph(), fixtures::linear_pair().graph());
}
