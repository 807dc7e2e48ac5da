#include "causelab/error.hpp"
#include "causelab/io.hpp"
#include "causelab/scenarios.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace causelab;
using io::Json;

TEST(Json, ParseErrorsNameLineAndColumn) {
  try {
    io::parse_json("{\n  \"a\": 1,\n  \"b\": ]\n}", "model.json");
    FAIL() << "expected a parse error";
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    // the stray bracket sits on line 3, column 8
    EXPECT_EQ(msg.rfind("model.json:3:8:", 0), 0u) << msg;
  }
}

TEST(Json, DumpIsCanonical) {
  const Json a = io::parse_json(R"({"b": [1, 0.1, 2.5e-300], "a": {"y": true, "x": null}})");
  const Json b = io::parse_json(R"({"a": {"x": null, "y": true}, "b": [1, 0.1, 2.5e-300]})");
  const std::string text = io::dump(a);
  EXPECT_EQ(text, io::dump(b));
  EXPECT_EQ(text.back(), '\n');
  EXPECT_LT(text.find("\"a\""), text.find("\"b\""));
  EXPECT_NE(text.find("0.1,"), std::string::npos) << text;
  EXPECT_NE(text.find("\n  \"a\""), std::string::npos) << text;
  EXPECT_EQ(io::parse_json(text), a);
}

TEST(Json, RealsRoundTripExactly) {
  const std::vector<double> values{0.1, 1.0 / 3.0, 6.02214076e23, -4.9e-324, 123456789.125};
  const Json parsed = io::parse_json(io::dump(Json(values)));
  for (std::size_t i = 0; i < values.size(); ++i) EXPECT_EQ(parsed[i].get<double>(), values[i]);
}

TEST(Graph, RoundTrip) {
  for (const auto& g : oracle::all_dags(3)) EXPECT_EQ(io::dag_from_json(io::to_json(g)), g);
  const Json cp = io::to_json(cpdag_of(fixtures::chain()));
  EXPECT_EQ(cp["undirected_edges"].size(), 2u);
  EXPECT_TRUE(cp["edges"].empty());
}

TEST(Graph, RejectsBadInput) {
  EXPECT_THROW(io::dag_from_json(io::parse_json(R"({"nodes": ["A"], "edges": [], "extra": 1})")), InvalidInput);
  EXPECT_THROW(io::dag_from_json(io::parse_json(R"({"nodes": ["A", "B"], "edges": [["A", "C"]]})")), InvalidInput);
  EXPECT_THROW(io::dag_from_json(io::parse_json(R"({"nodes": ["A", "B"], "edges": [["A", "B"], ["B", "A"]]})")),
               InvalidInput);
  EXPECT_THROW(
      io::dag_from_json(io::parse_json(R"({"nodes": ["A", "B"], "edges": [], "undirected_edges": [["A", "B"]]})")),
      InvalidInput);
}

TEST(Scm, RoundTripPreservesSamples) {
  for (const auto& name : scenario_names()) {
    const Scenario s = make_scenario(name);
    const Json j = io::to_json(s.scm);
    const Scm back = io::scm_from_json(io::parse_json(io::dump(j)));
    EXPECT_EQ(io::to_json(back), j) << name;
    const Dataset a = sample(s.scm, 200, 9), b = sample(back, 200, 9);
    for (const auto& col : a.names()) EXPECT_EQ(a.column(col), b.column(col)) << name << " " << col;
  }
}

TEST(Scm, ExpressionGrammar) {
  const Json j = io::parse_json(R"({"variables": [
    {"name": "X", "expr": "U", "noise": {"kind": "uniform", "lo": -1, "hi": 1}},
    {"name": "Y", "parents": ["X"], "expr": ["+", ["*", 2, "X"], ["-", "U"], ["ge", "X", 0.5]]}
  ]})");
  const Scm m = io::scm_from_json(j);
  const Dataset d = sample(m, 100, 3);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const double x = d.column("X")[i];
    EXPECT_DOUBLE_EQ(d.column("Y")[i], 2 * x + (x >= 0.5 ? 1.0 : 0.0));
  }
}

TEST(Scm, RejectsUnknownKeysAndOperators) {
  EXPECT_THROW(io::scm_from_json(io::parse_json(R"({"variables": [{"name": "X", "expr": "U", "colour": 1}]})")),
               InvalidInput);
  EXPECT_THROW(io::scm_from_json(io::parse_json(R"({"variables": [{"name": "X", "expr": ["sqrt", "U"]}]})")),
               InvalidInput);
  EXPECT_THROW(io::scm_from_json(io::parse_json(R"({"variables": [{"name": "X", "expr": ["tanh", "U", "U"]}]})")),
               InvalidInput);
  EXPECT_THROW(io::scm_from_json(io::parse_json(R"({"variables": [{"name": "X", "expr": "U",
               "noise": {"kind": "cauchy"}}]})")),
               InvalidInput);
}

TEST(Cgm, RoundTrip) {
  const DiscreteCgm m = random_cgm(oracle::random_dag(4, 0.6, 5), {2, 3, 2, 2}, 5);
  const Json j = io::to_json(m);
  const DiscreteCgm back = io::cgm_from_json(io::parse_json(io::dump(j)));
  EXPECT_EQ(io::to_json(back), j);
  EXPECT_TRUE(joint(back).values().isApprox(joint(m).values(), 1e-15));
}

TEST(Cgm, RejectsRowsThatDoNotSumToOne) {
  const Json j = io::parse_json(R"({"dag": {"nodes": ["A"], "edges": []},
    "variables": {"A": {"domain": [0, 1], "cpt": [{"probs": [0.5, 0.6]}]}}})");
  EXPECT_THROW(io::cgm_from_json(j), InvalidInput);
}

TEST(Estimate, Serialization) {
  EffectEstimate e;
  e.estimator = "rct";
  e.ate = 0.25;
  e.std_error = 0.5;
  e.cate["Z=1"] = 1.0;
  e.diagnostics["m0"] = 3;
  e.seed = 7;
  const Json j = io::parse_json(io::dump(io::to_json(e)));
  EXPECT_EQ(j["estimator"], "rct");
  EXPECT_EQ(j["ate"].get<double>(), 0.25);
  EXPECT_EQ(j["stderr"].get<double>(), 0.5);
  EXPECT_EQ(j["cate"]["Z=1"].get<double>(), 1.0);
  EXPECT_EQ(j["seed"].get<int>(), 7);
  e.std_error.reset();
  EXPECT_FALSE(io::to_json(e).contains("stderr"));
}

TEST(Csv, RoundTrip) {
  const Dataset d = generate(make_scenario("confounded-linear"), 300, 4);
  std::stringstream buf;
  write_csv(buf, d);
  const Dataset back = read_csv(buf);
  ASSERT_EQ(back.names(), d.names());
  for (const auto& n : d.names()) EXPECT_EQ(back.column(n), d.column(n));
}

TEST(Csv, HeaderOnly) {
  std::stringstream in("A,B\n");
  const Dataset d = read_csv(in);
  EXPECT_EQ(d.rows(), 0);
  EXPECT_EQ(d.names(), (std::vector<std::string>{"A", "B"}));
  std::stringstream out;
  write_csv(out, d);
  EXPECT_EQ(out.str(), "A,B\n");
}

TEST(Csv, RejectsMalformedInput) {
  std::stringstream ragged("A,B\n1,2\n3\n");
  EXPECT_THROW(read_csv(ragged), InvalidInput);
  std::stringstream text("A\nabc\n");
  EXPECT_THROW(read_csv(text), InvalidInput);
  std::stringstream dup("A,A\n1,2\n");
  EXPECT_THROW(read_csv(dup), InvalidInput);
  std::stringstream empty("");
  EXPECT_THROW(read_csv(empty), InvalidInput);
}

TEST(Files, AtomicWriteReplacesContent) {
  const auto dir = std::filesystem::temp_directory_path() / "causelab_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.json").string();
  io::write_file_atomic(path, "first\n");
  io::write_file_atomic(path, "second\n");
  EXPECT_EQ(io::read_text_file(path), "second\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& f : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(io::read_text_file(path), InvalidInput);
}

TEST(Examples, ShippedFilesLoad) {
  const std::string dir = std::string(CAUSELAB_SOURCE_DIR) + "/docs/examples/";
  const DiscreteCgm m = io::cgm_from_json(io::read_json_file(dir + "rain_wet.cgm.json"));
  // p(Rain=1, Wet=1) = 0.3 * 0.8
  EXPECT_NEAR(joint(m).at({1, 1}), 0.24, 1e-15);
  EXPECT_EQ(io::dag_from_json(io::read_json_file(dir + "three_covariates.json")).size(), 5);
  EXPECT_EQ(io::scm_from_json(io::read_json_file(dir + "linear_pair.json")).size(), 2);
}
