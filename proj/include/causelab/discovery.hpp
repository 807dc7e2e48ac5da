#pragma once

#include "causelab/dataset.hpp"
#include "causelab/graph.hpp"
#include "causelab/kernel.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace causelab {

enum class ScoreModel { kAutomatic, kMultinomial, kLinearGaussian };
enum class SearchMode { kExhaustive, kGreedy };

struct DiscoveryConfig {
  CiOptions ci;  // method, alpha, max conditioning size, permutations, seed
  ScoreModel score = ScoreModel::kAutomatic;
  SearchMode search = SearchMode::kGreedy;
  int anm_permutations = 200;
};

// Decides whether a and b are independent given z.
using IndependenceOracle = std::function<bool(int a, int b, const NodeSet& z)>;

IndependenceOracle data_oracle(const Dataset& data, const CiOptions& options);
IndependenceOracle dsep_oracle(const Dag& g);

struct Skeleton {
  std::vector<std::string> names;
  std::set<Edge> edges;                // (low, high)
  std::map<Edge, NodeSet> separating;  // keyed (low, high), only for removed pairs
  int tests_performed = 0;
};

inline constexpr int kSgsVariableLimit = 8;

// Every pair tested against every subset of the remaining variables up to
// max_conditioning; at most 8 variables.
Skeleton sgs_skeleton(const std::vector<std::string>& names, const IndependenceOracle& independent,
                      int max_conditioning);
Skeleton sgs_skeleton(const Dataset& data, const DiscoveryConfig& cfg);

// Level-wise search over current adjacencies. The adjacency sets used at each
// level are frozen before the level starts, so the result does not depend on
// the order in which pairs are visited.
Skeleton pc_skeleton(const std::vector<std::string>& names, const IndependenceOracle& independent,
                     int max_conditioning);
Skeleton pc_skeleton(const Dataset& data, const DiscoveryConfig& cfg);

struct Orientation {
  Cpdag cpdag;
  std::set<VStructure> v_structures;
  std::vector<std::string> conflicts;
};

// Unshielded colliders from the separating sets, then Meek closure. When two
// colliders disagree on an edge the first one (in (collider, a, b) order)
// wins and the clash is recorded.
Orientation orient(const Skeleton& skeleton);

double bic_score(const Dataset& data, const Dag& g, ScoreModel model = ScoreModel::kAutomatic);

struct ScoreSearchResult {
  Dag dag;
  double score = 0.0;
  long long graphs_scored = 0;
};

inline constexpr int kExhaustiveNodeLimit = 5;

ScoreSearchResult score_search(const Dataset& data, const DiscoveryConfig& cfg);

enum class AnmDirection { kForward, kBackward, kUndecided };
std::string to_string(AnmDirection d);

struct AnmVerdict {
  AnmDirection direction = AnmDirection::kUndecided;
  double p_forward = 1.0;   // residuals of y on x vs x
  double p_backward = 1.0;  // residuals of x on y vs y
  double margin = 0.0;      // p_forward - p_backward
};

AnmVerdict anm_direction(const Dataset& data, const std::string& x, const std::string& y,
                         const DiscoveryConfig& cfg);

}  // namespace causelab
