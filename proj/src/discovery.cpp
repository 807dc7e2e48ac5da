#include "causelab/discovery.hpp"

#include "causelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace causelab {

IndependenceOracle data_oracle(const Dataset& data, const CiOptions& options) {
  return [&data, options](int a, int b, const NodeSet& z) {
    std::vector<std::string> zn;
    for (int v : z) zn.push_back(data.names().at(static_cast<std::size_t>(v)));
    const auto& names = data.names();
    const auto r = ci_test(data, names.at(static_cast<std::size_t>(a)), names.at(static_cast<std::size_t>(b)), zn,
                           options);
    return !r.rejects(options.alpha);
  };
}

IndependenceOracle dsep_oracle(const Dag& g) {
  return [g](int a, int b, const NodeSet& z) { return d_separated(g, {a}, {b}, z); };
}

namespace {

// Subsets of `pool` of exactly `size` elements in lexicographic order; stops
// early when visit returns true.
bool for_each_subset(const std::vector<int>& pool, int size, const std::function<bool(const NodeSet&)>& visit) {
  const int n = static_cast<int>(pool.size());
  if (size > n) return false;
  std::vector<int> idx(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    std::vector<int> nodes;
    nodes.reserve(idx.size());
    for (int i : idx) nodes.push_back(pool[static_cast<std::size_t>(i)]);
    if (visit(NodeSet(nodes))) return true;
    int k = size - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - size + k) --k;
    if (k < 0) return false;
    ++idx[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

Skeleton complete_skeleton(const std::vector<std::string>& names) {
  Skeleton s;
  s.names = names;
  const int n = static_cast<int>(names.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) s.edges.insert({a, b});
  }
  return s;
}

void check_max_conditioning(int max_conditioning) {
  if (max_conditioning < 0) throw InvalidInput("max conditioning size must be >= 0");
}

}  // namespace

Skeleton sgs_skeleton(const std::vector<std::string>& names, const IndependenceOracle& independent,
                      int max_conditioning) {
  check_max_conditioning(max_conditioning);
  const int n = static_cast<int>(names.size());
  if (n > kSgsVariableLimit) {
    throw LimitExceeded("SGS search supports at most " + std::to_string(kSgsVariableLimit) + " variables");
  }
  Skeleton s = complete_skeleton(names);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      std::vector<int> others;
      for (int v = 0; v < n; ++v) {
        if (v != a && v != b) others.push_back(v);
      }
      const int top = std::min(max_conditioning, static_cast<int>(others.size()));
      for (int size = 0; size <= top; ++size) {
        const bool found = for_each_subset(others, size, [&](const NodeSet& w) {
          ++s.tests_performed;
          if (!independent(a, b, w)) return false;
          s.edges.erase({a, b});
          s.separating[{a, b}] = w;
          return true;
        });
        if (found) break;
      }
    }
  }
  return s;
}

Skeleton sgs_skeleton(const Dataset& data, const DiscoveryConfig& cfg) {
  return sgs_skeleton(data.names(), data_oracle(data, cfg.ci), cfg.ci.max_conditioning);
}

Skeleton pc_skeleton(const std::vector<std::string>& names, const IndependenceOracle& independent,
                     int max_conditioning) {
  check_max_conditioning(max_conditioning);
  const int n = static_cast<int>(names.size());
  Skeleton s = complete_skeleton(names);
  auto neighbours = [&](int v) {
    std::vector<int> out;
    for (int u = 0; u < n; ++u) {
      if (u != v && s.edges.contains({std::min(u, v), std::max(u, v)})) out.push_back(u);
    }
    return out;
  };
  for (int level = 0; level <= max_conditioning; ++level) {
    std::vector<std::vector<int>> frozen(static_cast<std::size_t>(n));
    bool any = false;
    for (int v = 0; v < n; ++v) {
      frozen[static_cast<std::size_t>(v)] = neighbours(v);
      if (static_cast<int>(frozen[static_cast<std::size_t>(v)].size()) - 1 >= level) any = true;
    }
    if (!any) break;
    const std::vector<Edge> current(s.edges.begin(), s.edges.end());
    for (const auto& [a, b] : current) {
      bool removed = false;
      for (int side = 0; side < 2 && !removed; ++side) {
        const int from = side == 0 ? a : b;
        const int other = side == 0 ? b : a;
        std::vector<int> pool;
        for (int u : frozen[static_cast<std::size_t>(from)]) {
          if (u != other) pool.push_back(u);
        }
        removed = for_each_subset(pool, level, [&](const NodeSet& w) {
          ++s.tests_performed;
          if (!independent(a, b, w)) return false;
          s.edges.erase({a, b});
          s.separating[{a, b}] = w;
          return true;
        });
      }
    }
  }
  return s;
}

Skeleton pc_skeleton(const Dataset& data, const DiscoveryConfig& cfg) {
  return pc_skeleton(data.names(), data_oracle(data, cfg.ci), cfg.ci.max_conditioning);
}

Orientation orient(const Skeleton& skeleton) {
  const int n = static_cast<int>(skeleton.names.size());
  Orientation out;
  out.cpdag.names = skeleton.names;
  out.cpdag.undirected = skeleton.edges;
  auto adjacent = [&](int u, int v) { return skeleton.edges.contains({std::min(u, v), std::max(u, v)}); };
  auto direct = [&](int from, int to, const VStructure& why) {
    if (out.cpdag.directed.contains({to, from})) {
      const auto& [a, c, b] = why;
      out.conflicts.push_back("collider " + skeleton.names[static_cast<std::size_t>(a)] + " -> " +
                              skeleton.names[static_cast<std::size_t>(c)] + " <- " +
                              skeleton.names[static_cast<std::size_t>(b)] + " would reverse " +
                              skeleton.names[static_cast<std::size_t>(to)] + " -> " +
                              skeleton.names[static_cast<std::size_t>(from)] + "; kept the earlier orientation");
      return false;
    }
    out.cpdag.undirected.erase({std::min(from, to), std::max(from, to)});
    out.cpdag.directed.insert({from, to});
    return true;
  };
  for (int c = 0; c < n; ++c) {
    for (int a = 0; a < n; ++a) {
      if (a == c || !adjacent(a, c)) continue;
      for (int b = a + 1; b < n; ++b) {
        if (b == c || !adjacent(b, c) || adjacent(a, b)) continue;
        const auto sep = skeleton.separating.find({a, b});
        if (sep != skeleton.separating.end() && sep->second.contains(c)) continue;
        const VStructure v{a, c, b};
        const bool left = direct(a, c, v);
        const bool right = direct(b, c, v);
        if (left && right) out.v_structures.insert(v);
      }
    }
  }
  apply_meek_rules(out.cpdag);
  return out;
}

// ---------------------------------------------------------------- scores

namespace {

ScoreModel resolve_model(const Dataset& data, ScoreModel model) {
  if (data.rows() == 0) throw InvalidInput("bic_score: empty dataset");
  if (model != ScoreModel::kAutomatic) return model;
  int discrete = 0;
  for (int j = 0; j < data.cols(); ++j) {
    if (data.type(j) != ColumnType::kReal) ++discrete;
  }
  if (discrete == data.cols()) return ScoreModel::kMultinomial;
  if (discrete == 0) return ScoreModel::kLinearGaussian;
  throw InvalidInput("bic_score: mixed discrete and real columns are not supported");
}

class LocalScorer {
 public:
  LocalScorer(const Dataset& data, ScoreModel model) : data_(data), model_(resolve_model(data, model)) {
    if (model_ == ScoreModel::kMultinomial) {
      for (int j = 0; j < data.cols(); ++j) {
        std::vector<double> values(data.column(j).begin(), data.column(j).end());
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        std::vector<int> codes(static_cast<std::size_t>(data.rows()));
        for (Eigen::Index r = 0; r < data.rows(); ++r) {
          codes[static_cast<std::size_t>(r)] = static_cast<int>(
              std::lower_bound(values.begin(), values.end(), data.column(j)[r]) - values.begin());
        }
        codes_.push_back(std::move(codes));
        cards_.push_back(static_cast<int>(values.size()));
      }
    } else {
      for (int j = 0; j < data.cols(); ++j) {
        if (data.type(j) != ColumnType::kReal && model == ScoreModel::kAutomatic) {
          throw InvalidInput("bic_score: linear-Gaussian score needs real columns");
        }
      }
    }
  }

  double operator()(int node, const std::vector<int>& parents) {
    std::uint64_t mask = 0;
    for (int p : parents) mask |= std::uint64_t{1} << p;
    const std::pair<int, std::uint64_t> key{node, mask};
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double s = model_ == ScoreModel::kMultinomial ? multinomial(node, parents) : gaussian(node, parents);
    cache_.emplace(key, s);
    return s;
  }

 private:
  double multinomial(int node, const std::vector<int>& parents) const {
    const auto m = static_cast<double>(data_.rows());
    const int r = cards_[static_cast<std::size_t>(node)];
    double q = 1.0;
    for (int p : parents) q *= cards_[static_cast<std::size_t>(p)];
    std::map<std::vector<int>, std::vector<double>> counts;
    std::vector<int> key(parents.size());
    for (Eigen::Index row = 0; row < data_.rows(); ++row) {
      for (std::size_t k = 0; k < parents.size(); ++k) {
        key[k] = codes_[static_cast<std::size_t>(parents[k])][static_cast<std::size_t>(row)];
      }
      auto& c = counts[key];
      if (c.empty()) c.assign(static_cast<std::size_t>(r), 0.0);
      c[static_cast<std::size_t>(codes_[static_cast<std::size_t>(node)][static_cast<std::size_t>(row)])] += 1.0;
    }
    double ll = 0.0;
    for (const auto& [cfg, c] : counts) {
      double total = 0.0;
      for (double x : c) total += x;
      for (double x : c) {
        if (x > 0) ll += x * std::log(x / total);
      }
    }
    const double k = (r - 1) * q;
    return ll - 0.5 * k * std::log(m);
  }

  double gaussian(int node, const std::vector<int>& parents) const {
    const auto m = static_cast<double>(data_.rows());
    Eigen::MatrixXd design(data_.rows(), static_cast<Eigen::Index>(parents.size()) + 1);
    design.col(0).setOnes();
    for (std::size_t k = 0; k < parents.size(); ++k) {
      design.col(static_cast<Eigen::Index>(k) + 1) = data_.column(parents[k]);
    }
    const auto fit = least_squares(design, data_.column(node));
    const double sigma2 = fit.residuals.squaredNorm() / m;
    if (!(sigma2 > 0)) throw SingularSystem("bic_score: zero residual variance for " + data_.names()[static_cast<std::size_t>(node)]);
    const double ll = -0.5 * m * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
    const double k = static_cast<double>(parents.size()) + 2.0;
    return ll - 0.5 * k * std::log(m);
  }

  const Dataset& data_;
  ScoreModel model_;
  std::vector<std::vector<int>> codes_;
  std::vector<int> cards_;
  std::map<std::pair<int, std::uint64_t>, double> cache_;
};

std::vector<int> parents_in_data(const Dataset& data, const Dag& g, int node) {
  std::vector<int> out;
  for (int p : g.parents(node)) out.push_back(data.index_of(g.name(p)));
  std::sort(out.begin(), out.end());
  return out;
}

double total_score(LocalScorer& scorer, const Dataset& data, const Dag& g) {
  double s = 0.0;
  for (int v = 0; v < g.size(); ++v) s += scorer(data.index_of(g.name(v)), parents_in_data(data, g, v));
  return s;
}

bool better(double score, const Dag& candidate, double best_score, const Dag& best) {
  const double tol = 1e-9 * std::max(1.0, std::abs(best_score));
  if (score > best_score + tol) return true;
  if (score < best_score - tol) return false;
  if (candidate.edges().size() != best.edges().size()) return candidate.edges().size() < best.edges().size();
  return candidate.edges() < best.edges();
}

}  // namespace

double bic_score(const Dataset& data, const Dag& g, ScoreModel model) {
  if (g.size() != data.cols()) throw InvalidInput("bic_score: graph and data have different variables");
  LocalScorer scorer(data, model);
  return total_score(scorer, data, g);
}

ScoreSearchResult score_search(const Dataset& data, const DiscoveryConfig& cfg) {
  LocalScorer scorer(data, cfg.score);
  const auto& names = data.names();
  const int n = static_cast<int>(names.size());
  ScoreSearchResult out;
  if (cfg.search == SearchMode::kExhaustive) {
    if (n > kExhaustiveNodeLimit) {
      throw LimitExceeded("exhaustive score search supports at most " + std::to_string(kExhaustiveNodeLimit) +
                          " variables");
    }
    bool first = true;
    for_each_dag(names, [&](const Dag& g) {
      ++out.graphs_scored;
      const double s = total_score(scorer, data, g);
      if (first || better(s, g, out.score, out.dag)) {
        out.dag = g;
        out.score = s;
        first = false;
      }
    });
    return out;
  }

  if (n > 63) throw LimitExceeded("greedy score search supports at most 63 variables");
  Dag current(names, {});
  double current_score = total_score(scorer, data, current);
  out.graphs_scored = 1;
  while (true) {
    std::vector<std::vector<Edge>> moves;
    const auto& edges = current.edges();
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        std::vector<Edge> next = edges;
        if (current.has_edge(a, b)) {
          next.erase(std::find(next.begin(), next.end(), Edge{a, b}));
          moves.push_back(next);
          next.push_back({b, a});
          moves.push_back(next);
        } else if (!current.has_edge(b, a)) {
          next.push_back({a, b});
          moves.push_back(next);
        }
      }
    }
    bool improved = false;
    Dag best = current;
    double best_score = current_score;
    for (auto& move : moves) {
      std::optional<Dag> candidate;
      try {
        candidate.emplace(names, move);
      } catch (const InvalidInput&) {
        continue;  // cyclic
      }
      ++out.graphs_scored;
      const double s = total_score(scorer, data, *candidate);
      if (s <= current_score + 1e-9 * std::max(1.0, std::abs(current_score))) continue;
      if (!improved || better(s, *candidate, best_score, best)) {
        best = *candidate;
        best_score = s;
        improved = true;
      }
    }
    if (!improved) break;
    current = best;
    current_score = best_score;
  }
  out.dag = current;
  out.score = current_score;
  return out;
}

// ---------------------------------------------------------------- ANM

std::string to_string(AnmDirection d) {
  switch (d) {
    case AnmDirection::kForward:
      return "forward";
    case AnmDirection::kBackward:
      return "backward";
    case AnmDirection::kUndecided:
      return "undecided";
  }
  return "undecided";
}

AnmVerdict anm_direction(const Dataset& data, const std::string& x, const std::string& y, const DiscoveryConfig& cfg) {
  if (data.rows() < 100) throw PreconditionFailed("anm_direction: needs at least 100 rows");
  if (x == y) throw InvalidInput("anm_direction: the two variables must differ");
  const auto sx = standardize(data.column(x));
  const auto sy = standardize(data.column(y));
  const auto constant = [](const Eigen::VectorXd& v) { return (v.array() == v[0]).all(); };
  if (constant(data.column(x)) || constant(data.column(y))) throw InvalidInput("anm_direction: constant column");
  const Eigen::VectorXd xs = sx.values.col(0);
  const Eigen::VectorXd ys = sy.values.col(0);

  const Eigen::VectorXd res_y = kernel_ridge_residuals(xs, ys, cfg.ci.ridge_factor);
  const Eigen::VectorXd res_x = kernel_ridge_residuals(ys, xs, cfg.ci.ridge_factor);
  AnmVerdict v;
  v.p_forward = hsic_test(xs, res_y, cfg.anm_permutations, cfg.ci.seed).p_value;
  v.p_backward = hsic_test(ys, res_x, cfg.anm_permutations, cfg.ci.seed).p_value;
  v.margin = v.p_forward - v.p_backward;
  const bool fwd = v.p_forward > cfg.ci.alpha;
  const bool bwd = v.p_backward > cfg.ci.alpha;
  if (fwd && !bwd) v.direction = AnmDirection::kForward;
  if (bwd && !fwd) v.direction = AnmDirection::kBackward;
  return v;
}

}  // namespace causelab
