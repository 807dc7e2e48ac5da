#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace causelab {

using Edge = std::pair<int, int>;  // (parent, child)

// Sorted, duplicate-free set of node indices.
class NodeSet {
 public:
  NodeSet() = default;
  NodeSet(std::initializer_list<int> nodes);
  explicit NodeSet(std::vector<int> nodes);
  static NodeSet from_mask(std::uint64_t mask);

  bool contains(int node) const;
  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<int>& indices() const { return nodes_; }
  auto begin() const { return nodes_.begin(); }
  auto end() const { return nodes_.end(); }

  void insert(int node);
  bool intersects(const NodeSet& other) const;
  NodeSet united(const NodeSet& other) const;
  NodeSet intersected(const NodeSet& other) const;
  NodeSet minus(const NodeSet& other) const;

  auto operator<=>(const NodeSet&) const = default;

 private:
  std::vector<int> nodes_;
};

// Directed acyclic graph over named variables. Immutable after construction;
// the constructor rejects cycles, self-loops, duplicate edges and duplicate
// names.
class Dag {
 public:
  Dag() = default;
  Dag(std::vector<std::string> names, std::vector<Edge> edges);
  static Dag from_named_edges(std::vector<std::string> names,
                              const std::vector<std::pair<std::string, std::string>>& edges);

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int node) const { return names_.at(static_cast<std::size_t>(node)); }
  int index_of(std::string_view name) const;
  NodeSet node_set(const std::vector<std::string>& names) const;

  // Sorted by (parent, child).
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& parents(int node) const { return parents_[static_cast<std::size_t>(node)]; }
  const std::vector<int>& children(int node) const { return children_[static_cast<std::size_t>(node)]; }
  bool has_edge(int from, int to) const;
  bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

  // Both include the seed nodes themselves.
  NodeSet ancestors(const NodeSet& nodes) const;
  NodeSet descendants(const NodeSet& nodes) const;

  // Graph surgery: drop every edge pointing into `targets`.
  Dag without_incoming(const NodeSet& targets) const;
  Dag without_edges(const std::vector<Edge>& removed) const;

  bool operator==(const Dag& other) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
};

// Partially directed graph representing a Markov equivalence class.
struct Cpdag {
  std::vector<std::string> names;
  std::set<Edge> directed;    // (parent, child)
  std::set<Edge> undirected;  // (low, high)

  int size() const { return static_cast<int>(names.size()); }
  bool adjacent(int a, int b) const;
  bool operator==(const Cpdag&) const = default;
};

struct Independence {
  int a;
  int b;
  NodeSet given;
  auto operator<=>(const Independence&) const = default;
};

using VStructure = std::tuple<int, int, int>;  // (a, collider, b) with a < b

struct SkeletonAndVStructures {
  std::set<Edge> skeleton;  // (low, high)
  std::set<VStructure> v_structures;
  bool operator==(const SkeletonAndVStructures&) const = default;
};

struct AdjustmentSets {
  std::vector<NodeSet> sets;  // sorted by size, then lexicographically
  // Position of Pa(T) in `sets` when the parent set is itself valid.
  std::optional<std::size_t> parent_adjustment;
};

bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& z);

std::vector<Independence> implied_independences(const Dag& g, int node_limit = 8);

SkeletonAndVStructures skeleton_and_vstructures(const Dag& g);

bool markov_equivalent(const Dag& g1, const Dag& g2);

// Closes `pdag` under the four Meek orientation rules. Only undirected edges
// are ever oriented.
void apply_meek_rules(Cpdag& pdag);

Cpdag cpdag_of(const Dag& g);

bool is_valid_adjustment_set(const Dag& g, int treatment, int outcome, const NodeSet& z);

// Multi-node treatments are not supported; this overload throws InvalidInput
// unless `treatment` is a singleton.
bool is_valid_adjustment_set(const Dag& g, const NodeSet& treatment, int outcome, const NodeSet& z);

AdjustmentSets enumerate_adjustment_sets(const Dag& g, int treatment, int outcome,
                                         int node_limit = 12);

boost::multiprecision::cpp_int count_dags(int n);

std::vector<int> topological_order(const Dag& g);

// Visits every labeled DAG on `names` (3^(n(n-1)/2) candidate orientations are
// screened). Intended for n <= 5.
void for_each_dag(const std::vector<std::string>& names, const std::function<void(const Dag&)>& visit);

}  // namespace causelab
