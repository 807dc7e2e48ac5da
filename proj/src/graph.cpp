#include "causelab/graph.hpp"

#include "causelab/error.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <unordered_set>

namespace causelab {

// ---------------------------------------------------------------- NodeSet

NodeSet::NodeSet(std::initializer_list<int> nodes) : NodeSet(std::vector<int>(nodes)) {}

NodeSet::NodeSet(std::vector<int> nodes) : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
}

NodeSet NodeSet::from_mask(std::uint64_t mask) {
  std::vector<int> nodes;
  for (int i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1U) nodes.push_back(i);
  }
  return NodeSet(std::move(nodes));
}

bool NodeSet::contains(int node) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), node);
}

void NodeSet::insert(int node) {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) nodes_.insert(it, node);
}

bool NodeSet::intersects(const NodeSet& other) const {
  auto a = nodes_.begin();
  auto b = other.nodes_.begin();
  while (a != nodes_.end() && b != other.nodes_.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

NodeSet NodeSet::united(const NodeSet& other) const {
  std::vector<int> out;
  std::set_union(nodes_.begin(), nodes_.end(), other.nodes_.begin(), other.nodes_.end(),
                 std::back_inserter(out));
  return NodeSet(std::move(out));
}

NodeSet NodeSet::intersected(const NodeSet& other) const {
  std::vector<int> out;
  std::set_intersection(nodes_.begin(), nodes_.end(), other.nodes_.begin(), other.nodes_.end(),
                        std::back_inserter(out));
  return NodeSet(std::move(out));
}

NodeSet NodeSet::minus(const NodeSet& other) const {
  std::vector<int> out;
  std::set_difference(nodes_.begin(), nodes_.end(), other.nodes_.begin(), other.nodes_.end(),
                      std::back_inserter(out));
  return NodeSet(std::move(out));
}

// ---------------------------------------------------------------- Dag

namespace {

void check_nodes(const Dag& g, const NodeSet& s, const char* what) {
  for (int v : s) {
    if (v < 0 || v >= g.size()) {
      throw InvalidInput(std::string(what) + ": node index " + std::to_string(v) + " out of range");
    }
  }
}

}  // namespace

Dag::Dag(std::vector<std::string> names, std::vector<Edge> edges)
    : names_(std::move(names)), edges_(std::move(edges)) {
  const auto n = names_.size();
  {
    std::unordered_set<std::string> seen;
    for (const auto& name : names_) {
      if (name.empty()) throw InvalidInput("empty node name");
      if (!seen.insert(name).second) throw InvalidInput("duplicate node name '" + name + "'");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw InvalidInput("duplicate edge");
  }
  parents_.assign(n, {});
  children_.assign(n, {});
  for (const auto& [from, to] : edges_) {
    if (from < 0 || to < 0 || static_cast<std::size_t>(from) >= n || static_cast<std::size_t>(to) >= n) {
      throw InvalidInput("edge endpoint out of range");
    }
    if (from == to) throw InvalidInput("self-loop on '" + names_[static_cast<std::size_t>(from)] + "'");
    parents_[static_cast<std::size_t>(to)].push_back(from);
    children_[static_cast<std::size_t>(from)].push_back(to);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  // Acyclicity: Kahn's algorithm must consume every node.
  std::vector<int> indegree(n);
  for (std::size_t v = 0; v < n; ++v) indegree[v] = static_cast<int>(parents_[v].size());
  std::vector<int> stack;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) stack.push_back(static_cast<int>(v));
  }
  std::size_t visited = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++visited;
    for (int c : children_[static_cast<std::size_t>(v)]) {
      if (--indegree[static_cast<std::size_t>(c)] == 0) stack.push_back(c);
    }
  }
  if (visited != n) throw InvalidInput("graph contains a directed cycle");
}

Dag Dag::from_named_edges(std::vector<std::string> names,
                          const std::vector<std::pair<std::string, std::string>>& edges) {
  std::vector<Edge> indexed;
  indexed.reserve(edges.size());
  auto find = [&](const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InvalidInput("edge references unknown node '" + name + "'");
    return static_cast<int>(it - names.begin());
  };
  for (const auto& [from, to] : edges) indexed.emplace_back(find(from), find(to));
  return Dag(std::move(names), std::move(indexed));
}

int Dag::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidInput("unknown node '" + std::string(name) + "'");
  return static_cast<int>(it - names_.begin());
}

NodeSet Dag::node_set(const std::vector<std::string>& names) const {
  std::vector<int> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(index_of(n));
  return NodeSet(std::move(out));
}

bool Dag::has_edge(int from, int to) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

NodeSet Dag::ancestors(const NodeSet& nodes) const {
  std::vector<char> mark(names_.size(), 0);
  std::vector<int> stack(nodes.begin(), nodes.end());
  for (int v : stack) mark[static_cast<std::size_t>(v)] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int p : parents(v)) {
      if (!mark[static_cast<std::size_t>(p)]) {
        mark[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
    }
  }
  std::vector<int> out;
  for (std::size_t v = 0; v < mark.size(); ++v) {
    if (mark[v]) out.push_back(static_cast<int>(v));
  }
  return NodeSet(std::move(out));
}

NodeSet Dag::descendants(const NodeSet& nodes) const {
  std::vector<char> mark(names_.size(), 0);
  std::vector<int> stack(nodes.begin(), nodes.end());
  for (int v : stack) mark[static_cast<std::size_t>(v)] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int c : children(v)) {
      if (!mark[static_cast<std::size_t>(c)]) {
        mark[static_cast<std::size_t>(c)] = 1;
        stack.push_back(c);
      }
    }
  }
  std::vector<int> out;
  for (std::size_t v = 0; v < mark.size(); ++v) {
    if (mark[v]) out.push_back(static_cast<int>(v));
  }
  return NodeSet(std::move(out));
}

Dag Dag::without_incoming(const NodeSet& targets) const {
  std::vector<Edge> kept;
  for (const auto& e : edges_) {
    if (!targets.contains(e.second)) kept.push_back(e);
  }
  return Dag(names_, std::move(kept));
}

Dag Dag::without_edges(const std::vector<Edge>& removed) const {
  std::vector<Edge> kept;
  for (const auto& e : edges_) {
    if (std::find(removed.begin(), removed.end(), e) == removed.end()) kept.push_back(e);
  }
  return Dag(names_, std::move(kept));
}

bool Cpdag::adjacent(int a, int b) const {
  return directed.contains({a, b}) || directed.contains({b, a}) ||
         undirected.contains({std::min(a, b), std::max(a, b)});
}

// ---------------------------------------------------------------- d-separation

bool d_separated(const Dag& g, const NodeSet& a, const NodeSet& b, const NodeSet& z) {
  check_nodes(g, a, "d_separated");
  check_nodes(g, b, "d_separated");
  check_nodes(g, z, "d_separated");
  if (a.empty() || b.empty()) throw InvalidInput("d_separated: query sets must be nonempty");
  if (a.intersects(b) || a.intersects(z) || b.intersects(z)) {
    throw InvalidInput("d_separated: query sets must be pairwise disjoint");
  }

  // Reachability over (node, direction) states. "up" means the trail arrived
  // from a child, "down" from a parent.
  const NodeSet z_ancestors = g.ancestors(z);
  const auto n = static_cast<std::size_t>(g.size());
  std::vector<char> seen_up(n, 0);
  std::vector<char> seen_down(n, 0);
  std::deque<std::pair<int, bool>> queue;  // (node, arrived_up)
  for (int v : a) queue.emplace_back(v, true);

  while (!queue.empty()) {
    const auto [v, up] = queue.front();
    queue.pop_front();
    auto& seen = up ? seen_up : seen_down;
    if (seen[static_cast<std::size_t>(v)]) continue;
    seen[static_cast<std::size_t>(v)] = 1;

    const bool observed = z.contains(v);
    if (!observed && b.contains(v)) return false;

    if (up) {
      if (!observed) {
        for (int p : g.parents(v)) queue.emplace_back(p, true);
        for (int c : g.children(v)) queue.emplace_back(c, false);
      }
    } else {
      if (!observed) {
        for (int c : g.children(v)) queue.emplace_back(c, false);
      }
      // Collider: open iff v or one of its descendants is observed.
      if (z_ancestors.contains(v)) {
        for (int p : g.parents(v)) queue.emplace_back(p, true);
      }
    }
  }
  return true;
}

std::vector<Independence> implied_independences(const Dag& g, int node_limit) {
  const int n = g.size();
  if (n > node_limit) {
    throw LimitExceeded("implied_independences: " + std::to_string(n) + " nodes exceeds limit " +
                        std::to_string(node_limit));
  }
  std::vector<Independence> out;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const std::uint64_t pair_mask = (1ULL << a) | (1ULL << b);
      for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        if (mask & pair_mask) continue;
        NodeSet z = NodeSet::from_mask(mask);
        if (d_separated(g, {a}, {b}, z)) out.push_back({a, b, std::move(z)});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- equivalence

SkeletonAndVStructures skeleton_and_vstructures(const Dag& g) {
  SkeletonAndVStructures out;
  for (const auto& [p, c] : g.edges()) out.skeleton.insert({std::min(p, c), std::max(p, c)});
  for (int c = 0; c < g.size(); ++c) {
    const auto& pa = g.parents(c);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = i + 1; j < pa.size(); ++j) {
        if (!g.adjacent(pa[i], pa[j])) out.v_structures.insert({pa[i], c, pa[j]});
      }
    }
  }
  return out;
}

bool markov_equivalent(const Dag& g1, const Dag& g2) {
  if (g1.size() != g2.size()) throw InvalidInput("markov_equivalent: node sets differ");
  // Re-express g2 in g1's index space.
  std::vector<int> to_g1(static_cast<std::size_t>(g2.size()));
  for (int v = 0; v < g2.size(); ++v) {
    try {
      to_g1[static_cast<std::size_t>(v)] = g1.index_of(g2.name(v));
    } catch (const InvalidInput&) {
      throw InvalidInput("markov_equivalent: node sets differ");
    }
  }
  std::vector<Edge> mapped;
  for (const auto& [p, c] : g2.edges()) {
    mapped.emplace_back(to_g1[static_cast<std::size_t>(p)], to_g1[static_cast<std::size_t>(c)]);
  }
  const Dag g2_aligned(g1.names(), std::move(mapped));
  return skeleton_and_vstructures(g1) == skeleton_and_vstructures(g2_aligned);
}

namespace {

bool directed_edge(const Cpdag& g, int a, int b) { return g.directed.contains({a, b}); }

bool undirected_edge(const Cpdag& g, int a, int b) {
  return g.undirected.contains({std::min(a, b), std::max(a, b)});
}

void orient(Cpdag& g, int a, int b) {
  g.undirected.erase({std::min(a, b), std::max(a, b)});
  g.directed.insert({a, b});
}

// One pass of rules R1-R4 over the undirected edges; returns whether any edge
// was oriented.
bool meek_pass(Cpdag& g) {
  const int n = g.size();
  const std::vector<Edge> pending(g.undirected.begin(), g.undirected.end());
  for (const auto& [lo, hi] : pending) {
    for (const auto& [a, b] : {Edge{lo, hi}, Edge{hi, lo}}) {
      if (!undirected_edge(g, a, b)) break;
      bool fire = false;
      for (int c = 0; c < n && !fire; ++c) {
        if (c == a || c == b) continue;
        // R1: c -> a, a - b, c and b non-adjacent.
        if (directed_edge(g, c, a) && !g.adjacent(c, b)) fire = true;
        // R2: a -> c -> b.
        if (directed_edge(g, a, c) && directed_edge(g, c, b)) fire = true;
      }
      // R3: a - c -> b and a - d -> b with c, d non-adjacent.
      for (int c = 0; c < n && !fire; ++c) {
        if (c == a || c == b || !undirected_edge(g, a, c) || !directed_edge(g, c, b)) continue;
        for (int d = c + 1; d < n && !fire; ++d) {
          if (d == a || d == b) continue;
          if (undirected_edge(g, a, d) && directed_edge(g, d, b) && !g.adjacent(c, d)) fire = true;
        }
      }
      // R4: c -> d -> b, a adjacent to c and d, c and b non-adjacent.
      for (int c = 0; c < n && !fire; ++c) {
        if (c == a || c == b || !g.adjacent(a, c) || g.adjacent(c, b)) continue;
        for (int d = 0; d < n && !fire; ++d) {
          if (d == a || d == b || d == c) continue;
          if (directed_edge(g, c, d) && directed_edge(g, d, b) && g.adjacent(a, d)) fire = true;
        }
      }
      if (fire) {
        orient(g, a, b);
        return true;
      }
    }
  }
  return false;
}

}  // namespace

void apply_meek_rules(Cpdag& pdag) {
  while (meek_pass(pdag)) {
  }
}

Cpdag cpdag_of(const Dag& g) {
  const auto sv = skeleton_and_vstructures(g);
  Cpdag out{g.names(), {}, sv.skeleton};
  for (const auto& [a, c, b] : sv.v_structures) {
    orient(out, a, c);
    orient(out, b, c);
  }
  apply_meek_rules(out);
  return out;
}

// ---------------------------------------------------------------- adjustment

bool is_valid_adjustment_set(const Dag& g, int treatment, int outcome, const NodeSet& z) {
  check_nodes(g, {treatment, outcome}, "is_valid_adjustment_set");
  check_nodes(g, z, "is_valid_adjustment_set");
  if (treatment == outcome) throw InvalidInput("is_valid_adjustment_set: treatment equals outcome");
  if (z.contains(treatment) || z.contains(outcome)) {
    throw InvalidInput("is_valid_adjustment_set: adjustment set contains treatment or outcome");
  }
  // Nodes on directed treatment -> outcome paths, treatment itself excluded.
  const NodeSet causal_nodes =
      g.descendants({treatment}).intersected(g.ancestors({outcome})).minus({treatment});
  // (i) no descendant of a node on a directed path.
  if (z.intersects(g.descendants(causal_nodes))) return false;
  // (ii) block every non-directed path: drop the first edge of each directed
  // path and ask for d-separation in what remains.
  std::vector<Edge> first_edges;
  for (int c : g.children(treatment)) {
    if (causal_nodes.contains(c)) first_edges.emplace_back(treatment, c);
  }
  return d_separated(g.without_edges(first_edges), {treatment}, {outcome}, z);
}

bool is_valid_adjustment_set(const Dag& g, const NodeSet& treatment, int outcome, const NodeSet& z) {
  if (treatment.size() != 1) {
    throw InvalidInput("is_valid_adjustment_set: only singleton treatments are supported");
  }
  return is_valid_adjustment_set(g, *treatment.begin(), outcome, z);
}

AdjustmentSets enumerate_adjustment_sets(const Dag& g, int treatment, int outcome, int node_limit) {
  const int n = g.size();
  if (n > node_limit) {
    throw LimitExceeded("enumerate_adjustment_sets: " + std::to_string(n) + " nodes exceeds limit " +
                        std::to_string(node_limit));
  }
  check_nodes(g, {treatment, outcome}, "enumerate_adjustment_sets");
  const std::uint64_t excluded = (1ULL << treatment) | (1ULL << outcome);
  AdjustmentSets out;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    if (mask & excluded) continue;
    NodeSet z = NodeSet::from_mask(mask);
    if (is_valid_adjustment_set(g, treatment, outcome, z)) out.sets.push_back(std::move(z));
  }
  std::sort(out.sets.begin(), out.sets.end(), [](const NodeSet& x, const NodeSet& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x.indices() < y.indices();
  });
  const NodeSet parents(g.parents(treatment));
  if (!parents.contains(outcome)) {
    auto it = std::find(out.sets.begin(), out.sets.end(), parents);
    if (it != out.sets.end()) out.parent_adjustment = static_cast<std::size_t>(it - out.sets.begin());
  }
  return out;
}

// ---------------------------------------------------------------- counting

boost::multiprecision::cpp_int count_dags(int n) {
  using boost::multiprecision::cpp_int;
  if (n < 1) throw InvalidInput("count_dags: n must be positive");
  // a(m) = sum_{k=1..m} (-1)^(k+1) C(m,k) 2^(k(m-k)) a(m-k), k = number of roots.
  std::vector<cpp_int> a(static_cast<std::size_t>(n) + 1);
  a[0] = 1;
  for (int m = 1; m <= n; ++m) {
    cpp_int total = 0;
    cpp_int binom = 1;
    for (int k = 1; k <= m; ++k) {
      binom = binom * (m - k + 1) / k;
      const cpp_int term = binom * (cpp_int(1) << (k * (m - k))) * a[static_cast<std::size_t>(m - k)];
      if (k % 2 == 1) {
        total += term;
      } else {
        total -= term;
      }
    }
    a[static_cast<std::size_t>(m)] = total;
  }
  return a[static_cast<std::size_t>(n)];
}

std::vector<int> topological_order(const Dag& g) {
  const auto n = static_cast<std::size_t>(g.size());
  std::vector<int> indegree(n);
  for (std::size_t v = 0; v < n; ++v) indegree[v] = static_cast<int>(g.parents(static_cast<int>(v)).size());
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(static_cast<int>(v));
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : g.children(v)) {
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
    }
  }
  return order;
}

void for_each_dag(const std::vector<std::string>& names, const std::function<void(const Dag&)>& visit) {
  const int n = static_cast<int>(names.size());
  std::vector<Edge> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<int> state(pairs.size(), 0);  // 0 absent, 1 i->j, 2 j->i
  for (;;) {
    // Acyclicity on bitmask parent sets: repeatedly peel off sources.
    std::vector<std::uint32_t> parent_mask(static_cast<std::size_t>(n), 0);
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      if (state[k] == 1) {
        parent_mask[static_cast<std::size_t>(j)] |= 1U << i;
        edges.emplace_back(i, j);
      } else if (state[k] == 2) {
        parent_mask[static_cast<std::size_t>(i)] |= 1U << j;
        edges.emplace_back(j, i);
      }
    }
    std::uint32_t placed = 0;
    bool progress = true;
    while (progress) {
      progress = false;
      for (int v = 0; v < n; ++v) {
        if (!(placed & (1U << v)) && (parent_mask[static_cast<std::size_t>(v)] & ~placed) == 0) {
          placed |= 1U << v;
          progress = true;
        }
      }
    }
    if (placed == (n == 32 ? ~0U : (1U << n) - 1)) visit(Dag(names, std::move(edges)));

    std::size_t k = 0;
    while (k < state.size() && state[k] == 2) state[k++] = 0;
    if (k == state.size()) break;
    ++state[k];
  }
}

}  // namespace causelab
