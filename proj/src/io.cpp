#include "causelab/io.hpp"

#include "causelab/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

namespace causelab::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw InvalidInput(what); }

void require_keys(const Json& j, const std::set<std::string>& allowed, const std::set<std::string>& required,
                  const std::string& where) {
  if (!j.is_object()) bad(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) bad(where + ": unknown key '" + k + "'");
  }
  for (const auto& k : required) {
    if (!j.contains(k)) bad(where + ": missing key '" + k + "'");
  }
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where + ": expected a number");
  return j.get<double>();
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) bad(where + ": expected a string");
  return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array");
  return j;
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  std::vector<double> out;
  for (const auto& v : array(j, where)) out.push_back(number(v, where));
  return out;
}

std::vector<std::string> strings(const Json& j, const std::string& where) {
  std::vector<std::string> out;
  for (const auto& v : array(j, where)) out.push_back(text(v, where));
  return out;
}

void format_real(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void write(std::string& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::number_float:
      format_real(out, j.get<double>());
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        write(out, v, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        write(out, v, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Json parse_json(const std::string& content, const std::string& source) {
  try {
    return Json::parse(content);
  } catch (const Json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, content.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (content[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw InvalidInput(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": JSON " + msg);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::string& path) { return parse_json(read_text_file(path), path); }

std::string dump(const Json& j) {
  std::string out;
  write(out, j, 0);
  out += "\n";
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw InvalidInput("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InvalidInput("cannot move output into place at '" + path + "': " + ec.message());
  }
}

// ---------------------------------------------------------------- graphs

Json to_json(const Dag& g) {
  Json edges = Json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({g.name(a), g.name(b)});
  return {{"nodes", g.names()}, {"edges", edges}};
}

Dag dag_from_json(const Json& j) {
  require_keys(j, {"nodes", "edges", "undirected_edges"}, {"nodes", "edges"}, "graph");
  if (j.contains("undirected_edges") && !j["undirected_edges"].empty()) {
    bad("graph: a DAG cannot have undirected edges");
  }
  auto nodes = strings(j["nodes"], "graph.nodes");
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : array(j["edges"], "graph.edges")) {
    if (!e.is_array() || e.size() != 2) bad("graph.edges: each edge must be a [from, to] pair");
    edges.emplace_back(text(e[0], "graph.edges"), text(e[1], "graph.edges"));
  }
  return Dag::from_named_edges(std::move(nodes), edges);
}

Json to_json(const Cpdag& g) {
  Json directed = Json::array();
  Json undirected = Json::array();
  const auto& n = g.names;
  for (const auto& [a, b] : g.directed) directed.push_back({n[static_cast<std::size_t>(a)], n[static_cast<std::size_t>(b)]});
  for (const auto& [a, b] : g.undirected) {
    undirected.push_back({n[static_cast<std::size_t>(a)], n[static_cast<std::size_t>(b)]});
  }
  return {{"nodes", n}, {"edges", directed}, {"undirected_edges", undirected}};
}

// ---------------------------------------------------------------- expressions

Json to_json(const Expr& e) {
  const auto& n = e.node();
  auto args = [&](const char* op) {
    Json out = Json::array({op});
    for (const auto& a : n.args) out.push_back(to_json(a));
    return out;
  };
  switch (n.op) {
    case ExprOp::kConst:
      return n.value;
    case ExprOp::kParent:
      return n.name;
    case ExprOp::kNoise:
      return n.name.empty() ? std::string("U") : "U:" + n.name;
    case ExprOp::kAdd:
      return args("+");
    case ExprOp::kSub:
      return args("-");
    case ExprOp::kMul:
      return args("*");
    case ExprOp::kPow:
      return args("pow");
    case ExprOp::kTanh:
      return args("tanh");
    case ExprOp::kCube:
      return args("cube");
    case ExprOp::kSign:
      return args("sign");
    case ExprOp::kIndicator: {
      Json out = args("ge");
      out.push_back(n.value);
      return out;
    }
    case ExprOp::kTable: {
      Json inputs = Json::array();
      for (const auto& a : n.args) inputs.push_back(to_json(a));
      Json rows = Json::array();
      for (const auto& [k, v] : n.table) rows.push_back({k, v});
      return {{"table", {{"inputs", inputs}, {"rows", rows}}}};
    }
  }
  return nullptr;
}

Expr expr_from_json(const Json& j) {
  if (j.is_number()) return Expr::constant(j.get<double>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.empty()) bad("expr: empty name");
    if (s == "U") return Expr::noise();
    if (s.rfind("U:", 0) == 0) return Expr::noise(s.substr(2));
    return Expr::parent(s);
  }
  if (j.is_object()) {
    require_keys(j, {"table"}, {"table"}, "expr");
    const auto& t = j["table"];
    require_keys(t, {"inputs", "rows"}, {"inputs", "rows"}, "expr.table");
    std::vector<Expr> inputs;
    for (const auto& a : array(t["inputs"], "expr.table.inputs")) inputs.push_back(expr_from_json(a));
    std::map<std::vector<double>, double> rows;
    for (const auto& r : array(t["rows"], "expr.table.rows")) {
      if (!r.is_array() || r.size() != 2) bad("expr.table.rows: each row must be [[inputs...], value]");
      auto key = numbers(r[0], "expr.table.rows");
      if (key.size() != inputs.size()) bad("expr.table.rows: key length differs from the number of inputs");
      if (!rows.emplace(std::move(key), number(r[1], "expr.table.rows")).second) {
        bad("expr.table.rows: duplicate key");
      }
    }
    return Expr::table(std::move(inputs), std::move(rows));
  }
  if (!j.is_array() || j.empty()) bad("expr: expected a number, a name, an operator array or a table");
  const auto op = text(j[0], "expr operator");
  std::vector<Expr> args;
  for (std::size_t k = 1; k < j.size(); ++k) {
    if (op == "ge" && k == 2) break;
    args.push_back(expr_from_json(j[k]));
  }
  auto arity = [&](std::size_t n) {
    if (args.size() != n) bad("expr: '" + op + "' takes " + std::to_string(n) + " argument(s)");
  };
  if (op == "+" || op == "*") {
    if (args.size() < 2) bad("expr: '" + op + "' needs at least 2 arguments");
    Expr acc = args[0];
    for (std::size_t k = 1; k < args.size(); ++k) acc = op == "+" ? acc + args[k] : acc * args[k];
    return acc;
  }
  if (op == "-") {
    if (args.size() == 1) return Expr::constant(0.0) - args[0];
    arity(2);
    return args[0] - args[1];
  }
  if (op == "pow") {
    arity(2);
    return pow(args[0], args[1]);
  }
  if (op == "tanh" || op == "cube" || op == "sign") {
    arity(1);
    return op == "tanh" ? tanh(args[0]) : op == "cube" ? cube(args[0]) : sign(args[0]);
  }
  if (op == "ge") {
    if (j.size() != 3) bad("expr: 'ge' takes an expression and a threshold");
    return indicator_ge(args[0], number(j[2], "expr ge threshold"));
  }
  bad("expr: unknown operator '" + op + "'");
}

Json to_json(const NoiseSpec& n) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteNoise>) {
          return {{"kind", "finite"}, {"support", s.support}, {"probs", s.probs}};
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          return {{"kind", "gaussian"}, {"mean", s.mean}, {"variance", s.variance}};
        } else if constexpr (std::is_same_v<T, UniformNoise>) {
          return {{"kind", "uniform"}, {"lo", s.lo}, {"hi", s.hi}};
        } else {
          return {{"kind", "dirac"}, {"point", s.point}};
        }
      },
      n.spec());
}

NoiseSpec noise_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) bad("noise: expected an object with a 'kind'");
  const auto kind = text(j["kind"], "noise.kind");
  if (kind == "gaussian") {
    require_keys(j, {"kind", "mean", "variance"}, {"kind"}, "noise");
    return NoiseSpec::gaussian(j.contains("mean") ? number(j["mean"], "noise.mean") : 0.0,
                               j.contains("variance") ? number(j["variance"], "noise.variance") : 1.0);
  }
  if (kind == "uniform") {
    require_keys(j, {"kind", "lo", "hi"}, {"kind", "lo", "hi"}, "noise");
    return NoiseSpec::uniform(number(j["lo"], "noise.lo"), number(j["hi"], "noise.hi"));
  }
  if (kind == "dirac") {
    require_keys(j, {"kind", "point"}, {"kind", "point"}, "noise");
    return NoiseSpec::dirac(number(j["point"], "noise.point"));
  }
  if (kind == "finite") {
    require_keys(j, {"kind", "support", "probs"}, {"kind", "support", "probs"}, "noise");
    return NoiseSpec::finite(numbers(j["support"], "noise.support"), numbers(j["probs"], "noise.probs"));
  }
  bad("noise: unknown kind '" + kind + "'");
}

Json to_json(const Scm& m) {
  Json vars = Json::array();
  for (const auto& mech : m.mechanisms()) {
    Json v{{"name", mech.name}, {"parents", mech.parents}, {"expr", to_json(mech.expr)}, {"noise", to_json(mech.noise)}};
    if (mech.domain) v["domain"] = *mech.domain;
    vars.push_back(v);
  }
  return {{"variables", vars}};
}

Scm scm_from_json(const Json& j) {
  require_keys(j, {"variables"}, {"variables"}, "scm");
  std::vector<Mechanism> mechs;
  for (const auto& v : array(j["variables"], "scm.variables")) {
    require_keys(v, {"name", "parents", "expr", "noise", "domain"}, {"name", "expr"}, "scm variable");
    Mechanism m;
    m.name = text(v["name"], "variable name");
    if (m.name == "U" || m.name.rfind("U:", 0) == 0) bad("scm: variable name '" + m.name + "' is reserved for noise");
    if (v.contains("parents")) m.parents = strings(v["parents"], "variable parents");
    m.expr = expr_from_json(v["expr"]);
    m.noise = v.contains("noise") ? noise_from_json(v["noise"]) : NoiseSpec::dirac(0.0);
    if (v.contains("domain")) m.domain = numbers(v["domain"], "variable domain");
    mechs.push_back(std::move(m));
  }
  return Scm(std::move(mechs));
}

// ---------------------------------------------------------------- CGMs

Json to_json(const DiscreteCgm& m) {
  Json vars = Json::object();
  const auto& g = m.dag();
  for (int v = 0; v < m.size(); ++v) {
    const auto& cpt = m.cpt(v);
    std::vector<std::string> parents;
    for (int p : cpt.parents) parents.push_back(g.name(p));
    Json rows = Json::array();
    std::vector<int> radix;
    for (int p : cpt.parents) radix.push_back(m.cardinality(p));
    for (Eigen::Index r = 0; r < cpt.table.rows(); ++r) {
      std::vector<double> given(cpt.parents.size());
      Eigen::Index rest = r;
      for (std::size_t k = cpt.parents.size(); k-- > 0;) {
        given[k] = m.domain(cpt.parents[k])[static_cast<std::size_t>(rest % radix[k])];
        rest /= radix[k];
      }
      std::vector<double> probs(cpt.table.row(r).begin(), cpt.table.row(r).end());
      rows.push_back({{"given", given}, {"probs", probs}});
    }
    vars[g.name(v)] = {{"domain", m.domain(v)}, {"parents", parents}, {"cpt", rows}};
  }
  return {{"dag", to_json(g)}, {"variables", vars}};
}

DiscreteCgm cgm_from_json(const Json& j) {
  require_keys(j, {"dag", "variables"}, {"dag", "variables"}, "cgm");
  Dag dag = dag_from_json(j["dag"]);
  const auto& vars = j["variables"];
  if (!vars.is_object()) bad("cgm.variables: expected an object keyed by variable name");
  for (const auto& [k, v] : vars.items()) {
    if (std::find(dag.names().begin(), dag.names().end(), k) == dag.names().end()) bad("cgm.variables: '" + k + "' is not a node of the dag");
  }
  const int n = dag.size();
  std::vector<std::vector<double>> domains(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const auto& name = dag.name(v);
    if (!vars.contains(name)) bad("cgm.variables: missing '" + name + "'");
    require_keys(vars[name], {"domain", "parents", "cpt"}, {"domain", "cpt"}, "cgm variable '" + name + "'");
    domains[static_cast<std::size_t>(v)] = numbers(vars[name]["domain"], name + ".domain");
  }
  std::vector<Eigen::MatrixXd> tables;
  for (int v = 0; v < n; ++v) {
    const auto& name = dag.name(v);
    const auto& spec = vars[name];
    const auto& canon = dag.parents(v);
    std::vector<int> listed = canon;
    if (spec.contains("parents")) {
      listed.clear();
      for (const auto& pn : strings(spec["parents"], name + ".parents")) listed.push_back(dag.index_of(pn));
      std::vector<int> sorted = listed;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != canon) bad("cgm: parents of '" + name + "' differ from the dag");
    }
    Eigen::Index rows = 1;
    for (int p : canon) rows *= static_cast<Eigen::Index>(domains[static_cast<std::size_t>(p)].size());
    const auto card = static_cast<Eigen::Index>(domains[static_cast<std::size_t>(v)].size());
    Eigen::MatrixXd table = Eigen::MatrixXd::Constant(rows, card, -1.0);
    std::vector<bool> seen(static_cast<std::size_t>(rows), false);
    for (const auto& row : array(spec["cpt"], name + ".cpt")) {
      require_keys(row, {"given", "probs"}, {"probs"}, name + ".cpt row");
      const auto given = row.contains("given") ? numbers(row["given"], name + ".cpt.given") : std::vector<double>{};
      const auto probs = numbers(row["probs"], name + ".cpt.probs");
      if (given.size() != listed.size()) bad("cgm: row of '" + name + "' has the wrong number of parent values");
      if (static_cast<Eigen::Index>(probs.size()) != card) bad("cgm: row of '" + name + "' has the wrong length");
      Eigen::Index index = 0;
      for (int p : canon) {
        const auto k = static_cast<std::size_t>(std::find(listed.begin(), listed.end(), p) - listed.begin());
        const auto& dom = domains[static_cast<std::size_t>(p)];
        const auto it = std::find(dom.begin(), dom.end(), given[k]);
        if (it == dom.end()) bad("cgm: parent value outside the domain in a row of '" + name + "'");
        index = index * static_cast<Eigen::Index>(dom.size()) + (it - dom.begin());
      }
      if (seen[static_cast<std::size_t>(index)]) bad("cgm: duplicate row in the table of '" + name + "'");
      seen[static_cast<std::size_t>(index)] = true;
      for (Eigen::Index c = 0; c < card; ++c) table(index, c) = probs[static_cast<std::size_t>(c)];
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) bad("cgm: table of '" + name + "' is not total");
    tables.push_back(std::move(table));
  }
  return DiscreteCgm(std::move(dag), std::move(domains), std::move(tables));
}

// ---------------------------------------------------------------- results

Json to_json(const EffectEstimate& e) {
  Json out{{"estimator", e.estimator}, {"ate", e.ate}, {"diagnostics", e.diagnostics}, {"seed", e.seed}};
  if (e.std_error) out["stderr"] = *e.std_error;
  if (!e.cate.empty()) out["cate"] = e.cate;
  return out;
}

Json to_json(const Skeleton& s, const Orientation& o) {
  const auto& n = s.names;
  auto name = [&](int i) { return n[static_cast<std::size_t>(i)]; };
  Json skeleton = Json::array();
  for (const auto& [a, b] : s.edges) skeleton.push_back({name(a), name(b)});
  Json vs = Json::array();
  for (const auto& [a, c, b] : o.v_structures) vs.push_back({name(a), name(c), name(b)});
  Json sep = Json::array();
  for (const auto& [pair, set] : s.separating) {
    Json members = Json::array();
    for (int v : set) members.push_back(name(v));
    sep.push_back({{"pair", {name(pair.first), name(pair.second)}}, {"given", members}});
  }
  return {{"skeleton", skeleton},
          {"v_structures", vs},
          {"cpdag", to_json(o.cpdag)},
          {"separating_sets", sep},
          {"tests_performed", s.tests_performed},
          {"conflicts", o.conflicts}};
}

Json to_json(const Distribution& d) {
  Json points = Json::array();
  for (const auto& [v, p] : d.points) points.push_back({{"value", v}, {"probability", p}});
  return {{"points", points}, {"mean", d.mean()}, {"point_mass", d.point_mass()}};
}

}  // namespace causelab::io
