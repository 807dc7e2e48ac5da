#pragma once

#include "causelab/cgm.hpp"
#include "causelab/discovery.hpp"
#include "causelab/estimation.hpp"
#include "causelab/graph.hpp"
#include "causelab/scm.hpp"

#include <json.hpp>

#include <string>

namespace causelab::io {

using Json = nlohmann::json;

// Parse errors become InvalidInput naming `source`, line and column.
Json parse_json(const std::string& text, const std::string& source = "<input>");
Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

// Canonical text: keys sorted, two-space indent, reals in shortest
// round-trip form, trailing newline. Equal values give byte-identical output.
std::string dump(const Json& j);

// Writes to a temporary sibling then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

// {"nodes": [...], "edges": [[from, to], ...]}
Json to_json(const Dag& g);
Dag dag_from_json(const Json& j);
// Adds "undirected_edges".
Json to_json(const Cpdag& g);

// {"variables": [{"name", "parents", "expr", "noise", "domain"?}, ...]}
// Expressions use the prefix grammar in docs/expression_grammar.md.
Json to_json(const Expr& e);
Expr expr_from_json(const Json& j);
Json to_json(const NoiseSpec& n);
NoiseSpec noise_from_json(const Json& j);
Json to_json(const Scm& m);
Scm scm_from_json(const Json& j);

// {"dag": {...}, "variables": {"X": {"domain": [...], "parents": [...],
//   "cpt": [{"given": [parent values], "probs": [...]}, ...]}}}
Json to_json(const DiscreteCgm& m);
DiscreteCgm cgm_from_json(const Json& j);

Json to_json(const EffectEstimate& e);
Json to_json(const Skeleton& s, const Orientation& o);
Json to_json(const Distribution& d);

}  // namespace causelab::io
