#pragma once

#include "causelab/graph.hpp"
#include "causelab/scm.hpp"

namespace fixtures {

using causelab::Dag;

inline Dag chain() { return Dag::from_named_edges({"X", "Y", "Z"}, {{"X", "Y"}, {"Y", "Z"}}); }
inline Dag fork() { return Dag::from_named_edges({"X", "Y", "Z"}, {{"Y", "X"}, {"Y", "Z"}}); }
inline Dag collider() { return Dag::from_named_edges({"X", "Y", "Z"}, {{"X", "Y"}, {"Z", "Y"}}); }

// X1 -> X2 -> X3 with the shortcut X1 -> X3.
inline Dag triangle() {
  return Dag::from_named_edges({"X1", "X2", "X3"}, {{"X1", "X2"}, {"X1", "X3"}, {"X2", "X3"}});
}

// Three covariates around T -> Y: X1 confounds through X2, X3 is both a
// mediator and a collider of T and X2.
inline Dag three_covariates() {
  return Dag::from_named_edges({"X1", "X2", "X3", "T", "Y"}, {{"X1", "T"},
                                                              {"X1", "X2"},
                                                              {"X2", "Y"},
                                                              {"X2", "X3"},
                                                              {"T", "X3"},
                                                              {"X3", "Y"},
                                                              {"T", "Y"}});
}

// X := U_X, Y := 3X + U_Y with standard normal noises.
inline causelab::Scm linear_pair() {
  using causelab::Expr;
  using causelab::NoiseSpec;
  return causelab::Scm({{"X", {}, Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt},
                        {"Y", {"X"}, 3.0 * Expr::parent("X") + Expr::noise(), NoiseSpec::gaussian(0, 1), std::nullopt}});
}

}  // namespace fixtures
