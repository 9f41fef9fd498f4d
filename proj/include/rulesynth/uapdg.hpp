// rulesynth/uapdg.hpp - valuated PDGs, unified annotated PDGs, merge/project.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rulesynth/align.hpp"
#include "rulesynth/formula.hpp"
#include "rulesynth/lattice.hpp"
#include "rulesynth/pdg.hpp"

namespace rulesynth {

/// A PDG with an injective partial map from node ids to variable names.
struct Vpdg {
  Pdg graph;
  std::map<std::string, std::string> valuation;  // node id -> variable
};

/// Throws SchemaError if the valuation is not injective or names unknown nodes.
void check_vpdg(const Vpdg& v);

/// Set of variables a valuation uses.
std::set<std::string> valuation_vars(const Vpdg& v);

struct UNode {
  NodePredicates pred;
  ChangeTag change_tag = ChangeTag::None;
  std::map<int, std::string> origins;  // source example -> node id in that example
  std::string var;
  bool frozen = false;  // var is free

  std::set<int> presence() const;
};

struct UEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  EdgeLabel label;
  std::set<int> presence;
};

/// Merged graph; every node carries exactly one variable, free when frozen.
struct Uapdg {
  std::vector<UNode> nodes;
  std::vector<UEdge> edges;

  std::set<std::string> free_vars() const;
  std::set<int> sources() const;
};

/// Single-source UAPDG for example `source`; unvaluated nodes get fresh
/// bound variables y1, y2, ... in node order.
Uapdg from_vpdg(const Vpdg& v, int source = 0);

AlignGraph align_view(const Uapdg& a);

/// Pairs of nodes carrying the same free variable; must be pinned.
std::vector<std::pair<std::size_t, std::size_t>> frozen_pins(const Uapdg& a1, const Uapdg& a2);

/// Joins aligned nodes point-wise and keeps one-sided nodes and edges.
/// Bound variables are renumbered. Throws UapdgError when the free
/// variable sets differ or the alignment breaks a frozen pin.
Uapdg merge(const Uapdg& a1, const Uapdg& a2, const Alignment& al);

/// Keeps the nodes and edges present in every required source. Throws
/// UapdgError if a frozen node would be dropped.
Uapdg project(const Uapdg& a, const std::set<int>& required_sources);

QuantifiedConjunct to_formula(const Uapdg& a);

/// The valuation witnessing that example `source` satisfies to_formula(a).
Vpdg revaluate(const Uapdg& a, int source, const Pdg& example);

/// Graphviz description with predicate annotations; dashed elements are
/// present in only some sources.
std::string render_dot(const Uapdg& a, const std::string& title = "uapdg");

}  // namespace rulesynth
