// rulesynth/frontend.hpp - mini-language frontend producing normalized PDGs.
//
// The accepted language is a small Java-like subset, one method per source
// file; docs/mini-language.md has the grammar. build_pdg() yields SSA-style
// graphs with one data node per value and one action node per call,
// operator, branch, return or catch clause.

#pragma once

#include <set>
#include <string>
#include <string_view>

#include "rulesynth/pdg.hpp"

namespace rulesynth {

struct MethodSource {
  std::string name;  // file name or other provenance, used in Origin
  std::string body;  // full method text
};

struct CodeChange {
  MethodSource before;
  MethodSource after;
};

/// Labels given to control-structure action nodes.
inline constexpr std::string_view kIfLabel = "IF";
inline constexpr std::string_view kLoopLabel = "LOOP";
inline constexpr std::string_view kCatchLabel = "CATCH";
inline constexpr std::string_view kRelOpLabel = "<rel_op>";

/// Parses `m` and builds its PDG with relational operators abstracted and
/// repeated getter calls collapsed. Throws ParseError (with position) or
/// UnsupportedConstruct naming the construct.
Pdg build_pdg(const MethodSource& m);

/// Same as build_pdg but without the two normalizations.
Pdg build_raw_pdg(const MethodSource& m);

/// Relabels <, <=, >, >=, ==, != action nodes to "<rel_op>".
Pdg normalize_relops(const Pdg& g);

/// True for zero-argument calls whose name looks like a getter (get/is/has).
bool is_getter_name(std::string_view label);

/// Collapses repeated zero-argument getter calls on the same receiver node
/// into the first one; uses of the dropped results are rewired to the
/// survivor's result.
Pdg dedup_getters(const Pdg& g);

/// True iff the action has no def edge or its defined value has no users.
/// Throws SchemaError for data nodes and std::out_of_range for unknown ids.
bool compute_output_ignored(const Pdg& g, std::string_view id);

/// Labels of the action nodes that reach `id` through dep edges.
std::set<std::string> compute_trans_control_dep(const Pdg& g, std::string_view id);

}  // namespace rulesynth
