// rulesynth/formula.hpp - existentially quantified conjunctions over PDG nodes.

#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "rulesynth/lattice.hpp"
#include "rulesynth/pdg.hpp"

namespace rulesynth {

struct EdgeAtom {
  std::string src;
  EdgeLabel label;
  std::string dst;

  friend auto operator<=>(const EdgeAtom&, const EdgeAtom&) = default;
};

/// exists bound_vars. AND node_atoms AND edge_atoms, with all variables
/// ranging over distinct nodes. free_vars are bound by the enclosing rule.
struct QuantifiedConjunct {
  std::vector<std::string> free_vars;
  std::vector<std::string> bound_vars;
  std::map<std::string, NodePredicates> nodes;
  std::vector<EdgeAtom> edges;  // sorted, unique

  std::size_t size() const noexcept { return nodes.size(); }
  bool empty() const noexcept { return nodes.empty(); }

  friend bool operator==(const QuantifiedConjunct&, const QuantifiedConjunct&) = default;
};

/// Orders "x2" before "x10": numeric suffixes compare by value.
bool natural_less(const std::string& a, const std::string& b);

/// Replaces Top fields with Bot so only informative atoms remain.
NodePredicates strip_uninformative(NodePredicates p);

/// Throws SchemaError if an edge mentions an undeclared variable, a
/// variable is declared twice, or a declared variable has no node atom.
void check_conjunct(const QuantifiedConjunct& q, const std::string& where);

/// Atoms in the style `label(x1) = "moveToFirst" /\ x0 -recv-> x1`, one
/// per line when `multiline`.
std::string render_atoms(const QuantifiedConjunct& q, bool multiline = false);

/// Renames variables by `names`; unlisted variables keep their names.
QuantifiedConjunct rename_vars(const QuantifiedConjunct& q, const std::map<std::string, std::string>& names);

}  // namespace rulesynth
