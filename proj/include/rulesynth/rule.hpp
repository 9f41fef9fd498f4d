// rulesynth/rule.hpp - rules and their file format.
//
// A rule is  exists x. pre(x) /\ !(post_1(x) \/ ... \/ post_n(x))  where
// every post_i quantifies its own bound variables. No disjuncts means the
// postcondition is False and the rule reduces to its precondition.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rulesynth/formula.hpp"

namespace rulesynth {

struct RuleProvenance {
  std::vector<std::string> violating;
  std::vector<std::string> conforming;
  std::vector<std::string> refinements;  // false positives folded in, oldest first
  std::map<std::string, std::string> settings;

  friend bool operator==(const RuleProvenance&, const RuleProvenance&) = default;
};

struct Rule {
  std::string name;
  QuantifiedConjunct pre;  // all variables free
  std::vector<QuantifiedConjunct> post;
  RuleProvenance provenance;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Throws SchemaError when pre has bound variables, a disjunct uses a free
/// variable pre does not declare, or any conjunct is malformed.
void check_rule_valid(const Rule& r);

Rule read_rule(std::string_view text);
std::string write_rule(const Rule& r);
/// Rule document without provenance; the basis of canonical comparison.
std::string write_rule_body(const Rule& r);

Rule load_rule_file(const std::string& path);
void save_rule_file(const Rule& r, const std::string& path);

/// Human-readable rendering of the whole rule.
std::string render_rule(const Rule& r);

}  // namespace rulesynth
