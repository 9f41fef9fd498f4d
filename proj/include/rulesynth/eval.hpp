// rulesynth/eval.hpp - satisfiability of conjuncts and rules on PDGs.
//
// Matching is a backtracking search for an injective map from variables to
// nodes: the most constrained unassigned variable is bound next and its
// candidates are tried in node order, so results are deterministic.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rulesynth/formula.hpp"
#include "rulesynth/lattice.hpp"
#include "rulesynth/pdg.hpp"
#include "rulesynth/rule.hpp"

namespace rulesynth {

/// Variable -> node id.
using Valuation = std::map<std::string, std::string>;

struct MatchStats {
  std::uint64_t prefiltered = 0;  // queries rejected without search
  std::uint64_t searched = 0;     // queries that ran the backtracking search
  std::uint64_t steps = 0;        // variable bindings tried
};

/// A graph with its derived node facts computed once, for repeated queries.
class Matcher {
 public:
  explicit Matcher(const Pdg& g);

  const Pdg& graph() const noexcept { return g_; }
  const NodeFacts& facts(std::size_t i) const { return facts_.at(i); }

  /// False only when some exact action-label atom names a label the graph lacks.
  bool prefilter(const QuantifiedConjunct& q) const;

  /// First injective valuation of q's variables extending `partial`. Entries
  /// for variables q does not mention are returned as given and only keep
  /// their nodes out of the search.
  std::optional<Valuation> match(const QuantifiedConjunct& q, const Valuation& partial = {},
                                 MatchStats* stats = nullptr) const;

  /// Visits every valuation in search order until `visit` returns false.
  void enumerate(const QuantifiedConjunct& q, const Valuation& partial,
                 const std::function<bool(const Valuation&)>& visit, MatchStats* stats = nullptr) const;

 private:
  Pdg g_;
  std::vector<NodeFacts> facts_;
  std::set<std::string> action_labels_;
  std::set<std::tuple<std::size_t, std::size_t, EdgeLabel>> edge_set_;
};

std::optional<Valuation> match_conjunct(const Pdg& g, const QuantifiedConjunct& q, const Valuation& partial = {});
bool prefilter(const Pdg& g, const QuantifiedConjunct& q);

struct Detection {
  std::string origin;
  std::string rule;
  Valuation valuation;  // over the precondition's variables

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// One detection per precondition model for which no postcondition disjunct
/// holds with the model as its free-variable pin.
std::vector<Detection> check_rule(const Matcher& m, const Rule& r, MatchStats* stats = nullptr);
std::vector<Detection> check_rule(const Pdg& g, const Rule& r, MatchStats* stats = nullptr);

/// All models of the precondition, in search order.
std::vector<Valuation> pre_models(const Matcher& m, const Rule& r, std::size_t limit = SIZE_MAX);

/// `origin<TAB>rule<TAB>x0=n1<TAB>x1=n3`, variables in natural order.
std::string format_detection(const Detection& d);

}  // namespace rulesynth
