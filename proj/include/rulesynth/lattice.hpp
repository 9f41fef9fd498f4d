// rulesynth/lattice.hpp - lattice-valued node predicates.
//
// Every node attribute is abstracted into a small join-semilattice so that
// merging aligned nodes from several examples keeps exactly the facts they
// share. Bot means "no information" (a node missing from one side of a
// merge, or a field omitted from a formula) and never constrains a match.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "rulesynth/pdg.hpp"

namespace rulesynth {

template <class V>
class ConstLattice {
 public:
  static ConstLattice bot() { return ConstLattice(State::Bot, V{}); }
  static ConstLattice top() { return ConstLattice(State::Top, V{}); }
  static ConstLattice exactly(V v) { return ConstLattice(State::Exact, std::move(v)); }
  /// Exactly(v) when present, Top when the attribute is unknown.
  static ConstLattice of(const std::optional<V>& v) { return v ? exactly(*v) : top(); }

  ConstLattice() : ConstLattice(State::Bot, V{}) {}

  bool is_bot() const noexcept { return state_ == State::Bot; }
  bool is_top() const noexcept { return state_ == State::Top; }
  bool is_exact() const noexcept { return state_ == State::Exact; }
  const V& value() const noexcept { return value_; }

  ConstLattice join(const ConstLattice& o) const {
    if (is_bot()) return o;
    if (o.is_bot()) return *this;
    if (is_exact() && o.is_exact() && value_ == o.value_) return *this;
    return top();
  }

  /// Bot and Top are vacuous; Exactly(v) requires the attribute to equal v.
  bool admits(const std::optional<V>& actual) const {
    return !is_exact() || (actual && *actual == value_);
  }

  friend bool operator==(const ConstLattice& a, const ConstLattice& b) {
    return a.state_ == b.state_ && (a.state_ != State::Exact || a.value_ == b.value_);
  }

 private:
  enum class State { Bot, Exact, Top };
  ConstLattice(State s, V v) : state_(s), value_(std::move(v)) {}

  State state_;
  V value_;
};

/// Strings abstracted by a (prefix, suffix) pair. The denotation of
/// Pattern(p, s) is every string starting with p and ending with s; the two
/// may overlap, which keeps join associative. Exactly(s) is the singleton.
class AffixLattice {
 public:
  static AffixLattice bot() { return AffixLattice(State::Bot, {}, {}); }
  static AffixLattice top() { return AffixLattice(State::Top, {}, {}); }
  static AffixLattice exactly(std::string s) { return AffixLattice(State::Exact, s, s); }
  static AffixLattice of(const std::optional<std::string>& v) { return v ? exactly(*v) : top(); }
  /// Pattern(p, s); collapses to Top when both are empty.
  static AffixLattice pattern(std::string prefix, std::string suffix);

  AffixLattice() : AffixLattice(State::Bot, {}, {}) {}

  bool is_bot() const noexcept { return state_ == State::Bot; }
  bool is_top() const noexcept { return state_ == State::Top; }
  bool is_exact() const noexcept { return state_ == State::Exact; }
  bool is_pattern() const noexcept { return state_ == State::Pattern; }
  /// For Exact both equal the value.
  const std::string& prefix() const noexcept { return prefix_; }
  const std::string& suffix() const noexcept { return suffix_; }

  AffixLattice join(const AffixLattice& o) const;
  bool admits(const std::optional<std::string>& actual) const;

  friend bool operator==(const AffixLattice&, const AffixLattice&) = default;

 private:
  enum class State { Bot, Exact, Pattern, Top };
  AffixLattice(State s, std::string p, std::string x) : state_(s), prefix_(std::move(p)), suffix_(std::move(x)) {}

  State state_;
  std::string prefix_;
  std::string suffix_;
};

/// Required enclosing control labels; join is intersection, Set({}) is Top.
class LabelSetLattice {
 public:
  static LabelSetLattice bot() { return LabelSetLattice(false, {}); }
  static LabelSetLattice top() { return LabelSetLattice(true, {}); }
  static LabelSetLattice of(std::set<std::string> labels) { return LabelSetLattice(true, std::move(labels)); }

  LabelSetLattice() : LabelSetLattice(false, {}) {}

  bool is_bot() const noexcept { return !is_set_; }
  bool is_top() const noexcept { return is_set_ && labels_.empty(); }
  const std::set<std::string>& labels() const noexcept { return labels_; }

  LabelSetLattice join(const LabelSetLattice& o) const;
  /// Set(S) admits any actual label set containing S.
  bool admits(const std::set<std::string>& actual) const;

  friend bool operator==(const LabelSetLattice&, const LabelSetLattice&) = default;

 private:
  LabelSetLattice(bool is_set, std::set<std::string> l) : is_set_(is_set), labels_(std::move(l)) {}

  bool is_set_;
  std::set<std::string> labels_;
};

struct NodePredicates {
  NodeKind kind = NodeKind::Action;  // aligned nodes always agree on kind
  ConstLattice<std::string> label;
  AffixLattice data_type;
  ConstLattice<std::string> data_value;
  ConstLattice<int> num_para;
  AffixLattice declaring_type;
  LabelSetLattice trans_control_dep;
  ConstLattice<bool> output_ignored;

  /// Every field Top: satisfied by any node of the given kind.
  static NodePredicates any(NodeKind kind);

  friend bool operator==(const NodePredicates&, const NodePredicates&) = default;
};

/// Derived facts about one node that satisfaction needs beyond its fields.
struct NodeFacts {
  bool output_ignored = false;  // meaningful for action nodes only
  std::set<std::string> trans_control_dep;
};

NodeFacts node_facts(const Pdg& g, std::size_t index);

/// Most precise bundle for a concrete node. Unknown attributes become Top
/// rather than Bot so that joining with a node that has the attribute does
/// not produce a predicate the unknown side fails.
NodePredicates from_node(const Node& n, const NodeFacts& facts);
NodePredicates from_node(const Pdg& g, std::size_t index);

/// Field-wise join. Throws std::invalid_argument for bundles of different kinds.
NodePredicates join(const NodePredicates& a, const NodePredicates& b);

bool satisfies(const Node& n, const NodeFacts& facts, const NodePredicates& p);
bool satisfies(const Pdg& g, std::size_t index, const NodePredicates& p);

/// True when no field carries information (all Bot or Top).
bool is_vacuous(const NodePredicates& p);

/// Field encodings used in rule files: "*" (Top), "exact:v", "affix:p*s",
/// "subset:[a,b]". Bot is encoded by omitting the field.
std::string encode(const ConstLattice<std::string>& l);
std::string encode(const ConstLattice<int>& l);
std::string encode(const ConstLattice<bool>& l);
std::string encode(const AffixLattice& l);
std::string encode(const LabelSetLattice& l);

/// Decoders throw SchemaError naming `field` on malformed input.
ConstLattice<std::string> decode_const_string(std::string_view text, const std::string& field);
ConstLattice<int> decode_const_int(std::string_view text, const std::string& field);
ConstLattice<bool> decode_const_bool(std::string_view text, const std::string& field);
AffixLattice decode_affix(std::string_view text, const std::string& field);
LabelSetLattice decode_label_set(std::string_view text, const std::string& field);

}  // namespace rulesynth
