#include "rulesynth/lattice.hpp"

#include <algorithm>
#include <stdexcept>

#include "rulesynth/error.hpp"
#include "rulesynth/frontend.hpp"

namespace rulesynth {

namespace {

std::string common_prefix(const std::string& a, const std::string& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return a.substr(0, n);
}

std::string common_suffix(const std::string& a, const std::string& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[a.size() - 1 - n] == b[b.size() - 1 - n]) ++n;
  return a.substr(a.size() - n);
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
bool ends_with(std::string_view s, std::string_view x) {
  return s.size() >= x.size() && s.substr(s.size() - x.size()) == x;
}

}  // namespace

AffixLattice AffixLattice::pattern(std::string prefix, std::string suffix) {
  if (prefix.empty() && suffix.empty()) return top();
  return AffixLattice(State::Pattern, std::move(prefix), std::move(suffix));
}

AffixLattice AffixLattice::join(const AffixLattice& o) const {
  if (is_bot()) return o;
  if (o.is_bot()) return *this;
  if (is_top() || o.is_top()) return top();
  if (is_exact() && o.is_exact() && prefix_ == o.prefix_) return *this;
  // prefix_/suffix_ are the longest common prefix/suffix of the denotation,
  // so the join is the pair of common affixes of the union.
  return pattern(common_prefix(prefix_, o.prefix_), common_suffix(suffix_, o.suffix_));
}

bool AffixLattice::admits(const std::optional<std::string>& actual) const {
  switch (state_) {
    case State::Bot:
    case State::Top:
      return true;
    case State::Exact:
      return actual && *actual == prefix_;
    case State::Pattern:
      return actual && starts_with(*actual, prefix_) && ends_with(*actual, suffix_);
  }
  return false;
}

LabelSetLattice LabelSetLattice::join(const LabelSetLattice& o) const {
  if (is_bot()) return o;
  if (o.is_bot()) return *this;
  std::set<std::string> both;
  std::set_intersection(labels_.begin(), labels_.end(), o.labels_.begin(), o.labels_.end(),
                        std::inserter(both, both.end()));
  return of(std::move(both));
}

bool LabelSetLattice::admits(const std::set<std::string>& actual) const {
  return std::includes(actual.begin(), actual.end(), labels_.begin(), labels_.end());
}

NodePredicates NodePredicates::any(NodeKind kind) {
  NodePredicates p;
  p.kind = kind;
  p.label = ConstLattice<std::string>::top();
  p.data_type = AffixLattice::top();
  p.data_value = ConstLattice<std::string>::top();
  p.num_para = ConstLattice<int>::top();
  p.declaring_type = AffixLattice::top();
  p.trans_control_dep = LabelSetLattice::top();
  p.output_ignored = ConstLattice<bool>::top();
  return p;
}

NodeFacts node_facts(const Pdg& g, std::size_t index) {
  NodeFacts f;
  const Node& n = g.node(index);
  if (n.kind == NodeKind::Action) f.output_ignored = compute_output_ignored(g, n.id);
  f.trans_control_dep = compute_trans_control_dep(g, n.id);
  return f;
}

NodePredicates from_node(const Node& n, const NodeFacts& facts) {
  NodePredicates p = NodePredicates::any(n.kind);
  if (!n.label.empty()) p.label = ConstLattice<std::string>::exactly(n.label);
  p.data_type = AffixLattice::of(n.data_type);
  p.data_value = ConstLattice<std::string>::of(n.data_value);
  p.num_para = ConstLattice<int>::of(n.num_para);
  p.declaring_type = AffixLattice::of(n.declaring_type);
  p.trans_control_dep = LabelSetLattice::of(facts.trans_control_dep);
  if (n.kind == NodeKind::Action) p.output_ignored = ConstLattice<bool>::exactly(facts.output_ignored);
  return p;
}

NodePredicates from_node(const Pdg& g, std::size_t index) { return from_node(g.node(index), node_facts(g, index)); }

NodePredicates join(const NodePredicates& a, const NodePredicates& b) {
  if (a.kind != b.kind) throw std::invalid_argument("join of data and action node predicates");
  NodePredicates r;
  r.kind = a.kind;
  r.label = a.label.join(b.label);
  r.data_type = a.data_type.join(b.data_type);
  r.data_value = a.data_value.join(b.data_value);
  r.num_para = a.num_para.join(b.num_para);
  r.declaring_type = a.declaring_type.join(b.declaring_type);
  r.trans_control_dep = a.trans_control_dep.join(b.trans_control_dep);
  r.output_ignored = a.output_ignored.join(b.output_ignored);
  return r;
}

bool satisfies(const Node& n, const NodeFacts& facts, const NodePredicates& p) {
  if (n.kind != p.kind) return false;
  const std::optional<std::string> label = n.label.empty() ? std::nullopt : std::optional(n.label);
  if (!p.label.admits(label)) return false;
  if (!p.data_type.admits(n.data_type)) return false;
  if (!p.data_value.admits(n.data_value)) return false;
  if (!p.num_para.admits(n.num_para)) return false;
  if (!p.declaring_type.admits(n.declaring_type)) return false;
  if (!p.trans_control_dep.admits(facts.trans_control_dep)) return false;
  if (p.output_ignored.is_exact()) {
    if (n.kind != NodeKind::Action || facts.output_ignored != p.output_ignored.value()) return false;
  }
  return true;
}

bool satisfies(const Pdg& g, std::size_t index, const NodePredicates& p) {
  return satisfies(g.node(index), node_facts(g, index), p);
}

bool is_vacuous(const NodePredicates& p) {
  return !p.label.is_exact() && (p.data_type.is_bot() || p.data_type.is_top()) && !p.data_value.is_exact() &&
         !p.num_para.is_exact() && (p.declaring_type.is_bot() || p.declaring_type.is_top()) &&
         (p.trans_control_dep.is_bot() || p.trans_control_dep.is_top()) && !p.output_ignored.is_exact();
}

std::string encode(const ConstLattice<std::string>& l) { return l.is_top() ? "*" : "exact:" + l.value(); }
std::string encode(const ConstLattice<int>& l) { return l.is_top() ? "*" : "exact:" + std::to_string(l.value()); }
std::string encode(const ConstLattice<bool>& l) {
  return l.is_top() ? "*" : std::string("exact:") + (l.value() ? "true" : "false");
}
std::string encode(const AffixLattice& l) {
  if (l.is_top()) return "*";
  if (l.is_exact()) return "exact:" + l.prefix();
  return "affix:" + l.prefix() + "*" + l.suffix();
}
std::string encode(const LabelSetLattice& l) {
  if (l.is_top()) return "*";
  std::string out = "subset:[";
  bool first = true;
  for (const auto& s : l.labels()) {
    if (!first) out += ",";
    out += s;
    first = false;
  }
  return out + "]";
}

namespace {

[[noreturn]] void bad(const std::string& field, std::string_view text, const char* expected) {
  throw SchemaError(field + ": cannot decode \"" + std::string(text) + "\" (expected " + expected + ")");
}

std::optional<std::string_view> strip(std::string_view text, std::string_view tag) {
  if (!starts_with(text, tag)) return std::nullopt;
  return text.substr(tag.size());
}

}  // namespace

ConstLattice<std::string> decode_const_string(std::string_view text, const std::string& field) {
  if (text == "*") return ConstLattice<std::string>::top();
  if (auto v = strip(text, "exact:")) return ConstLattice<std::string>::exactly(std::string(*v));
  bad(field, text, "\"*\" or \"exact:<value>\"");
}

ConstLattice<int> decode_const_int(std::string_view text, const std::string& field) {
  if (text == "*") return ConstLattice<int>::top();
  if (auto v = strip(text, "exact:")) {
    try {
      std::size_t used = 0;
      const std::string s(*v);
      int n = std::stoi(s, &used);
      if (used == s.size()) return ConstLattice<int>::exactly(n);
    } catch (const std::exception&) {
    }
  }
  bad(field, text, "\"*\" or \"exact:<integer>\"");
}

ConstLattice<bool> decode_const_bool(std::string_view text, const std::string& field) {
  if (text == "*") return ConstLattice<bool>::top();
  if (text == "exact:true") return ConstLattice<bool>::exactly(true);
  if (text == "exact:false") return ConstLattice<bool>::exactly(false);
  bad(field, text, "\"*\", \"exact:true\" or \"exact:false\"");
}

AffixLattice decode_affix(std::string_view text, const std::string& field) {
  if (text == "*") return AffixLattice::top();
  if (auto v = strip(text, "exact:")) return AffixLattice::exactly(std::string(*v));
  if (auto v = strip(text, "affix:")) {
    const auto star = v->find('*');
    if (star == std::string_view::npos) bad(field, text, "\"affix:<prefix>*<suffix>\"");
    return AffixLattice::pattern(std::string(v->substr(0, star)), std::string(v->substr(star + 1)));
  }
  bad(field, text, "\"*\", \"exact:<value>\" or \"affix:<prefix>*<suffix>\"");
}

LabelSetLattice decode_label_set(std::string_view text, const std::string& field) {
  if (text == "*") return LabelSetLattice::top();
  if (auto v = strip(text, "subset:[")) {
    if (v->empty() || v->back() != ']') bad(field, text, "\"subset:[a,b,...]\"");
    std::string_view body = v->substr(0, v->size() - 1);
    std::set<std::string> labels;
    while (!body.empty()) {
      const auto comma = body.find(',');
      std::string_view item = body.substr(0, comma);
      if (item.empty()) bad(field, text, "non-empty labels");
      labels.emplace(item);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
      if (body.empty()) bad(field, text, "non-empty labels");
    }
    return LabelSetLattice::of(std::move(labels));
  }
  bad(field, text, "\"*\" or \"subset:[a,b,...]\"");
}

}  // namespace rulesynth
