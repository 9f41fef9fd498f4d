#include "rulesynth/formula.hpp"

#include <cctype>
#include <set>

#include "rulesynth/error.hpp"

namespace rulesynth {

bool natural_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t k = s.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
    return std::make_pair(s.substr(0, k), s.substr(k));
  };
  const auto [pa, na] = split(a);
  const auto [pb, nb] = split(b);
  if (pa != pb) return pa < pb;
  if (na.size() != nb.size()) return na.size() < nb.size();
  return na < nb;
}

NodePredicates strip_uninformative(NodePredicates p) {
  if (p.label.is_top()) p.label = ConstLattice<std::string>::bot();
  if (p.data_type.is_top()) p.data_type = AffixLattice::bot();
  if (p.data_value.is_top()) p.data_value = ConstLattice<std::string>::bot();
  if (p.num_para.is_top()) p.num_para = ConstLattice<int>::bot();
  if (p.declaring_type.is_top()) p.declaring_type = AffixLattice::bot();
  if (p.trans_control_dep.is_top()) p.trans_control_dep = LabelSetLattice::bot();
  if (p.output_ignored.is_top()) p.output_ignored = ConstLattice<bool>::bot();
  return p;
}

void check_conjunct(const QuantifiedConjunct& q, const std::string& where) {
  std::set<std::string> declared;
  for (const auto& v : q.free_vars)
    if (!declared.insert(v).second) throw SchemaError(where + ": variable " + v + " declared twice");
  for (const auto& v : q.bound_vars)
    if (!declared.insert(v).second) throw SchemaError(where + ": variable " + v + " declared twice");
  for (const auto& v : declared)
    if (!q.nodes.count(v)) throw SchemaError(where + ": variable " + v + " has no node atom");
  for (const auto& [v, p] : q.nodes)
    if (!declared.count(v)) throw SchemaError(where + ".nodes: undeclared variable " + v);
  for (const auto& e : q.edges)
    if (!declared.count(e.src) || !declared.count(e.dst))
      throw SchemaError(where + ".edges: atom " + e.src + " -" + to_string(e.label) + "-> " + e.dst +
                        " uses an undeclared variable");
}

namespace {

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string affix_text(const AffixLattice& l) {
  if (l.is_exact()) return quote(l.prefix());
  return quote(l.prefix() + ".*" + l.suffix());
}

void node_atoms(const std::string& v, const NodePredicates& p, std::vector<std::string>& out) {
  const std::size_t before = out.size();
  if (p.label.is_exact()) out.push_back("label(" + v + ") = " + quote(p.label.value()));
  if (p.num_para.is_exact()) out.push_back("num-para(" + v + ") = " + std::to_string(p.num_para.value()));
  if (p.declaring_type.is_exact() || p.declaring_type.is_pattern())
    out.push_back("declaring-type(" + v + ") = " + affix_text(p.declaring_type));
  if (p.data_type.is_exact() || p.data_type.is_pattern())
    out.push_back("data-type(" + v + ") = " + affix_text(p.data_type));
  if (p.data_value.is_exact()) out.push_back("data-value(" + v + ") = " + quote(p.data_value.value()));
  if (!p.trans_control_dep.is_bot() && !p.trans_control_dep.is_top()) {
    std::string s;
    for (const auto& l : p.trans_control_dep.labels()) s += (s.empty() ? "" : ", ") + l;
    out.push_back("trans-control-dep(" + v + ") >= {" + s + "}");
  }
  if (p.output_ignored.is_exact())
    out.push_back(std::string(p.output_ignored.value() ? "" : "!") + "output-ignored(" + v + ")");
  if (out.size() == before) {
    out.push_back(p.kind == NodeKind::Data ? "data-type(" + v + ") = \".*\"" : "action(" + v + ")");
  }
}

}  // namespace

std::string render_atoms(const QuantifiedConjunct& q, bool multiline) {
  std::vector<std::string> atoms;
  for (const auto& v : q.free_vars)
    if (auto it = q.nodes.find(v); it != q.nodes.end()) node_atoms(v, it->second, atoms);
  for (const auto& v : q.bound_vars)
    if (auto it = q.nodes.find(v); it != q.nodes.end()) node_atoms(v, it->second, atoms);
  for (const auto& e : q.edges) atoms.push_back(e.src + " -" + to_string(e.label) + "-> " + e.dst);
  if (atoms.empty()) return "True";
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0) out += multiline ? " /\\\n" : " /\\ ";
    out += atoms[i];
  }
  return out;
}

QuantifiedConjunct rename_vars(const QuantifiedConjunct& q, const std::map<std::string, std::string>& names) {
  auto name = [&](const std::string& v) {
    auto it = names.find(v);
    return it == names.end() ? v : it->second;
  };
  QuantifiedConjunct out;
  for (const auto& v : q.free_vars) out.free_vars.push_back(name(v));
  for (const auto& v : q.bound_vars) out.bound_vars.push_back(name(v));
  std::sort(out.free_vars.begin(), out.free_vars.end(), natural_less);
  std::sort(out.bound_vars.begin(), out.bound_vars.end(), natural_less);
  for (const auto& [v, p] : q.nodes) out.nodes.emplace(name(v), p);
  for (const auto& e : q.edges) out.edges.push_back(EdgeAtom{name(e.src), e.label, name(e.dst)});
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  return out;
}

}  // namespace rulesynth
