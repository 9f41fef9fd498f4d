#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>

#include "rulesynth/error.hpp"
#include "rulesynth/frontend.hpp"

namespace rulesynth {

namespace {

bool is_relational(std::string_view op) {
  return op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=";
}

bool has_prefix_word(std::string_view s, std::string_view prefix) {
  if (s.size() <= prefix.size() || s.substr(0, prefix.size()) != prefix) return false;
  const char next = s[prefix.size()];
  return (next >= 'A' && next <= 'Z') || (next >= '0' && next <= '9') || next == '_';
}

}  // namespace

Pdg normalize_relops(const Pdg& g) {
  std::vector<Node> nodes = g.nodes();
  for (Node& n : nodes)
    if (n.kind == NodeKind::Action && is_relational(n.label)) n.label = std::string(kRelOpLabel);
  return Pdg(std::move(nodes), g.edges(), g.origin());
}

bool is_getter_name(std::string_view label) {
  return has_prefix_word(label, "get") || has_prefix_word(label, "is") || has_prefix_word(label, "has");
}

Pdg dedup_getters(const Pdg& g) {
  const std::size_t n = g.size();
  // survivor[i] = index of the call that replaces getter call i.
  std::vector<std::size_t> survivor(n);
  for (std::size_t i = 0; i < n; ++i) survivor[i] = i;
  std::map<std::pair<std::string, std::size_t>, std::size_t> first;
  for (std::size_t i = 0; i < n; ++i) {
    const Node& a = g.node(i);
    if (a.kind != NodeKind::Action || a.num_para.value_or(-1) != 0 || !is_getter_name(a.label)) continue;
    std::optional<std::size_t> recv;
    int recv_count = 0;
    for (std::size_t e : g.in_edges(i)) {
      if (g.edges()[e].label.kind == EdgeKind::Recv) {
        recv = g.endpoints(e)->first;
        ++recv_count;
      }
    }
    if (recv_count != 1) continue;
    auto [it, inserted] = first.emplace(std::make_pair(a.label, *recv), i);
    if (!inserted) survivor[i] = it->second;
  }

  auto def_target = [&](std::size_t call) -> std::optional<std::size_t> {
    for (std::size_t e : g.out_edges(call))
      if (g.edges()[e].label.kind == EdgeKind::Def) return g.endpoints(e)->second;
    return std::nullopt;
  };

  // Data nodes to fold into the survivor's result (or to adopt as its result
  // when the survivor's own value was never materialized).
  std::vector<std::size_t> replace(n);
  for (std::size_t i = 0; i < n; ++i) replace[i] = i;
  std::vector<bool> drop(n, false);
  std::map<std::size_t, std::size_t> adopted_def;  // survivor -> adopted data node
  for (std::size_t i = 0; i < n; ++i) {
    if (survivor[i] == i) continue;
    drop[i] = true;
    const std::size_t s = survivor[i];
    auto d = def_target(i);
    if (!d) continue;
    std::optional<std::size_t> sd = def_target(s);
    if (!sd) {
      auto it = adopted_def.find(s);
      if (it != adopted_def.end()) sd = it->second;
    }
    if (sd) {
      replace[*d] = *sd;
      drop[*d] = true;
    } else {
      adopted_def[s] = *d;
    }
  }

  std::vector<Node> nodes;
  for (std::size_t i = 0; i < n; ++i)
    if (!drop[i]) nodes.push_back(g.node(i));
  std::vector<Edge> edges;
  std::set<std::tuple<std::size_t, std::size_t, EdgeLabel>> seen;
  auto push = [&](std::size_t s, std::size_t d, EdgeLabel l) {
    if (seen.emplace(s, d, l).second) edges.push_back(Edge{g.node(s).id, g.node(d).id, l});
  };
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    auto ends = g.endpoints(e);
    if (!ends) continue;
    auto [s, d] = *ends;
    const EdgeLabel l = g.edges()[e].label;
    if (survivor[s] != s || survivor[d] != d) {
      // Edges of a removed call: only its result survives, re-parented.
      if (survivor[s] != s && l.kind == EdgeKind::Def && adopted_def.count(survivor[s]) &&
          adopted_def[survivor[s]] == d)
        push(survivor[s], d, l);
      continue;
    }
    if (drop[s] && replace[s] == s) continue;
    if (drop[d] && replace[d] == d) continue;
    push(replace[s], replace[d], l);
  }
  return Pdg(std::move(nodes), std::move(edges), g.origin());
}

bool compute_output_ignored(const Pdg& g, std::string_view id) {
  const std::size_t i = g.at(id);
  if (g.node(i).kind != NodeKind::Action)
    throw SchemaError("output-ignored is defined only for action nodes, got data node '" + std::string(id) + "'");
  for (std::size_t e : g.out_edges(i)) {
    if (g.edges()[e].label.kind != EdgeKind::Def) continue;
    if (!g.out_edges(g.endpoints(e)->second).empty()) return false;
  }
  return true;
}

std::set<std::string> compute_trans_control_dep(const Pdg& g, std::string_view id) {
  const std::size_t start = g.at(id);
  std::set<std::string> labels;
  std::vector<bool> seen(g.size(), false);
  std::deque<std::size_t> work{start};
  seen[start] = true;
  while (!work.empty()) {
    const std::size_t cur = work.front();
    work.pop_front();
    for (std::size_t e : g.in_edges(cur)) {
      if (g.edges()[e].label.kind != EdgeKind::Dep) continue;
      const std::size_t src = g.endpoints(e)->first;
      if (g.node(src).kind == NodeKind::Action) labels.insert(g.node(src).label);
      if (!seen[src]) {
        seen[src] = true;
        work.push_back(src);
      }
    }
  }
  return labels;
}

}  // namespace rulesynth
