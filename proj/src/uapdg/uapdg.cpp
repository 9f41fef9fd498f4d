#include "rulesynth/uapdg.hpp"

#include <algorithm>
#include <sstream>

#include "rulesynth/error.hpp"

namespace rulesynth {

void check_vpdg(const Vpdg& v) {
  std::set<std::string> vars;
  for (const auto& [id, var] : v.valuation) {
    if (!v.graph.index_of(id)) throw SchemaError("valuation names unknown node " + id + " in " + v.graph.describe());
    if (!vars.insert(var).second) throw SchemaError("valuation maps two nodes to " + var + " in " + v.graph.describe());
  }
}

std::set<std::string> valuation_vars(const Vpdg& v) {
  std::set<std::string> out;
  for (const auto& [id, var] : v.valuation) out.insert(var);
  return out;
}

std::set<int> UNode::presence() const {
  std::set<int> out;
  for (const auto& [s, id] : origins) out.insert(s);
  return out;
}

std::set<std::string> Uapdg::free_vars() const {
  std::set<std::string> out;
  for (const auto& n : nodes)
    if (n.frozen) out.insert(n.var);
  return out;
}

std::set<int> Uapdg::sources() const {
  std::set<int> out;
  for (const auto& n : nodes)
    for (const auto& [s, id] : n.origins) out.insert(s);
  for (const auto& e : edges) out.insert(e.presence.begin(), e.presence.end());
  return out;
}

namespace {

// Renames bound variables y1, y2, ... in node order, avoiding free names.
void renumber_bound(Uapdg& a) {
  const std::set<std::string> taken = a.free_vars();
  int next = 1;
  for (auto& n : a.nodes) {
    if (n.frozen) continue;
    std::string name;
    do name = "y" + std::to_string(next++);
    while (taken.count(name));
    n.var = name;
  }
}

}  // namespace

Uapdg from_vpdg(const Vpdg& v, int source) {
  check_vpdg(v);
  const Pdg& g = v.graph;
  Uapdg a;
  a.nodes.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    UNode n;
    n.pred = from_node(g, i);
    n.change_tag = g.node(i).change_tag;
    n.origins[source] = g.node(i).id;
    if (auto it = v.valuation.find(g.node(i).id); it != v.valuation.end()) {
      n.var = it->second;
      n.frozen = true;
    }
    a.nodes.push_back(std::move(n));
  }
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    auto ends = g.endpoints(e);
    if (!ends) throw SchemaError("edge with a dangling endpoint in " + g.describe());
    a.edges.push_back(UEdge{ends->first, ends->second, g.edges()[e].label, {source}});
  }
  renumber_bound(a);
  return a;
}

AlignGraph align_view(const Uapdg& a) {
  AlignGraph v;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const UNode& n = a.nodes[i];
    v.nodes.push_back(AlignNode{n.var, n.pred.kind, n.pred.label, n.change_tag});
  }
  for (const auto& e : a.edges) v.edges.push_back(AlignEdge{e.src, e.dst, e.label});
  return v;
}

std::vector<std::pair<std::size_t, std::size_t>> frozen_pins(const Uapdg& a1, const Uapdg& a2) {
  std::vector<std::pair<std::size_t, std::size_t>> pins;
  for (std::size_t i = 0; i < a1.nodes.size(); ++i) {
    if (!a1.nodes[i].frozen) continue;
    for (std::size_t j = 0; j < a2.nodes.size(); ++j)
      if (a2.nodes[j].frozen && a2.nodes[j].var == a1.nodes[i].var) pins.emplace_back(i, j);
  }
  return pins;
}

Uapdg merge(const Uapdg& a1, const Uapdg& a2, const Alignment& al) {
  if (a1.free_vars() != a2.free_vars()) throw UapdgError("merge of UAPDGs with different free variables");
  for (const auto& [i, j] : frozen_pins(a1, a2)) {
    if (al.image(i) != j)
      throw UapdgError("alignment does not pin the nodes of free variable " + a1.nodes[i].var);
  }
  for (const auto& [i, j] : al.node_map) {
    if (i >= a1.nodes.size() || j >= a2.nodes.size()) throw UapdgError("alignment references a missing node");
    if (a1.nodes[i].frozen != a2.nodes[j].frozen)
      throw UapdgError("alignment pairs a frozen node with a bound one: " + a1.nodes[i].var + " / " + a2.nodes[j].var);
  }

  Uapdg out;
  std::vector<std::size_t> new1(a1.nodes.size()), new2(a2.nodes.size(), SIZE_MAX);
  for (std::size_t i = 0; i < a1.nodes.size(); ++i) {
    UNode n = a1.nodes[i];
    if (auto j = al.image(i)) {
      const UNode& m = a2.nodes[*j];
      n.pred = join(n.pred, m.pred);
      if (n.change_tag != m.change_tag) n.change_tag = ChangeTag::None;
      for (const auto& [s, id] : m.origins) {
        if (n.origins.count(s)) throw UapdgError("merge of UAPDGs that share source " + std::to_string(s));
        n.origins[s] = id;
      }
      new2[*j] = out.nodes.size();
    }
    new1[i] = out.nodes.size();
    out.nodes.push_back(std::move(n));
  }
  for (std::size_t j = 0; j < a2.nodes.size(); ++j) {
    if (new2[j] != SIZE_MAX) continue;
    new2[j] = out.nodes.size();
    out.nodes.push_back(a2.nodes[j]);
  }

  std::map<std::tuple<std::size_t, std::size_t, EdgeLabel>, std::size_t> index;
  auto add = [&](std::size_t s, std::size_t d, EdgeLabel l, const std::set<int>& presence) {
    auto key = std::make_tuple(s, d, l);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.edges.size());
      out.edges.push_back(UEdge{s, d, l, presence});
    } else {
      out.edges[it->second].presence.insert(presence.begin(), presence.end());
    }
  };
  std::vector<bool> used2(a2.edges.size(), false);
  std::vector<std::optional<std::size_t>> mapped1(a1.edges.size());
  for (const auto& [e1, e2] : al.edge_map) {
    if (a1.edges[e1].label != a2.edges[e2].label)
      throw UapdgError("alignment pairs edges with different labels");
    mapped1[e1] = e2;
    used2[e2] = true;
  }
  for (std::size_t e = 0; e < a1.edges.size(); ++e) {
    const UEdge& x = a1.edges[e];
    std::set<int> presence = x.presence;
    if (mapped1[e]) presence.insert(a2.edges[*mapped1[e]].presence.begin(), a2.edges[*mapped1[e]].presence.end());
    add(new1[x.src], new1[x.dst], x.label, presence);
  }
  for (std::size_t e = 0; e < a2.edges.size(); ++e) {
    if (used2[e]) continue;
    const UEdge& y = a2.edges[e];
    add(new2[y.src], new2[y.dst], y.label, y.presence);
  }
  renumber_bound(out);
  return out;
}

Uapdg project(const Uapdg& a, const std::set<int>& required_sources) {
  auto covers = [&](const std::set<int>& have) {
    return std::includes(have.begin(), have.end(), required_sources.begin(), required_sources.end());
  };
  Uapdg out;
  std::vector<std::size_t> remap(a.nodes.size(), SIZE_MAX);
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const UNode& n = a.nodes[i];
    if (!covers(n.presence())) {
      if (n.frozen) throw UapdgError("projection would drop the node of free variable " + n.var);
      continue;
    }
    remap[i] = out.nodes.size();
    out.nodes.push_back(n);
  }
  for (const auto& e : a.edges) {
    if (remap[e.src] == SIZE_MAX || remap[e.dst] == SIZE_MAX || !covers(e.presence)) continue;
    out.edges.push_back(UEdge{remap[e.src], remap[e.dst], e.label, e.presence});
  }
  return out;
}

QuantifiedConjunct to_formula(const Uapdg& a) {
  QuantifiedConjunct q;
  for (const auto& n : a.nodes) {
    (n.frozen ? q.free_vars : q.bound_vars).push_back(n.var);
    q.nodes.emplace(n.var, strip_uninformative(n.pred));
  }
  std::sort(q.free_vars.begin(), q.free_vars.end(), natural_less);
  std::sort(q.bound_vars.begin(), q.bound_vars.end(), natural_less);
  for (const auto& e : a.edges) q.edges.push_back(EdgeAtom{a.nodes[e.src].var, e.label, a.nodes[e.dst].var});
  std::sort(q.edges.begin(), q.edges.end());
  q.edges.erase(std::unique(q.edges.begin(), q.edges.end()), q.edges.end());
  return q;
}

Vpdg revaluate(const Uapdg& a, int source, const Pdg& example) {
  Vpdg v{example, {}};
  for (const auto& n : a.nodes) {
    auto it = n.origins.find(source);
    if (it == n.origins.end())
      throw UapdgError("node " + n.var + " is absent from source " + std::to_string(source));
    v.valuation[it->second] = n.var;
  }
  check_vpdg(v);
  return v;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string render_dot(const Uapdg& a, const std::string& title) {
  const std::set<int> all = a.sources();
  std::ostringstream out;
  out << "digraph \"" << escape(title) << "\" {\n";
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const UNode& n = a.nodes[i];
    QuantifiedConjunct single;
    single.free_vars.push_back(n.var);
    single.nodes.emplace(n.var, strip_uninformative(n.pred));
    const std::string label = escape(n.var + (n.frozen ? " (free)" : "")) + "\\n" + escape(render_atoms(single));
    out << "  u" << i << " [shape=" << (n.pred.kind == NodeKind::Action ? "box" : "ellipse") << ", label=\""
        << label << "\"";
    if (n.presence() != all) out << ", style=dashed";
    out << "];\n";
  }
  for (const auto& e : a.edges) {
    out << "  u" << e.src << " -> u" << e.dst << " [label=\"" << to_string(e.label) << "\"";
    if (e.presence != all) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace rulesynth
