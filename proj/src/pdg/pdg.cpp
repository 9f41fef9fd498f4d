#include "rulesynth/pdg.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace rulesynth {

std::string to_string(EdgeLabel label) {
  switch (label.kind) {
    case EdgeKind::Recv: return "recv";
    case EdgeKind::Para: return "para" + std::to_string(label.para_index);
    case EdgeKind::Def: return "def";
    case EdgeKind::Dep: return "dep";
    case EdgeKind::Cond: return "cond";
    case EdgeKind::Throw: return "throw";
  }
  return "?";
}

std::optional<EdgeLabel> parse_edge_label(std::string_view text) {
  if (text == "recv") return EdgeLabel::recv();
  if (text == "def") return EdgeLabel::def();
  if (text == "dep") return EdgeLabel::dep();
  if (text == "cond") return EdgeLabel::cond();
  if (text == "throw") return EdgeLabel::thrw();
  if (text.starts_with("para")) {
    auto digits = text.substr(4);
    if (digits.empty()) return EdgeLabel::para(0);
    int index = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      index = index * 10 + (c - '0');
      if (index > 1'000'000) return std::nullopt;
    }
    return EdgeLabel::para(index);
  }
  return std::nullopt;
}

std::string_view to_string(NodeKind kind) { return kind == NodeKind::Data ? "data" : "action"; }

std::string_view to_string(ChangeTag tag) {
  switch (tag) {
    case ChangeTag::None: return "none";
    case ChangeTag::Unchanged: return "unchanged";
    case ChangeTag::Deleted: return "deleted";
    case ChangeTag::Added: return "added";
  }
  return "none";
}

Pdg::Pdg(std::vector<Node> nodes, std::vector<Edge> edges, std::optional<Origin> origin)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), origin_(std::move(origin)) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i].id, i);  // first wins
  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
  endpoints_.resize(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto s = index_.find(edges_[e].src);
    auto d = index_.find(edges_[e].dst);
    if (s == index_.end() || d == index_.end()) continue;
    endpoints_[e] = std::make_pair(s->second, d->second);
    out_[s->second].push_back(e);
    in_[d->second].push_back(e);
  }
}

std::optional<std::size_t> Pdg::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Pdg::at(std::string_view id) const {
  auto idx = index_of(id);
  if (!idx) throw std::out_of_range("unknown node id '" + std::string(id) + "'");
  return *idx;
}

std::optional<std::pair<std::size_t, std::size_t>> Pdg::endpoints(std::size_t e) const {
  return endpoints_.at(e);
}

bool Pdg::has_edge(std::size_t src, std::size_t dst, EdgeLabel label) const {
  for (std::size_t e : out_.at(src)) {
    if (endpoints_[e]->second == dst && edges_[e].label == label) return true;
  }
  return false;
}

std::string Pdg::describe() const {
  if (!origin_) return "<anonymous>";
  std::string out = origin_->file;
  if (!origin_->method.empty()) out += (out.empty() ? "" : ":") + origin_->method;
  if (origin_->line > 0) out += ":" + std::to_string(origin_->line);
  return out.empty() ? "<anonymous>" : out;
}

Pdg Pdg::with_origin(std::optional<Origin> origin) const { return Pdg(nodes_, edges_, std::move(origin)); }

std::vector<std::string> validate(const Pdg& g) {
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const Node& n : g.nodes()) {
    const std::string where = "node '" + n.id + "'";
    if (n.id.empty()) problems.push_back("node with empty id");
    if (!seen.insert(n.id).second) problems.push_back(where + ": duplicate id");
    if (n.kind == NodeKind::Action) {
      if (n.label.empty()) problems.push_back(where + ": action node without label");
      if (n.data_type) problems.push_back(where + ": data type on action node");
      if (n.data_value) problems.push_back(where + ": data value on action node");
      if (n.num_para && *n.num_para < 0) problems.push_back(where + ": negative parameter count");
    } else {
      if (n.num_para) problems.push_back(where + ": parameter count on data node");
      if (n.declaring_type) problems.push_back(where + ": declaring type on data node");
    }
  }

  std::set<std::tuple<std::string, std::string, EdgeLabel>> triples;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const Edge& edge = g.edges()[e];
    const std::string where = "edge " + edge.src + " -" + to_string(edge.label) + "-> " + edge.dst;
    auto src = g.index_of(edge.src);
    auto dst = g.index_of(edge.dst);
    if (!src) problems.push_back(where + ": unknown source node");
    if (!dst) problems.push_back(where + ": unknown destination node");
    if (edge.label.kind == EdgeKind::Para && edge.label.para_index < 0)
      problems.push_back(where + ": negative parameter index");
    if (!triples.emplace(edge.src, edge.dst, edge.label).second)
      problems.push_back(where + ": duplicate edge");
    if (src && edge.label.kind == EdgeKind::Def && g.node(*src).kind != NodeKind::Action)
      problems.push_back(where + ": def edge must start at an action node");
    if (dst && (edge.label.kind == EdgeKind::Recv || edge.label.kind == EdgeKind::Para) &&
        g.node(*dst).kind != NodeKind::Action)
      problems.push_back(where + ": " + to_string(EdgeLabel{edge.label.kind, 0}).substr(0, 4) +
                         " edge must end at an action node");
  }
  return problems;
}

std::vector<std::string> neighbors(const Pdg& g, std::string_view id) {
  const std::size_t n = g.at(id);
  std::set<std::size_t> adjacent;
  for (std::size_t e : g.out_edges(n)) adjacent.insert(g.endpoints(e)->second);
  for (std::size_t e : g.in_edges(n)) adjacent.insert(g.endpoints(e)->first);
  adjacent.erase(n);
  std::vector<std::string> out;
  for (std::size_t i : adjacent) out.push_back(g.node(i).id);
  return out;
}

bool same_graph(const Pdg& a, const Pdg& b) {
  if (a.size() != b.size() || a.edges().size() != b.edges().size()) return false;
  for (const Node& n : a.nodes()) {
    auto j = b.index_of(n.id);
    if (!j || !(b.node(*j) == n)) return false;
  }
  auto key = [](const Edge& e) { return std::make_tuple(e.src, e.dst, e.label); };
  std::multiset<std::tuple<std::string, std::string, EdgeLabel>> ea, eb;
  for (const Edge& e : a.edges()) ea.insert(key(e));
  for (const Edge& e : b.edges()) eb.insert(key(e));
  return ea == eb;
}

namespace {

// Every node field except the id.
auto node_signature(const Node& n) {
  return std::make_tuple(n.kind, n.label, n.data_type, n.data_value, n.num_para, n.declaring_type,
                         n.change_tag);
}

}  // namespace

bool isomorphic(const Pdg& a, const Pdg& b) {
  if (a.size() != b.size() || a.edges().size() != b.edges().size()) return false;
  const std::size_t n = a.size();
  std::vector<std::size_t> map(n, SIZE_MAX);
  std::vector<bool> used(n, false);

  auto degree = [](const Pdg& g, std::size_t i) {
    return std::make_pair(g.out_edges(i).size(), g.in_edges(i).size());
  };
  auto compatible = [&](std::size_t i, std::size_t j) {
    if (node_signature(a.node(i)) != node_signature(b.node(j))) return false;
    if (degree(a, i) != degree(b, j)) return false;
    // Edges towards already mapped nodes must correspond.
    for (std::size_t e : a.out_edges(i)) {
      auto t = a.endpoints(e)->second;
      std::size_t mt = t == i ? j : map[t];
      if (mt != SIZE_MAX && !b.has_edge(j, mt, a.edges()[e].label)) return false;
    }
    for (std::size_t e : a.in_edges(i)) {
      auto s = a.endpoints(e)->first;
      if (s == i) continue;
      if (map[s] != SIZE_MAX && !b.has_edge(map[s], j, a.edges()[e].label)) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> extend = [&](std::size_t i) -> bool {
    if (i == n) return true;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || !compatible(i, j)) continue;
      map[i] = j;
      used[j] = true;
      if (extend(i + 1)) return true;
      map[i] = SIZE_MAX;
      used[j] = false;
    }
    return false;
  };
  return extend(0);
}

}  // namespace rulesynth
