#include "rulesynth/align.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "rulesynth/error.hpp"

namespace rulesynth {

namespace {

std::string var_token(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

bool action_compatible(const AlignNode& a, const AlignNode& b, AlignMode mode) {
  if (a.kind != NodeKind::Action || b.kind != NodeKind::Action) return false;
  if (!(a.label == b.label)) return false;
  return mode == AlignMode::Postcondition || a.change_tag == b.change_tag;
}

void check_pins(const AlignmentProblem& p) {
  std::set<std::size_t> left;
  std::set<std::size_t> right;
  for (const auto& [a, b] : p.pins) {
    if (a >= p.g1.nodes.size() || b >= p.g2.nodes.size()) throw AlignmentError("pin references a missing node");
    if (!left.insert(a).second || !right.insert(b).second)
      throw AlignmentError("node pinned twice: " + p.g1.nodes[a].name + " / " + p.g2.nodes[b].name);
    const AlignNode& x = p.g1.nodes[a];
    const AlignNode& y = p.g2.nodes[b];
    if (x.kind != y.kind) throw AlignmentError("pin pairs a data node with an action node: " + x.name + " / " + y.name);
    if (x.kind == NodeKind::Action && !action_compatible(x, y, p.mode))
      throw AlignmentError("pin pairs incompatible action nodes: " + x.name + " / " + y.name);
  }
}

}  // namespace

AlignGraph align_view(const Pdg& g) {
  AlignGraph v;
  v.nodes.reserve(g.size());
  for (const Node& n : g.nodes()) {
    AlignNode a;
    a.name = n.id;
    a.kind = n.kind;
    a.label = n.label.empty() ? ConstLattice<std::string>::top() : ConstLattice<std::string>::exactly(n.label);
    a.change_tag = n.change_tag;
    v.nodes.push_back(std::move(a));
  }
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    auto ends = g.endpoints(e);
    if (!ends) throw SchemaError("edge with a dangling endpoint in " + g.describe());
    v.edges.push_back(AlignEdge{ends->first, ends->second, g.edges()[e].label});
  }
  return v;
}

std::optional<std::size_t> Alignment::image(std::size_t n1) const {
  auto it = std::lower_bound(node_map.begin(), node_map.end(), std::make_pair(n1, std::size_t{0}));
  if (it != node_map.end() && it->first == n1) return it->second;
  return std::nullopt;
}

std::optional<std::size_t> Alignment::preimage(std::size_t n2) const {
  for (const auto& [a, b] : node_map)
    if (b == n2) return a;
  return std::nullopt;
}

AlignmentIlp build_alignment_ilp(const AlignmentProblem& p, const AlignOptions& options) {
  check_pins(p);
  const auto& g1 = p.g1;
  const auto& g2 = p.g2;
  const std::size_t n1 = g1.nodes.size();
  const std::size_t n2 = g2.nodes.size();

  std::set<std::pair<std::size_t, std::size_t>> pinned(p.pins.begin(), p.pins.end());
  // cand[i][j]: pair (i, j) may be aligned.
  std::vector<std::vector<bool>> cand(n1, std::vector<bool>(n2, false));
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      cand[i][j] = action_compatible(g1.nodes[i], g2.nodes[j], p.mode) || pinned.count({i, j}) > 0;

  auto edges_compatible = [&](const AlignEdge& a, const AlignEdge& b) {
    return a.label == b.label && cand[a.src][b.src] && cand[a.dst][b.dst];
  };

  // Data pairs need at least one alignable incident edge pair; iterate
  // because support may come through other data pairs.
  std::vector<std::vector<std::size_t>> inc1(n1), inc2(n2);
  for (std::size_t e = 0; e < g1.edges.size(); ++e) {
    inc1[g1.edges[e].src].push_back(e);
    if (g1.edges[e].dst != g1.edges[e].src) inc1[g1.edges[e].dst].push_back(e);
  }
  for (std::size_t e = 0; e < g2.edges.size(); ++e) {
    inc2[g2.edges[e].src].push_back(e);
    if (g2.edges[e].dst != g2.edges[e].src) inc2[g2.edges[e].dst].push_back(e);
  }
  auto supported = [&](std::size_t i, std::size_t j) {
    for (std::size_t a : inc1[i]) {
      for (std::size_t b : inc2[j]) {
        const AlignEdge& x = g1.edges[a];
        const AlignEdge& y = g2.edges[b];
        if ((x.src == i) != (y.src == j) || (x.dst == i) != (y.dst == j)) continue;
        if (x.label != y.label) continue;
        const std::size_t ox = x.src == i ? x.dst : x.src;
        const std::size_t oy = y.src == j ? y.dst : y.src;
        if ((ox == i && oy == j) || cand[ox][oy]) return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      if (g1.nodes[i].kind == NodeKind::Data && g2.nodes[j].kind == NodeKind::Data) cand[i][j] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        if (!cand[i][j] || g1.nodes[i].kind != NodeKind::Data || pinned.count({i, j})) continue;
        if (!supported(i, j)) {
          cand[i][j] = false;
          changed = true;
        }
      }
    }
  }

  AlignmentIlp out;
  for (NodeKind kind : {NodeKind::Action, NodeKind::Data})
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j)
        if (cand[i][j] && g1.nodes[i].kind == kind) out.node_pairs.emplace_back(i, j);
  if (out.node_pairs.size() > options.max_node_pairs)
    throw SolverBudgetExceeded("alignment has " + std::to_string(out.node_pairs.size()) +
                               " candidate node pairs, above the cap of " + std::to_string(options.max_node_pairs));
  for (std::size_t a = 0; a < g1.edges.size(); ++a)
    for (std::size_t b = 0; b < g2.edges.size(); ++b)
      if (edges_compatible(g1.edges[a], g2.edges[b])) out.edge_pairs.emplace_back(a, b);

  IlpInstance& ilp = out.instance;
  std::vector<std::vector<int>> pair_var(n1, std::vector<int>(n2, -1));
  for (const auto& [i, j] : out.node_pairs)
    pair_var[i][j] = ilp.add_var("z_" + var_token(g1.nodes[i].name) + "__" + var_token(g2.nodes[j].name), 1);
  std::vector<int> edge_var;
  for (const auto& [a, b] : out.edge_pairs)
    edge_var.push_back(ilp.add_var("ze_" + std::to_string(a) + "__" + std::to_string(b), 1));

  // Every node and edge is mapped at most once, with slack.
  std::vector<IlpConstraint> rows_n1(n1), rows_n2(n2), rows_e1(g1.edges.size()), rows_e2(g2.edges.size());
  for (std::size_t k = 0; k < out.node_pairs.size(); ++k) {
    const auto [i, j] = out.node_pairs[k];
    rows_n1[i].terms.push_back({static_cast<int>(k), 1});
    rows_n2[j].terms.push_back({static_cast<int>(k), 1});
  }
  for (std::size_t k = 0; k < out.edge_pairs.size(); ++k) {
    const auto [a, b] = out.edge_pairs[k];
    rows_e1[a].terms.push_back({edge_var[k], 1});
    rows_e2[b].terms.push_back({edge_var[k], 1});
  }
  auto emit = [&](std::vector<IlpConstraint>& rows, const std::string& prefix, int group,
                  const std::function<std::string(std::size_t)>& name) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      IlpConstraint c = std::move(rows[r]);
      c.name = prefix + std::to_string(r);
      c.terms.push_back({ilp.add_var("s_" + name(r), 0), 1});
      c.sense = Sense::Eq;
      c.rhs = 1;
      c.cover_group = group;
      ilp.constraints.push_back(std::move(c));
    }
  };
  emit(rows_n1, "map_n1_", 0, [&](std::size_t r) { return "g1_" + var_token(g1.nodes[r].name); });
  emit(rows_n2, "map_n2_", 1, [&](std::size_t r) { return "g2_" + var_token(g2.nodes[r].name); });
  emit(rows_e1, "map_e1_", 0, [&](std::size_t r) { return "g1_e" + std::to_string(r); });
  emit(rows_e2, "map_e2_", 1, [&](std::size_t r) { return "g2_e" + std::to_string(r); });

  // Pinned pairs must be aligned.
  for (const auto& [i, j] : p.pins)
    ilp.constraints.push_back(IlpConstraint{"pin_" + std::to_string(i) + "_" + std::to_string(j),
                                            {{pair_var[i][j], 1}}, Sense::Eq, 1, -1});
  // Edges follow their endpoints.
  for (std::size_t k = 0; k < out.edge_pairs.size(); ++k) {
    const auto [a, b] = out.edge_pairs[k];
    const AlignEdge& x = g1.edges[a];
    const AlignEdge& y = g2.edges[b];
    ilp.constraints.push_back(IlpConstraint{"src_" + std::to_string(k),
                                            {{edge_var[k], 1}, {pair_var[x.src][y.src], -1}}, Sense::Le, 0, -1});
    ilp.constraints.push_back(IlpConstraint{"dst_" + std::to_string(k),
                                            {{edge_var[k], 1}, {pair_var[x.dst][y.dst], -1}}, Sense::Le, 0, -1});
  }
  // An aligned data pair needs an aligned incident edge pair.
  std::vector<std::vector<int>> incident(out.node_pairs.size());
  for (std::size_t k = 0; k < out.edge_pairs.size(); ++k) {
    const auto [a, b] = out.edge_pairs[k];
    const AlignEdge& x = g1.edges[a];
    const AlignEdge& y = g2.edges[b];
    for (std::size_t v = 0; v < out.node_pairs.size(); ++v) {
      const auto& np = out.node_pairs[v];
      if ((np.first == x.src && np.second == y.src) || (np.first == x.dst && np.second == y.dst))
        incident[v].push_back(edge_var[k]);
    }
  }
  for (std::size_t v = 0; v < out.node_pairs.size(); ++v) {
    const auto [i, j] = out.node_pairs[v];
    if (g1.nodes[i].kind != NodeKind::Data || pinned.count({i, j})) continue;
    IlpConstraint c{"couple_" + std::to_string(v), {{static_cast<int>(v), 1}}, Sense::Le, 0, -1};
    for (int e : incident[v]) c.terms.push_back({e, -1});
    ilp.constraints.push_back(std::move(c));
  }
  return out;
}

Alignment align(const AlignmentProblem& p, const AlignOptions& options) {
  AlignmentIlp built = build_alignment_ilp(p, options);
  if (options.on_instance) options.on_instance(built.instance);
  BranchAndBoundSolver fallback(BranchAndBoundOptions{options.max_search_nodes});
  IlpSolver& solver = options.solver ? *options.solver : fallback;
  const IlpSolution sol = solver.solve(built.instance);
  Alignment a;
  for (std::size_t k = 0; k < built.node_pairs.size(); ++k)
    if (sol.values[k]) a.node_map.push_back(built.node_pairs[k]);
  for (std::size_t k = 0; k < built.edge_pairs.size(); ++k)
    if (sol.values[built.node_pairs.size() + k]) a.edge_map.push_back(built.edge_pairs[k]);
  std::sort(a.node_map.begin(), a.node_map.end());
  std::sort(a.edge_map.begin(), a.edge_map.end());
  a.objective = sol.objective;
  check_alignment(p, a);
  return a;
}

void check_alignment(const AlignmentProblem& p, const Alignment& a) {
  std::set<std::size_t> left, right, eleft, eright;
  std::set<std::pair<std::size_t, std::size_t>> nodes(a.node_map.begin(), a.node_map.end());
  for (const auto& [i, j] : a.node_map) {
    if (i >= p.g1.nodes.size() || j >= p.g2.nodes.size()) throw AlignmentError("node map references a missing node");
    if (!left.insert(i).second || !right.insert(j).second) throw AlignmentError("node map is not injective");
    const AlignNode& x = p.g1.nodes[i];
    const AlignNode& y = p.g2.nodes[j];
    if (x.kind != y.kind) throw AlignmentError("node map pairs nodes of different kinds: " + x.name + " / " + y.name);
    if (x.kind == NodeKind::Action && !action_compatible(x, y, p.mode))
      throw AlignmentError("node map pairs incompatible action nodes: " + x.name + " / " + y.name);
  }
  for (const auto& pin : p.pins)
    if (!nodes.count(pin)) throw AlignmentError("pinned pair missing from the alignment: " + p.g1.nodes[pin.first].name);
  std::vector<bool> supported1(p.g1.nodes.size(), false);
  for (const auto& [e1, e2] : a.edge_map) {
    if (e1 >= p.g1.edges.size() || e2 >= p.g2.edges.size()) throw AlignmentError("edge map references a missing edge");
    if (!eleft.insert(e1).second || !eright.insert(e2).second) throw AlignmentError("edge map is not injective");
    const AlignEdge& x = p.g1.edges[e1];
    const AlignEdge& y = p.g2.edges[e2];
    if (x.label != y.label) throw AlignmentError("edge map pairs edges with different labels");
    if (!nodes.count({x.src, y.src}) || !nodes.count({x.dst, y.dst}))
      throw AlignmentError("edge map is inconsistent with the node map");
    supported1[x.src] = supported1[x.dst] = true;
  }
  std::set<std::pair<std::size_t, std::size_t>> pins(p.pins.begin(), p.pins.end());
  for (const auto& [i, j] : a.node_map) {
    if (p.g1.nodes[i].kind == NodeKind::Data && !supported1[i] && !pins.count({i, j}))
      throw AlignmentError("data node aligned without an aligned incident edge: " + p.g1.nodes[i].name);
  }
  if (a.objective != static_cast<long long>(a.node_map.size() + a.edge_map.size()))
    throw AlignmentError("objective does not count mapped nodes and edges");
}

std::pair<Pdg, Pdg> diff_pdgs(const Pdg& before, const Pdg& after, const AlignOptions& options) {
  AlignmentProblem p;
  p.g1 = align_view(before);
  p.g2 = align_view(after);
  p.mode = AlignMode::Postcondition;
  const Alignment a = align(p, options);
  std::vector<Node> b = before.nodes();
  std::vector<Node> f = after.nodes();
  for (Node& n : b) n.change_tag = ChangeTag::Deleted;
  for (Node& n : f) n.change_tag = ChangeTag::Added;
  for (const auto& [i, j] : a.node_map) {
    b[i].change_tag = ChangeTag::Unchanged;
    f[j].change_tag = ChangeTag::Unchanged;
  }
  return {Pdg(std::move(b), before.edges(), before.origin()), Pdg(std::move(f), after.edges(), after.origin())};
}

}  // namespace rulesynth
