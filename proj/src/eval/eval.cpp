#include "rulesynth/eval.hpp"

#include <algorithm>

namespace rulesynth {

Matcher::Matcher(const Pdg& g) : g_(g) {
  facts_.reserve(g_.size());
  for (std::size_t i = 0; i < g_.size(); ++i) {
    facts_.push_back(node_facts(g_, i));
    if (g_.node(i).kind == NodeKind::Action) action_labels_.insert(g_.node(i).label);
  }
  for (std::size_t e = 0; e < g_.edges().size(); ++e)
    if (auto ends = g_.endpoints(e)) edge_set_.emplace(ends->first, ends->second, g_.edges()[e].label);
}

bool Matcher::prefilter(const QuantifiedConjunct& q) const {
  for (const auto& [var, p] : q.nodes)
    if (p.kind == NodeKind::Action && p.label.is_exact() && !action_labels_.count(p.label.value())) return false;
  return true;
}

namespace {

struct VarEdge {
  int other;
  EdgeLabel label;
  bool outgoing;  // this var is the source
};

class Search {
 public:
  Search(const Matcher& m, const QuantifiedConjunct& q, const std::set<std::tuple<std::size_t, std::size_t, EdgeLabel>>& edges,
         MatchStats* stats)
      : m_(m), edges_(edges), stats_(stats) {
    for (const auto& v : q.free_vars) add_var(v);
    for (const auto& v : q.bound_vars) add_var(v);
    for (const auto& [v, p] : q.nodes) add_var(v);
    adj_.resize(vars_.size());
    for (const auto& e : q.edges) {
      const int a = index_.at(e.src);
      const int b = index_.at(e.dst);
      adj_[a].push_back(VarEdge{b, e.label, true});
      if (a != b) adj_[b].push_back(VarEdge{a, e.label, false});
    }
    const Pdg& g = m.graph();
    domain_.resize(vars_.size());
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      auto it = q.nodes.find(vars_[v]);
      for (std::size_t n = 0; n < g.size(); ++n) {
        if (it == q.nodes.end() || satisfies(g.node(n), m.facts(n), it->second))
          domain_[v].push_back(static_cast<int>(n));
      }
    }
    assign_.assign(vars_.size(), -1);
    used_.assign(g.size(), false);
  }

  void run(const Valuation& partial, const std::function<bool(const Valuation&)>& visit) {
    if (stats_) ++stats_->searched;
    for (const auto& [var, id] : partial) {
      auto n = m_.graph().index_of(id);
      if (!n) return;
      const int node = static_cast<int>(*n);
      if (used_[node]) return;
      auto it = index_.find(var);
      if (it == index_.end()) {
        // Carried through to the result and kept distinct, but unconstrained.
        extra_.emplace(var, id);
        used_[node] = true;
        continue;
      }
      if (!std::binary_search(domain_[it->second].begin(), domain_[it->second].end(), node)) return;
      assign_[it->second] = node;
      used_[node] = true;
    }
    for (std::size_t v = 0; v < vars_.size(); ++v)
      if (assign_[v] >= 0 && !consistent(static_cast<int>(v), assign_[v])) return;
    visit_ = &visit;
    dfs();
  }

 private:
  void add_var(const std::string& v) {
    if (index_.emplace(v, static_cast<int>(vars_.size())).second) vars_.push_back(v);
  }

  bool has_edge(int src, int dst, EdgeLabel l) const {
    return edges_.count({static_cast<std::size_t>(src), static_cast<std::size_t>(dst), l}) > 0;
  }

  // Edge atoms between v (placed on `node`) and already assigned variables.
  bool consistent(int v, int node) const {
    for (const auto& e : adj_[v]) {
      const int other = e.other == v ? node : assign_[e.other];
      if (other < 0) continue;
      if (e.outgoing ? !has_edge(node, other, e.label) : !has_edge(other, node, e.label)) return false;
    }
    return true;
  }

  std::vector<int> candidates(int v) const {
    std::vector<int> out;
    for (int n : domain_[v])
      if (!used_[n] && consistent(v, n)) out.push_back(n);
    return out;
  }

  // Returns false once the visitor asks to stop.
  bool dfs() {
    int best = -1;
    std::vector<int> best_cands;
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      if (assign_[v] >= 0) continue;
      std::vector<int> c = candidates(static_cast<int>(v));
      if (best < 0 || c.size() < best_cands.size()) {
        best = static_cast<int>(v);
        best_cands = std::move(c);
        if (best_cands.empty()) return true;
      }
    }
    if (best < 0) {
      Valuation val = extra_;
      for (std::size_t v = 0; v < vars_.size(); ++v) val[vars_[v]] = m_.graph().node(assign_[v]).id;
      return (*visit_)(val);
    }
    for (int n : best_cands) {
      if (stats_) ++stats_->steps;
      assign_[best] = n;
      used_[n] = true;
      const bool go_on = dfs();
      used_[n] = false;
      assign_[best] = -1;
      if (!go_on) return false;
    }
    return true;
  }

  const Matcher& m_;
  const std::set<std::tuple<std::size_t, std::size_t, EdgeLabel>>& edges_;
  MatchStats* stats_;
  std::vector<std::string> vars_;
  std::map<std::string, int> index_;
  std::vector<std::vector<VarEdge>> adj_;
  std::vector<std::vector<int>> domain_;
  std::vector<int> assign_;
  std::vector<bool> used_;
  Valuation extra_;
  const std::function<bool(const Valuation&)>* visit_ = nullptr;
};

}  // namespace

void Matcher::enumerate(const QuantifiedConjunct& q, const Valuation& partial,
                        const std::function<bool(const Valuation&)>& visit, MatchStats* stats) const {
  Search(*this, q, edge_set_, stats).run(partial, visit);
}

std::optional<Valuation> Matcher::match(const QuantifiedConjunct& q, const Valuation& partial, MatchStats* stats) const {
  std::optional<Valuation> found;
  enumerate(
      q, partial,
      [&](const Valuation& v) {
        found = v;
        return false;
      },
      stats);
  return found;
}

std::optional<Valuation> match_conjunct(const Pdg& g, const QuantifiedConjunct& q, const Valuation& partial) {
  return Matcher(g).match(q, partial);
}

bool prefilter(const Pdg& g, const QuantifiedConjunct& q) { return Matcher(g).prefilter(q); }

std::vector<Valuation> pre_models(const Matcher& m, const Rule& r, std::size_t limit) {
  std::vector<Valuation> out;
  if (limit == 0 || !m.prefilter(r.pre)) return out;
  m.enumerate(r.pre, {}, [&](const Valuation& v) {
    out.push_back(v);
    return out.size() < limit;
  });
  return out;
}

std::vector<Detection> check_rule(const Matcher& m, const Rule& r, MatchStats* stats) {
  std::vector<Detection> out;
  if (!m.prefilter(r.pre)) {
    if (stats) ++stats->prefiltered;
    return out;
  }
  std::vector<bool> post_possible;
  for (const auto& q : r.post) post_possible.push_back(m.prefilter(q));
  m.enumerate(
      r.pre, {},
      [&](const Valuation& model) {
        for (std::size_t i = 0; i < r.post.size(); ++i) {
          if (!post_possible[i]) continue;
          Valuation pin;
          for (const auto& v : r.post[i].free_vars) {
            auto it = model.find(v);
            if (it != model.end()) pin.emplace(v, it->second);
          }
          if (m.match(r.post[i], pin, stats)) return true;
        }
        out.push_back(Detection{m.graph().describe(), r.name, model});
        return true;
      },
      stats);
  return out;
}

std::vector<Detection> check_rule(const Pdg& g, const Rule& r, MatchStats* stats) {
  return check_rule(Matcher(g), r, stats);
}

std::string format_detection(const Detection& d) {
  std::vector<std::string> vars;
  for (const auto& [v, id] : d.valuation) vars.push_back(v);
  std::sort(vars.begin(), vars.end(), natural_less);
  std::string out = d.origin + "\t" + d.rule;
  for (const auto& v : vars) out += "\t" + v + "=" + d.valuation.at(v);
  return out;
}

}  // namespace rulesynth
