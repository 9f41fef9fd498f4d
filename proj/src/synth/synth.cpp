#include "rulesynth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "rulesynth/error.hpp"
#include "rulesynth/eval.hpp"

namespace rulesynth {

void check_config(const SynthConfig& c) {
  if (!(c.delta >= 0) || !std::isfinite(c.delta)) throw SchemaError("delta must be a finite nonnegative number");
  if (c.max_partitions == 0) throw SchemaError("max-partitions must be positive");
  if (c.radius < 1) throw SchemaError("radius must be positive");
  if (c.max_models_per_example == 0) throw SchemaError("max-models must be positive");
}

std::string SynthReport::text() const {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

bool is_change_tagged(const Pdg& g) {
  if (g.empty()) return false;
  return std::all_of(g.nodes().begin(), g.nodes().end(), [](const Node& n) { return n.change_tag != ChangeTag::None; });
}

namespace {

void note(SynthReport* r, const std::string& line) {
  if (r) r->add(line);
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << x;
  return s.str();
}

std::string describe_node(const UNode& n) {
  std::string s = n.var;
  if (n.pred.label.is_exact()) s += " " + n.pred.label.value();
  return s;
}

std::string group_text(const std::vector<std::size_t>& g) {
  std::string s = "{";
  for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + std::to_string(g[i]);
  return s + "}";
}

// Keeps the marked nodes and the edges between them.
Uapdg restrict_nodes(const Uapdg& a, const std::vector<bool>& keep) {
  Uapdg out;
  std::vector<std::size_t> remap(a.nodes.size(), SIZE_MAX);
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = out.nodes.size();
    out.nodes.push_back(a.nodes[i]);
  }
  for (const auto& e : a.edges)
    if (remap[e.src] != SIZE_MAX && remap[e.dst] != SIZE_MAX)
      out.edges.push_back(UEdge{remap[e.src], remap[e.dst], e.label, e.presence});
  return out;
}

// Nodes within `radius` undirected hops of a frozen node.
std::vector<bool> frozen_neighborhood(const Uapdg& a, int radius) {
  std::vector<std::vector<std::size_t>> adj(a.nodes.size());
  for (const auto& e : a.edges) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::vector<int> dist(a.nodes.size(), -1);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    if (a.nodes[i].frozen) {
      dist[i] = 0;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (dist[u] == radius) continue;
    for (std::size_t v : adj[u]) {
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  std::vector<bool> keep(a.nodes.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = dist[i] >= 0;
  return keep;
}

std::set<int> all_sources(std::size_t n) {
  std::set<int> s;
  for (std::size_t i = 0; i < n; ++i) s.insert(static_cast<int>(i));
  return s;
}

double binary_entropy(double p) {
  double h = 0;
  if (p > 0) h -= p * std::log(p);
  if (p < 1) h -= (1 - p) * std::log(1 - p);
  return h;
}

}  // namespace

Uapdg merge_all(const std::vector<Vpdg>& examples, const SynthConfig& config, SynthReport* report) {
  if (examples.empty()) throw SchemaError("no examples to merge");
  const std::set<std::string> free = valuation_vars(examples.front());
  bool tagged = free.empty();
  for (const auto& e : examples) {
    if (valuation_vars(e) != free) throw UapdgError("examples disagree on their free variables: " + e.graph.describe());
    tagged = tagged && is_change_tagged(e.graph);
  }
  const AlignMode mode = tagged ? AlignMode::Precondition : AlignMode::Postcondition;
  Uapdg acc = from_vpdg(examples.front(), 0);
  for (std::size_t i = 1; i < examples.size(); ++i) {
    const Uapdg next = from_vpdg(examples[i], static_cast<int>(i));
    AlignmentProblem p{align_view(acc), align_view(next), mode, frozen_pins(acc, next)};
    const Alignment al = align(p, config.align);
    note(report, "  align +" + examples[i].graph.describe() + ": " + std::to_string(al.node_map.size()) +
                     " node pairs, " + std::to_string(al.edge_map.size()) + " edge pairs, objective " +
                     std::to_string(al.objective));
    acc = merge(acc, next, al);
  }
  return acc;
}

Subrule get_conjunctive_subrule(const std::vector<Vpdg>& examples, const SynthConfig& config, SynthReport* report) {
  Subrule out;
  out.merged = merge_all(examples, config, report);
  out.common = project(out.merged, all_sources(examples.size()));
  if (examples.size() == 1 && !out.common.free_vars().empty())
    out.common = restrict_nodes(out.common, frozen_neighborhood(out.common, config.radius));
  note(report, "  merged " + std::to_string(out.merged.nodes.size()) + " nodes, common " +
                   std::to_string(out.common.nodes.size()) + " nodes over " + std::to_string(examples.size()) +
                   " example(s)");
  out.formula = to_formula(out.common);
  for (std::size_t i = 0; i < examples.size(); ++i)
    out.examples.push_back(revaluate(out.common, static_cast<int>(i), examples[i].graph));
  return out;
}

double group_entropy(const Uapdg& merged, const std::vector<int>& group) {
  if (group.empty()) return 0;
  double h = 0;
  for (const auto& n : merged.nodes) {
    std::size_t present = 0;
    for (int s : group) present += n.origins.count(s);
    h += binary_entropy(static_cast<double>(present) / static_cast<double>(group.size()));
  }
  return h;
}

double compute_entropy(const Uapdg& merged, std::size_t num_examples, std::size_t split_node) {
  const UNode& n = merged.nodes.at(split_node);
  std::vector<int> with, without;
  for (std::size_t s = 0; s < num_examples; ++s)
    (n.origins.count(static_cast<int>(s)) ? with : without).push_back(static_cast<int>(s));
  const double total = static_cast<double>(num_examples);
  return static_cast<double>(with.size()) / total * group_entropy(merged, with) +
         static_cast<double>(without.size()) / total * group_entropy(merged, without);
}

std::vector<CandidateSplit> generate_candidate_partitions(const std::vector<Vpdg>& examples,
                                                          const SynthConfig& config, SynthReport* report) {
  const Uapdg merged = merge_all(examples, config, report);
  const std::set<int> sources = all_sources(examples.size());
  auto in_core = [&](const UNode& n) {
    const auto p = n.presence();
    return std::includes(p.begin(), p.end(), sources.begin(), sources.end());
  };
  std::vector<bool> core(merged.nodes.size());
  for (std::size_t i = 0; i < merged.nodes.size(); ++i) core[i] = in_core(merged.nodes[i]);
  std::set<std::size_t> candidates;
  for (const auto& e : merged.edges) {
    for (auto [a, b] : {std::pair{e.src, e.dst}, std::pair{e.dst, e.src}}) {
      if (core[a] && !core[b] && merged.nodes[b].pred.kind == NodeKind::Action) candidates.insert(b);
    }
  }
  std::vector<CandidateSplit> all;
  for (std::size_t c : candidates) {
    CandidateSplit s;
    s.node = c;
    s.label = describe_node(merged.nodes[c]);
    s.entropy = compute_entropy(merged, examples.size(), c);
    for (std::size_t i = 0; i < examples.size(); ++i)
      (merged.nodes[c].origins.count(static_cast<int>(i)) ? s.with : s.without).push_back(i);
    all.push_back(std::move(s));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const CandidateSplit& a, const CandidateSplit& b) { return a.entropy < b.entropy; });
  if (report) {
    report->add("  entropy table (" + std::to_string(all.size()) + " candidates):");
    for (const auto& s : all)
      report->add("    " + fmt(s.entropy) + "  " + s.label + "  " + group_text(s.with) + " | " + group_text(s.without));
  }
  if (all.empty()) return all;
  const double best = all.front().entropy;
  std::vector<CandidateSplit> out;
  std::set<std::vector<std::size_t>> seen;
  for (auto& s : all) {
    if (!(s.entropy < best + config.delta || s.entropy == best)) continue;
    if (!seen.insert(s.with).second) continue;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<QuantifiedConjunct> synthesize_pc(const std::vector<Vpdg>& violating, const std::vector<Vpdg>& conforming,
                                              const SynthConfig& config, SynthReport* report) {
  if (conforming.empty()) {
    note(report, "postcondition: no conforming example satisfies the precondition, post = False");
    return {};
  }
  using Group = std::vector<std::size_t>;
  using Partition = std::vector<Group>;

  std::vector<Matcher> matchers;
  std::vector<Valuation> pins;
  for (const auto& v : violating) {
    matchers.emplace_back(v.graph);
    Valuation pin;
    for (const auto& [id, var] : v.valuation) pin[var] = id;
    pins.push_back(std::move(pin));
  }
  auto restricted = [](const Valuation& pin, const QuantifiedConjunct& q) {
    Valuation out;
    for (const auto& v : q.free_vars)
      if (auto it = pin.find(v); it != pin.end()) out.emplace(v, it->second);
    return out;
  };

  std::map<Group, QuantifiedConjunct> cache;
  auto conjunct_for = [&](const Group& g) -> const QuantifiedConjunct& {
    auto it = cache.find(g);
    if (it != cache.end()) return it->second;
    std::vector<Vpdg> members;
    for (std::size_t i : g) members.push_back(conforming[i]);
    note(report, "group " + group_text(g) + ":");
    QuantifiedConjunct q = get_conjunctive_subrule(members, config, report).formula;
    return cache.emplace(g, std::move(q)).first->second;
  };

  Group everyone(conforming.size());
  for (std::size_t i = 0; i < everyone.size(); ++i) everyone[i] = i;
  std::deque<Partition> queue{Partition{everyone}};
  std::set<Partition> seen;
  seen.insert(queue.front());
  std::size_t explored = 0;
  std::string culprit;

  while (!queue.empty()) {
    if (explored == config.max_partitions)
      throw SynthesisFailure("partition budget of " + std::to_string(config.max_partitions) + " exhausted", culprit);
    const Partition partition = queue.front();
    queue.pop_front();
    ++explored;
    std::string shape;
    for (const auto& g : partition) shape += group_text(g);
    note(report, "partition " + std::to_string(explored) + ": " + shape);

    std::vector<QuantifiedConjunct> post;
    for (const auto& g : partition) post.push_back(conjunct_for(g));

    std::optional<std::size_t> bad;
    std::size_t bad_example = 0;
    for (std::size_t i = 0; i < post.size() && !bad; ++i) {
      for (std::size_t v = 0; v < violating.size(); ++v) {
        if (matchers[v].match(post[i], restricted(pins[v], post[i]))) {
          bad = i;
          bad_example = v;
          break;
        }
      }
    }
    if (!bad) {
      std::vector<QuantifiedConjunct> unique;
      for (auto& q : post)
        if (std::find(unique.begin(), unique.end(), q) == unique.end()) unique.push_back(std::move(q));
      note(report, "accepted partition " + std::to_string(explored) + " with " + std::to_string(unique.size()) +
                       " disjunct(s)");
      return unique;
    }
    const Group& group = partition[*bad];
    culprit = violating[bad_example].graph.describe();
    note(report, "  disjunct " + std::to_string(*bad + 1) + " holds on violating " + culprit);
    if (group.size() == 1) {
      culprit += " vs " + conforming[group.front()].graph.describe();
      note(report, "  dead end: group " + group_text(group) + " is a single example");
      continue;
    }
    std::vector<Vpdg> members;
    for (std::size_t i : group) members.push_back(conforming[i]);
    note(report, "  splitting group " + group_text(group));
    const auto splits = generate_candidate_partitions(members, config, report);
    if (splits.empty()) note(report, "  dead end: no candidate split");
    for (const auto& s : splits) {
      Partition next;
      for (std::size_t k = 0; k < partition.size(); ++k) {
        if (k != *bad) {
          next.push_back(partition[k]);
          continue;
        }
        Group with, without;
        for (std::size_t i : s.with) with.push_back(group[i]);
        for (std::size_t i : s.without) without.push_back(group[i]);
        next.push_back(std::move(with));
        next.push_back(std::move(without));
      }
      Partition key = next;
      std::sort(key.begin(), key.end());
      if (!seen.insert(key).second) continue;
      note(report, "  enqueue split on " + s.label + " (H = " + fmt(s.entropy) + ")");
      queue.push_back(std::move(next));
    }
  }
  throw SynthesisFailure("no partition of the conforming examples rejects every violating example", culprit);
}

Rule synthesize_rule(const SynthesisInput& input, const std::string& name, SynthReport* report) {
  check_config(input.config);
  if (input.violating.empty()) throw SchemaError("synthesis needs at least one violating example");
  const SynthConfig& config = input.config;

  note(report, "precondition from " + std::to_string(input.violating.size()) + " violating example(s):");
  std::vector<Vpdg> unvaluated;
  for (const auto& g : input.violating) unvaluated.push_back(Vpdg{g, {}});
  Subrule pre_sub = get_conjunctive_subrule(unvaluated, config, report);
  Uapdg core = pre_sub.common;
  if (core.nodes.empty()) throw SynthesisFailure("the violating examples share no common structure");
  for (std::size_t i = 0; i < core.nodes.size(); ++i) {
    core.nodes[i].frozen = true;
    core.nodes[i].var = "x" + std::to_string(i);
  }

  Rule rule;
  rule.name = name;
  rule.pre = to_formula(core);
  note(report, "precondition: " + render_atoms(rule.pre));

  std::vector<Vpdg> violating;
  for (std::size_t i = 0; i < input.violating.size(); ++i)
    violating.push_back(revaluate(core, static_cast<int>(i), input.violating[i]));

  Rule pre_only = rule;
  std::vector<Vpdg> conforming;
  for (const auto& c : input.conforming) {
    const auto models = pre_models(Matcher(c), pre_only, config.max_models_per_example);
    note(report, "conforming " + c.describe() + ": " + std::to_string(models.size()) + " precondition model(s)");
    for (const auto& m : models) {
      Vpdg v{c, {}};
      for (const auto& [var, id] : m) v.valuation[id] = var;
      conforming.push_back(std::move(v));
    }
  }

  rule.post = synthesize_pc(violating, conforming, config, report);
  for (auto& q : rule.post) {
    std::map<std::string, std::string> names;
    for (std::size_t i = 0; i < q.bound_vars.size(); ++i) names[q.bound_vars[i]] = "y" + std::to_string(i + 1);
    q = rename_vars(q, names);
  }

  for (const auto& g : input.violating) {
    rule.provenance.violating.push_back(g.describe());
    if (check_rule(g, rule).empty())
      throw SynthesisFailure("synthesized rule misses a violating example", g.describe());
  }
  for (const auto& g : input.conforming) {
    rule.provenance.conforming.push_back(g.describe());
    if (!check_rule(g, rule).empty())
      throw SynthesisFailure("synthesized rule flags a conforming example", g.describe());
  }
  rule.provenance.settings["delta"] = fmt(config.delta);
  rule.provenance.settings["maxPartitions"] = std::to_string(config.max_partitions);
  rule.provenance.settings["radius"] = std::to_string(config.radius);
  rule.provenance.settings["maxModels"] = std::to_string(config.max_models_per_example);
  note(report, "rule: " + std::to_string(rule.pre.size()) + "-node precondition, " + std::to_string(rule.post.size()) +
                   " postcondition disjunct(s)");
  return rule;
}

}  // namespace rulesynth
