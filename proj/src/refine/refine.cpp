#include "rulesynth/refine.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "json_util.hpp"
#include "rulesynth/corpus.hpp"
#include "rulesynth/error.hpp"
#include "rulesynth/eval.hpp"
#include "rulesynth/pdg_io.hpp"

namespace rulesynth {

namespace fs = std::filesystem;

namespace {

std::string predicate_text(const NodePredicates& p) {
  QuantifiedConjunct single;
  single.free_vars.push_back("v");
  single.nodes.emplace("v", p);
  return std::string(to_string(p.kind)) + ":" + render_atoms(single);
}

std::string serialize(const QuantifiedConjunct& q) {
  std::string s = "free";
  for (const auto& v : q.free_vars) s += " " + v;
  s += ";bound";
  for (const auto& v : q.bound_vars) s += " " + v;
  s += ";";
  for (const auto& [v, p] : q.nodes) s += v + "=" + predicate_text(p) + ";";
  for (const auto& e : q.edges) s += e.src + "-" + to_string(e.label) + "->" + e.dst + ";";
  return s;
}

// Canonical labeling by colour refinement with individualization: every
// tie is broken both ways and the smallest serialization wins.
class Canonizer {
 public:
  Canonizer(const QuantifiedConjunct& q, const std::set<std::string>& movable, std::string prefix, int start)
      : q_(q), movable_(movable), prefix_(std::move(prefix)), start_(start) {
    for (const auto& [v, p] : q.nodes) {
      index_.emplace(v, vars_.size());
      vars_.push_back(v);
    }
    adj_.resize(vars_.size());
    for (const auto& e : q.edges) {
      const int lab = static_cast<int>(e.label.kind) * 1000 + e.label.para_index;
      const std::size_t a = index_.at(e.src);
      const std::size_t b = index_.at(e.dst);
      adj_[a].push_back({0, lab, b});
      adj_[b].push_back({1, lab, a});
    }
  }

  std::map<std::string, std::string> run() {
    std::vector<std::string> initial;
    for (const auto& v : vars_)
      initial.push_back((movable_.count(v) ? std::string("M") : "F" + v) + "|" + predicate_text(q_.nodes.at(v)));
    std::vector<std::string> sorted = initial;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> colors;
    for (const auto& s : initial)
      colors.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), s) - sorted.begin()));
    search(colors);
    return best_names_;
  }

 private:
  struct Adj {
    int dir;
    int label;
    std::size_t other;
  };

  void refine(std::vector<int>& colors) const {
    std::size_t classes = std::set<int>(colors.begin(), colors.end()).size();
    for (;;) {
      using Sig = std::pair<int, std::vector<std::tuple<int, int, int>>>;
      std::vector<Sig> sigs(vars_.size());
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        sigs[v].first = colors[v];
        for (const auto& a : adj_[v]) sigs[v].second.emplace_back(a.dir, a.label, colors[a.other]);
        std::sort(sigs[v].second.begin(), sigs[v].second.end());
      }
      std::vector<Sig> order = sigs;
      std::sort(order.begin(), order.end());
      order.erase(std::unique(order.begin(), order.end()), order.end());
      for (std::size_t v = 0; v < vars_.size(); ++v)
        colors[v] = static_cast<int>(std::lower_bound(order.begin(), order.end(), sigs[v]) - order.begin());
      if (order.size() == classes) return;
      classes = order.size();
    }
  }

  void search(std::vector<int> colors) {
    if (leaves_ >= kMaxLeaves) return;
    refine(colors);
    std::map<int, std::vector<std::size_t>> cls;
    for (std::size_t v = 0; v < vars_.size(); ++v)
      if (movable_.count(vars_[v])) cls[colors[v]].push_back(v);
    for (const auto& [c, members] : cls) {
      if (members.size() < 2) continue;
      for (std::size_t v : members) {
        std::vector<int> next(colors.size());
        for (std::size_t u = 0; u < colors.size(); ++u) next[u] = 2 * colors[u] + 1;
        next[v] = 2 * colors[v];
        search(std::move(next));
      }
      return;
    }
    ++leaves_;
    std::vector<std::size_t> order;
    for (std::size_t v = 0; v < vars_.size(); ++v)
      if (movable_.count(vars_[v])) order.push_back(v);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return colors[a] < colors[b]; });
    std::map<std::string, std::string> names;
    for (std::size_t k = 0; k < order.size(); ++k)
      names[vars_[order[k]]] = prefix_ + std::to_string(start_ + static_cast<int>(k));
    std::string text = serialize(rename_vars(q_, names));
    if (!found_ || text < best_text_) {
      found_ = true;
      best_text_ = std::move(text);
      best_names_ = std::move(names);
    }
  }

  static constexpr std::size_t kMaxLeaves = 20000;

  const QuantifiedConjunct& q_;
  std::set<std::string> movable_;
  std::string prefix_;
  int start_;
  std::vector<std::string> vars_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<Adj>> adj_;
  std::size_t leaves_ = 0;
  bool found_ = false;
  std::string best_text_;
  std::map<std::string, std::string> best_names_;
};

Pdg untagged(const Pdg& g) {
  std::vector<Node> nodes = g.nodes();
  for (auto& n : nodes) n.change_tag = ChangeTag::None;
  return Pdg(std::move(nodes), g.edges(), g.origin());
}

std::string numbered(std::size_t i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03zu%s", i, ext);
  return buf;
}

std::vector<fs::path> files_with(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Rule canonicalize(const Rule& r) {
  check_rule_valid(r);
  const std::set<std::string> pre_vars(r.pre.free_vars.begin(), r.pre.free_vars.end());
  const auto pre_names = Canonizer(r.pre, pre_vars, "x", 0).run();
  Rule out;
  out.name = r.name;
  out.provenance = r.provenance;
  out.pre = rename_vars(r.pre, pre_names);
  std::vector<std::pair<std::string, QuantifiedConjunct>> posts;
  for (const auto& q : r.post) {
    QuantifiedConjunct p = rename_vars(q, pre_names);
    const std::set<std::string> bound(p.bound_vars.begin(), p.bound_vars.end());
    p = rename_vars(p, Canonizer(p, bound, "y", 1).run());
    posts.emplace_back(serialize(p), std::move(p));
  }
  std::sort(posts.begin(), posts.end(), [](const auto& a, const auto& b) {
    if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
    return a.first < b.first;
  });
  for (std::size_t i = 0; i < posts.size(); ++i)
    if (i == 0 || posts[i].first != posts[i - 1].first) out.post.push_back(std::move(posts[i].second));
  return out;
}

std::string canonical_rule(const Rule& r) {
  Rule c = canonicalize(r);
  c.name = "canonical";
  c.provenance = {};
  return write_rule_body(c);
}

void ensure_base_rule(RefinementSession& s, SynthReport* report) {
  if (!s.history.empty()) return;
  SynthesisInput input = s.base;
  for (const auto& fp : s.fps) input.conforming.push_back(untagged(fp));
  s.history.push_back(synthesize_rule(input, s.rule_name, report));
}

RefineResult refine_step(RefinementSession& s, const Pdg& fp, SynthReport* report) {
  ensure_base_rule(s, report);
  const Matcher m(fp);
  const bool flagged =
      std::any_of(s.history.begin(), s.history.end(), [&](const Rule& r) { return !check_rule(m, r).empty(); });
  if (!flagged) throw SchemaError("not a detection: " + fp.describe() + " is not flagged by any rule version");

  SynthesisInput input = s.base;
  std::vector<std::string> folded;
  for (const auto& g : s.fps) {
    input.conforming.push_back(untagged(g));
    folded.push_back(g.describe());
  }
  input.conforming.push_back(untagged(fp));
  folded.push_back(fp.describe());

  Rule rule = synthesize_rule(input, s.rule_name, report);
  rule.provenance.refinements = folded;
  RefineResult result{rule, canonical_rule(rule) == canonical_rule(s.history.back())};
  s.fps.push_back(fp);
  s.history.push_back(std::move(rule));
  return result;
}

RefinementSession open_session(const fs::path& dir, const SynthConfig* override_config) {
  if (!fs::is_directory(dir / "base")) throw SchemaError(dir.string() + ": not a session (missing base/)");
  RefinementSession s;
  if (override_config) {
    s.base.config = *override_config;
  } else if (fs::is_regular_file(dir / "config.json")) {
    s.base.config = load_config_file(dir / "config.json");
  }
  Corpus c = load_corpus(dir / "base", s.base.config.align);
  s.base.violating = std::move(c.violating);
  s.base.conforming = std::move(c.conforming);
  for (const auto& f : files_with(dir / "fps", ".pdg")) s.fps.push_back(load_pdg_file(f));
  for (const auto& f : files_with(dir / "rules", ".rule")) s.history.push_back(load_rule_file(f.string()));
  if (!s.history.empty() && s.history.size() != s.fps.size() + 1)
    throw SchemaError(dir.string() + ": " + std::to_string(s.fps.size()) + " fps but " +
                      std::to_string(s.history.size()) + " rule versions");
  s.rule_name = s.history.empty() ? fs::absolute(dir).lexically_normal().filename().string() : s.history.front().name;
  if (s.rule_name.empty()) s.rule_name = "rule";
  return s;
}

void init_session(const fs::path& dir, const fs::path& corpus, const SynthConfig& config) {
  if (fs::exists(dir / "base")) throw SchemaError(dir.string() + ": session already exists");
  if (!fs::is_directory(corpus)) throw SchemaError(corpus.string() + ": corpus directory not found");
  fs::create_directories(dir);
  fs::copy(corpus, dir / "base", fs::copy_options::recursive);
  detail::write_file(dir / "config.json", write_config(config));
}

void save_session(const fs::path& dir, const RefinementSession& s, const std::string& log_line) {
  fs::create_directories(dir / "fps");
  fs::create_directories(dir / "rules");
  for (std::size_t i = 0; i < s.fps.size(); ++i) {
    const fs::path p = dir / "fps" / numbered(i + 1, ".pdg");
    if (!fs::exists(p)) save_pdg_file(s.fps[i], p);
  }
  for (std::size_t i = 0; i < s.history.size(); ++i) {
    const fs::path p = dir / "rules" / numbered(i, ".rule");
    if (!fs::exists(p)) save_rule_file(s.history[i], p.string());
  }
  if (!log_line.empty()) {
    std::ofstream log(dir / "log.txt", std::ios::app);
    log << log_line << "\n";
  }
}

}  // namespace rulesynth
