// End-to-end acceptance checks. Prints one PASS or FAIL line per criterion
// and exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rulesynth/corpus.hpp"
#include "rulesynth/error.hpp"
#include "rulesynth/eval.hpp"
#include "rulesynth/refine.hpp"
#include "rulesynth/rule.hpp"
#include "rulesynth/synth.hpp"
#include "testkit.hpp"

using namespace rulesynth;
namespace fs = std::filesystem;

namespace {

const std::string kCli = RULESYNTH_CLI;
const fs::path kSource = RULESYNTH_SOURCE_DIR;
const fs::path kCorpus = kSource / "corpora" / "check-movetofirst";
const fs::path kRefinements = kSource / "corpora" / "check-movetofirst-refinements";

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = "'" + kCli + "' " + args + " >" + q(out) + " 2>>" + q(out.string() + ".err");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Rule latest_rule(const fs::path& session) {
  std::vector<fs::path> rules;
  for (const auto& e : fs::directory_iterator(session / "rules"))
    if (e.path().extension() == ".rule") rules.push_back(e.path());
  std::sort(rules.begin(), rules.end());
  return load_rule_file(rules.back().string());
}

Outcome check_movetofirst() {
  const fs::path dir = testkit::temp_dir("accept-c1");
  const fs::path session = dir / "session";
  const auto start = Clock::now();
  if (int rc = run_cli("synth " + q(kCorpus) + " --session " + q(session), dir / "synth.out"); rc != 0)
    return {false, "synth exited " + std::to_string(rc)};
  int step = 0;
  for (const auto& f : example_files(kRefinements)) {
    ++step;
    const int rc = run_cli("refine " + q(session) + " " + q(f), dir / ("refine" + std::to_string(step) + ".out"));
    if (rc != 0) return {false, "refine of " + f.filename().string() + " exited " + std::to_string(rc)};
  }
  const double elapsed = seconds_since(start);
  const Rule rule = latest_rule(session);
  std::multiset<std::size_t> sizes;
  for (const auto& d : rule.post) sizes.insert(d.size());
  const std::string text = render_rule(rule);
  bool tokens = true;
  for (const char* t : {"output-ignored", "isAfterLast", "getCount", "<rel_op>"})
    tokens = tokens && text.find(t) != std::string::npos;
  std::ostringstream os;
  os << "pre=" << rule.pre.size() << " post sizes={";
  for (auto it = sizes.begin(); it != sizes.end(); ++it) os << (it == sizes.begin() ? "" : ",") << *it;
  os << "} tokens=" << (tokens ? "yes" : "no") << " time=" << elapsed << "s";
  const bool ok = rule.pre.size() == 2 && rule.post.size() == 2 && sizes == std::multiset<std::size_t>{6, 8} &&
                  tokens && elapsed < 15.0;
  return {ok, os.str()};
}

Outcome synthesis_soundness() {
  testkit::Rng rng(20240601);
  int successes = 0, attempts = 0;
  std::size_t violating = 0, flagged = 0, conforming = 0, false_flags = 0;
  while (successes < 200 && attempts < 5000) {
    ++attempts;
    const SynthesisInput input = testkit::random_synthesis_input(rng, 5, 5, 15);
    Rule r;
    try {
      r = synthesize_rule(input);
    } catch (const SynthesisFailure&) {
      continue;
    }
    ++successes;
    for (const Pdg& g : input.violating) {
      ++violating;
      flagged += !check_rule(g, r).empty();
    }
    for (const Pdg& g : input.conforming) {
      ++conforming;
      false_flags += !check_rule(g, r).empty();
    }
  }
  std::ostringstream os;
  os << successes << " successful inputs in " << attempts << " attempts; violating flagged " << flagged << "/"
     << violating << ", conforming flagged " << false_flags << "/" << conforming;
  return {successes == 200 && flagged == violating && false_flags == 0, os.str()};
}

Valuation as_partial(const Vpdg& v) {
  Valuation out;
  for (const auto& [id, var] : v.valuation) out[var] = id;
  return out;
}

Outcome merge_soundness() {
  testkit::Rng rng(31337);
  int good = 0;
  const int total = 500;
  for (int t = 0; t < total; ++t) {
    auto [v1, v2] = testkit::random_vpdg_pair(rng, 8, 2);
    const Uapdg a = from_vpdg(v1, 0);
    const Uapdg b = from_vpdg(v2, 1);
    AlignmentProblem p;
    p.g1 = align_view(a);
    p.g2 = align_view(b);
    p.mode = testkit::chance(rng, 0.5) ? AlignMode::Precondition : AlignMode::Postcondition;
    p.pins = frozen_pins(a, b);
    const QuantifiedConjunct f = to_formula(project(merge(a, b, align(p)), {0, 1}));
    const bool ok1 = !testkit::oracle_models(v1.graph, f, as_partial(v1)).empty();
    const bool ok2 = !testkit::oracle_models(v2.graph, f, as_partial(v2)).empty();
    good += ok1 && ok2;
  }
  return {good == total, std::to_string(good) + "/" + std::to_string(total) + " pairs satisfy the merged formula"};
}

Outcome ilp_optimality() {
  testkit::Rng rng(777);
  testkit::GraphShape shape;
  shape.min_nodes = 3;
  shape.max_nodes = 5;
  shape.action_labels = {"a", "b"};
  shape.data_types = {"T", "U"};
  shape.edge_density = 0.5;
  const auto start = Clock::now();
  int pairs = 0, equal = 0;
  long long objective_sum = 0;
  for (int t = 0; t < 250; ++t) {
    AlignmentProblem p;
    p.g1 = align_view(testkit::random_pdg(rng, shape, "u"));
    p.g2 = align_view(testkit::random_pdg(rng, shape, "v"));
    p.mode = testkit::chance(rng, 0.3) ? AlignMode::Precondition : AlignMode::Postcondition;
    const auto expected = testkit::oracle_alignment_objective(p);
    ++pairs;
    if (!expected) continue;
    const long long got = align(p).objective;
    objective_sum += got;
    equal += got == *expected;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << equal << "/" << pairs << " objectives equal brute force (sum " << objective_sum << "), time=" << elapsed << "s";
  return {pairs >= 200 && equal == pairs && elapsed < 60.0, os.str()};
}

Outcome alignment_quality() {
  const fs::path root = kSource / "corpora" / "alignment-quality";
  std::ostringstream os;
  bool all = true;
  for (const char* group : {"await-termination", "exception-invoke", "countdownlatch-await"}) {
    std::vector<Vpdg> examples;
    for (const auto& f : example_files(root / group)) examples.push_back(Vpdg{load_example(f), {}});
    std::set<std::string> common;
    for (std::size_t s = 0; s < examples.size(); ++s) {
      std::set<std::string> labels;
      for (const Node& n : examples[s].graph.nodes())
        if (n.kind == NodeKind::Action) labels.insert(n.label);
      if (s == 0) {
        common = labels;
      } else {
        std::set<std::string> keep;
        std::set_intersection(common.begin(), common.end(), labels.begin(), labels.end(),
                              std::inserter(keep, keep.end()));
        common = keep;
      }
    }
    const Uapdg merged = merge_all(examples, SynthConfig{});
    std::set<int> everyone;
    for (std::size_t s = 0; s < examples.size(); ++s) everyone.insert(static_cast<int>(s));
    int total = 0, mapped = 0;
    for (std::size_t s = 0; s < examples.size(); ++s) {
      for (const Node& n : examples[s].graph.nodes()) {
        if (n.kind != NodeKind::Action || !common.count(n.label)) continue;
        ++total;
        for (const UNode& u : merged.nodes) {
          auto it = u.origins.find(static_cast<int>(s));
          if (it != u.origins.end() && it->second == n.id) {
            mapped += u.presence() == everyone;
            break;
          }
        }
      }
    }
    os << group << " " << mapped << "/" << total << "; ";
    all = all && total > 0 && mapped == total;
  }
  return {all, os.str()};
}

Outcome refinement_convergence() {
  RefinementSession s;
  const Corpus c = load_corpus(kCorpus);
  s.base.violating = c.violating;
  s.base.conforming = c.conforming;
  s.rule_name = "check-movetofirst";
  int steps = 0;
  bool converged = false;
  for (const auto& f : example_files(kRefinements)) {
    ++steps;
    if (refine_step(s, load_example(f, f.filename().string())).converged) {
      converged = true;
      break;
    }
  }
  const Rule& last = s.history.back();
  std::size_t detections = 0;
  for (const Pdg& fp : s.fps) detections += check_rule(fp, last).size();
  std::ostringstream os;
  os << "converged=" << (converged ? "yes" : "no") << " after " << steps << " steps, " << detections
     << " detections on " << s.fps.size() << " folded fps";
  return {converged && steps <= 9 && detections == 0, os.str()};
}

Outcome evaluator_oracle() {
  testkit::Rng rng(4242);
  testkit::GraphShape shape;
  shape.max_nodes = 8;
  shape.edge_density = 0.3;
  int mismatches = 0, nonempty = 0;
  const int total = 300;
  for (int t = 0; t < total; ++t) {
    const Pdg g = testkit::random_pdg(rng, shape);
    const Rule r = testkit::random_rule(rng, g, 4);
    std::set<Valuation> got;
    for (const auto& d : check_rule(g, r)) got.insert(d.valuation);
    const auto expected = testkit::oracle_detections(g, r);
    mismatches += got != expected;
    nonempty += !expected.empty();
  }
  std::ostringstream os;
  os << mismatches << " mismatches in " << total << " cases (" << nonempty << " with detections)";
  return {mismatches == 0, os.str()};
}

std::string synthetic_method(testkit::Rng& rng, int i, bool anchor) {
  static const std::vector<std::string> types = {"Cursor", "List", "Map", "Reader", "Socket", "Builder"};
  static const std::vector<std::string> calls = {"size", "close", "add", "read", "get", "flush",
                                                 "append", "clear", "open", "next", "isEmpty", "put"};
  std::ostringstream os;
  const std::string type = testkit::pick(rng, types);
  os << "void m" << i << "(" << type << " a, Logger log, int k) {\n";
  if (anchor) os << "  a.moveToFirst();\n";
  const int statements = testkit::uniform(rng, 1, 6);
  for (int s = 0; s < statements; ++s) {
    const std::string call = testkit::pick(rng, calls);
    switch (testkit::uniform(rng, 0, 3)) {
      case 0:
        os << "  a." << call << "();\n";
        break;
      case 1:
        os << "  if (k > " << s << ") {\n    log.info(a." << call << "());\n  }\n";
        break;
      case 2:
        os << "  while (!a.isEmpty()) {\n    a." << call << "(k);\n  }\n";
        break;
      default:
        os << "  log.debug(\"step\", a." << call << "(" << s << "));\n";
        break;
    }
  }
  os << "}\n";
  return os.str();
}

Outcome prefilter_rate() {
  const Rule rule = load_rule_file((kSource / "tests" / "data" / "check-movetofirst.rule").string());
  testkit::Rng rng(8);
  const int total = 500;
  std::vector<bool> anchor(total, false);
  for (int i = 0; i < total; i += 20) anchor[static_cast<std::size_t>(i)] = true;
  MatchStats stats;
  int discharged = 0, detections = 0;
  for (int i = 0; i < total; ++i) {
    const Pdg g = testkit::method(synthetic_method(rng, i, anchor[static_cast<std::size_t>(i)]),
                                  "gen" + std::to_string(i) + ".mj");
    const std::uint64_t before = stats.prefiltered;
    detections += !check_rule(g, rule, &stats).empty();
    discharged += stats.prefiltered > before;
  }
  const double rate = static_cast<double>(discharged) / total;
  std::ostringstream os;
  os << discharged << "/" << total << " methods discharged by prefilter (" << rate * 100 << "%), " << detections
     << " detections";
  return {rate >= 0.95, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 check-movetofirst", check_movetofirst},
      {"2 synthesis soundness", synthesis_soundness},
      {"3 merge soundness", merge_soundness},
      {"4 ILP optimality", ilp_optimality},
      {"5 alignment quality", alignment_quality},
      {"6 refinement convergence", refinement_convergence},
      {"7 evaluator oracle", evaluator_oracle},
      {"8 prefilter", prefilter_rate},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
