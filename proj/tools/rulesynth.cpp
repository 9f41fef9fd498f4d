// rulesynth command-line tool.
//
// Exit codes: 0 success (no detections for check), 1 detections found,
// 2 synthesis failure, 3 input, schema or usage error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "rulesynth/corpus.hpp"
#include "rulesynth/error.hpp"
#include "rulesynth/eval.hpp"
#include "rulesynth/frontend.hpp"
#include "rulesynth/pdg_io.hpp"
#include "rulesynth/refine.hpp"
#include "rulesynth/rule.hpp"
#include "rulesynth/synth.hpp"
#include "rulesynth/uapdg.hpp"

namespace fs = std::filesystem;
using namespace rulesynth;

namespace {

constexpr int kOk = 0;
constexpr int kDetections = 1;
constexpr int kSynthesisFailed = 2;
constexpr int kInputError = 3;

struct ConfigFlags {
  std::string config_file;
  std::optional<double> delta;
  std::optional<std::size_t> max_partitions;
  std::optional<int> radius;
  std::optional<std::size_t> max_models;
  std::optional<std::uint64_t> solver_cap;
  std::string dump_ilp;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON settings file; flags override it")->check(CLI::ExistingFile);
    cmd->add_option("--delta", delta, "entropy margin for candidate partitions (nats)");
    cmd->add_option("--max-partitions", max_partitions, "partitions explored before giving up");
    cmd->add_option("--radius", radius, "neighborhood kept for single-example subrules");
    cmd->add_option("--max-models", max_models, "precondition models used per conforming example");
    cmd->add_option("--solver-cap", solver_cap, "search-node budget of each alignment solve");
    cmd->add_option("--dump-ilp", dump_ilp, "write every alignment program to this directory as LP text");
  }

  bool any() const {
    return !config_file.empty() || delta || max_partitions || radius || max_models || solver_cap || !dump_ilp.empty();
  }

  SynthConfig resolve(SynthConfig base = {}) const {
    SynthConfig c = config_file.empty() ? base : load_config_file(config_file, base);
    if (delta) c.delta = *delta;
    if (max_partitions) c.max_partitions = *max_partitions;
    if (radius) c.radius = *radius;
    if (max_models) c.max_models_per_example = *max_models;
    if (solver_cap) c.align.max_search_nodes = *solver_cap;
    check_config(c);
    if (!dump_ilp.empty()) {
      fs::create_directories(dump_ilp);
      auto counter = std::make_shared<int>(0);
      const fs::path dir = dump_ilp;
      c.align.on_instance = [dir, counter](const IlpInstance& inst) {
        char name[32];
        std::snprintf(name, sizeof name, "%04d.lp", ++*counter);
        std::ofstream(dir / name) << to_lp_text(inst);
      };
    }
    return c;
  }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw SchemaError(p.string() + ": cannot write");
  out << text;
}

fs::path report_path(const fs::path& rule) { return fs::path(rule.string() + ".report"); }

int cmd_synth(const std::string& corpus, const std::string& out, const std::string& name, const std::string& session,
              const ConfigFlags& flags) {
  const SynthConfig config = flags.resolve();
  const Corpus c = load_corpus(corpus, config.align);
  SynthReport report;
  std::string rule_name = name.empty() ? fs::absolute(corpus).lexically_normal().filename().string() : name;
  if (rule_name.empty()) rule_name = "rule";
  Rule rule;
  try {
    rule = synthesize_rule(SynthesisInput{c.violating, c.conforming, config}, rule_name, &report);
  } catch (const SynthesisFailure& e) {
    if (!out.empty()) write_text(report_path(out), report.text() + "FAILED: " + e.what() + "\n");
    throw;
  }
  if (!out.empty()) {
    save_rule_file(rule, out);
    write_text(report_path(out), report.text());
  } else {
    std::cout << write_rule(rule);
  }
  if (!session.empty()) {
    init_session(session, corpus, config);
    RefinementSession s;
    s.history.push_back(rule);
    save_session(session, s, "base: rules/000.rule synthesized from " + corpus);
  }
  std::cerr << "rule " << rule.name << ": " << rule.pre.size() << "-node precondition, " << rule.post.size()
            << " postcondition disjunct(s)\n";
  return kOk;
}

std::vector<fs::path> collect_inputs(const std::vector<std::string>& paths) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && (e.path().extension() == ".mj" || e.path().extension() == ".pdg"))
          found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      files.emplace_back(p);
    } else {
      throw SchemaError(p + ": no such file or directory");
    }
  }
  return files;
}

int cmd_check(const std::string& rule_file, const std::vector<std::string>& paths, std::size_t jobs) {
  const Rule rule = load_rule_file(rule_file);
  const auto files = collect_inputs(paths);
  // Graphs are loaded up front so that input errors surface before any output.
  std::vector<Pdg> graphs;
  for (const auto& f : files) graphs.push_back(load_example(f, f.generic_string()));

  std::vector<std::vector<Detection>> results(graphs.size());
  std::vector<MatchStats> stats(graphs.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(1, graphs.size()));
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < graphs.size(); i += jobs) results[i] = check_rule(graphs[i], rule, &stats[i]);
    });
  }
  for (auto& t : workers) t.join();

  std::size_t detections = 0, prefiltered = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    for (const auto& d : results[i]) std::cout << format_detection(d) << "\n";
    detections += results[i].size();
    prefiltered += stats[i].prefiltered;
  }
  std::cerr << graphs.size() << " file(s), " << detections << " detection(s), " << prefiltered
            << " prefiltered\n";
  return detections ? kDetections : kOk;
}

int cmd_refine(const std::string& session_dir, const std::string& fp_file, const ConfigFlags& flags) {
  std::optional<SynthConfig> config;
  if (flags.any()) {
    SynthConfig base;
    if (fs::is_regular_file(fs::path(session_dir) / "config.json"))
      base = load_config_file(fs::path(session_dir) / "config.json");
    config = flags.resolve(base);
  }
  RefinementSession s = open_session(session_dir, config ? &*config : nullptr);
  const Pdg fp = load_example(fp_file, fs::path(fp_file).filename().string());
  SynthReport report;
  if (s.history.empty()) {
    ensure_base_rule(s, &report);
    save_session(session_dir, s, "base: rules/000.rule");
  }
  RefineResult r;
  try {
    r = refine_step(s, fp, &report);
  } catch (const SynthesisFailure& e) {
    std::ofstream(fs::path(session_dir) / "log.txt", std::ios::app)
        << "step " << s.fps.size() + 1 << ": " << fp.describe() << " FAILED: " << e.what() << "\n";
    throw;
  }
  const std::size_t step = s.fps.size();
  char rule_name[32];
  std::snprintf(rule_name, sizeof rule_name, "rules/%03zu.rule", step);
  const std::string line = "step " + std::to_string(step) + ": folded " + fp.describe() + " -> " + rule_name + " (" +
                           std::to_string(r.rule.pre.size()) + "-node precondition, " +
                           std::to_string(r.rule.post.size()) + " disjunct(s)) converged=" +
                           (r.converged ? "true" : "false");
  save_session(session_dir, s, line);
  write_text(fs::path(session_dir) / (std::string(rule_name) + ".report"), report.text());
  std::cout << line << "\n";
  return kOk;
}

Uapdg conjunct_graph(const QuantifiedConjunct& q) {
  Uapdg a;
  std::map<std::string, std::size_t> index;
  for (const auto* vars : {&q.free_vars, &q.bound_vars}) {
    for (const auto& v : *vars) {
      UNode n;
      n.pred = q.nodes.at(v);
      n.var = v;
      n.frozen = vars == &q.free_vars;
      n.origins[0] = v;
      index[v] = a.nodes.size();
      a.nodes.push_back(std::move(n));
    }
  }
  for (const auto& e : q.edges) a.edges.push_back(UEdge{index.at(e.src), index.at(e.dst), e.label, {0}});
  return a;
}

int cmd_explain(const std::string& rule_file, bool with_report) {
  const Rule rule = load_rule_file(rule_file);
  std::cout << render_rule(rule) << "\ngraph description:\n" << render_dot(conjunct_graph(rule.pre), "pre");
  for (std::size_t i = 0; i < rule.post.size(); ++i)
    std::cout << render_dot(conjunct_graph(rule.post[i]), "post_" + std::to_string(i + 1));
  const auto& p = rule.provenance;
  if (!p.violating.empty() || !p.conforming.empty()) {
    std::cout << "\nprovenance: " << p.violating.size() << " violating, " << p.conforming.size() << " conforming, "
              << p.refinements.size() << " refinement example(s)\n";
    for (const auto& [k, v] : p.settings) std::cout << "  " << k << " = " << v << "\n";
  }
  const fs::path report = report_path(rule_file);
  if (with_report && fs::is_regular_file(report)) {
    std::ifstream in(report);
    std::cout << "\nsynthesis report:\n" << in.rdbuf();
  }
  return kOk;
}

int cmd_pdg(const std::string& file, bool raw) {
  const fs::path p(file);
  Pdg g;
  if (raw && p.extension() == ".mj") {
    std::ifstream in(p);
    if (!in) throw SchemaError(file + ": cannot read");
    std::stringstream text;
    text << in.rdbuf();
    g = build_raw_pdg(MethodSource{p.filename().string(), text.str()});
  } else {
    g = load_example(p, p.filename().string());
  }
  std::cout << write_pdg(g);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesizes static-analysis rules over program dependence graphs from code examples."};
  app.require_subcommand(1);

  ConfigFlags synth_flags, refine_flags;
  std::string corpus, out, name, session;
  auto* synth = app.add_subcommand("synth", "synthesize a rule from a corpus");
  synth->add_option("corpus", corpus, "corpus directory")->required();
  synth->add_option("-o,--output", out, "rule file to write (stdout when omitted)");
  synth->add_option("--name", name, "rule name (default: corpus directory name)");
  synth->add_option("--session", session, "also start a refinement session in this directory");
  synth_flags.attach(synth);

  std::string rule_file;
  std::vector<std::string> paths;
  std::size_t jobs = 0;
  auto* check = app.add_subcommand("check", "report detections of a rule");
  check->add_option("rule", rule_file, "rule file")->required();
  check->add_option("paths", paths, ".mj/.pdg files or directories")->required();
  check->add_option("-j,--jobs", jobs, "worker threads (default: all cores)");

  std::string session_dir, fp_file;
  auto* refine = app.add_subcommand("refine", "fold a false positive into a refinement session");
  refine->add_option("session", session_dir, "session directory")->required();
  refine->add_option("fp", fp_file, "false-positive example (.mj or .pdg)")->required();
  refine_flags.attach(refine);

  std::string explain_file;
  bool no_report = false;
  auto* explain = app.add_subcommand("explain", "render a rule as formulas and graphs");
  explain->add_option("rule", explain_file, "rule file")->required();
  explain->add_flag("--no-report", no_report, "omit the synthesis report stored next to the rule");

  std::string pdg_file;
  bool raw = false;
  auto* pdg = app.add_subcommand("pdg", "print the interchange PDG of a method");
  pdg->add_option("file", pdg_file, ".mj source or .pdg document")->required();
  pdg->add_flag("--raw", raw, "skip relational-operator and getter normalization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*synth) return cmd_synth(corpus, out, name, session, synth_flags);
    if (*check) return cmd_check(rule_file, paths, jobs);
    if (*refine) return cmd_refine(session_dir, fp_file, refine_flags);
    if (*explain) return cmd_explain(explain_file, !no_report);
    if (*pdg) return cmd_pdg(pdg_file, raw);
  } catch (const SynthesisFailure& e) {
    std::cerr << "synthesis failed: " << e.what() << "\n";
    return kSynthesisFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
