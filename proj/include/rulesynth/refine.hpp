// rulesynth/refine.hpp - refinement with labeled false positives.
//
// Every step re-synthesizes from the original input plus all false
// positives folded so far. The rule has converged once a step leaves its
// canonical form unchanged.
//
// Sessions persist as a directory:
//   base/            corpus the first rule was synthesized from
//   config.json      synthesis settings (optional)
//   fps/NNN.pdg      folded false positives, in order
//   rules/NNN.rule   rule versions; 000 is the base rule
//   log.txt          one line per step

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rulesynth/pdg.hpp"
#include "rulesynth/rule.hpp"
#include "rulesynth/synth.hpp"

namespace rulesynth {

/// Deterministic text form: variables renamed by a canonical labeling
/// (pre variables x0.., bound variables y1..), disjuncts sorted by node
/// count then text, name and provenance left out.
std::string canonical_rule(const Rule& r);

/// The rule rewritten into its canonical variable names and disjunct order.
Rule canonicalize(const Rule& r);

struct RefinementSession {
  SynthesisInput base;
  std::string rule_name = "rule";
  std::vector<Pdg> fps;
  std::vector<Rule> history;  // history[0] is the base rule
};

struct RefineResult {
  Rule rule;
  bool converged = false;
};

/// Synthesizes history[0] when the history is empty.
void ensure_base_rule(RefinementSession& s, SynthReport* report = nullptr);

/// Folds `fp` and re-synthesizes. Throws SchemaError("not a detection")
/// when no rule version so far flags `fp`, and SynthesisFailure when the
/// enlarged input cannot be separated. On success the session records the
/// fp and the new rule.
RefineResult refine_step(RefinementSession& s, const Pdg& fp, SynthReport* report = nullptr);

/// Loads base/, config.json, fps/ and rules/ from a session directory.
RefinementSession open_session(const std::filesystem::path& dir, const SynthConfig* override_config = nullptr);

/// Creates a session directory from a corpus: copies it to base/ and
/// writes the settings.
void init_session(const std::filesystem::path& dir, const std::filesystem::path& corpus, const SynthConfig& config);

/// Writes any fps and rules of `s` not yet on disk and appends to log.txt.
void save_session(const std::filesystem::path& dir, const RefinementSession& s, const std::string& log_line = {});

}  // namespace rulesynth
