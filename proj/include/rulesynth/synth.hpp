// rulesynth/synth.hpp - rule synthesis from violating and conforming examples.
//
// The precondition is the common core of the violating examples. Conforming
// examples that satisfy it are pinned with their precondition models and
// generalized into a disjunction of postconditions, splitting groups by
// entropy until no violating example satisfies any disjunct.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rulesynth/align.hpp"
#include "rulesynth/formula.hpp"
#include "rulesynth/pdg.hpp"
#include "rulesynth/rule.hpp"
#include "rulesynth/uapdg.hpp"

namespace rulesynth {

struct SynthConfig {
  double delta = 0.05;                    // entropy margin, nats
  std::size_t max_partitions = 64;        // partitions dequeued before giving up
  int radius = 1;                         // neighborhood kept for single-example subrules
  std::size_t max_models_per_example = 32;
  AlignOptions align;
};

/// Throws SchemaError for out-of-range settings.
void check_config(const SynthConfig& c);

/// Plain-text log of the decisions taken during one synthesis.
struct SynthReport {
  std::vector<std::string> lines;

  void add(std::string line) { lines.push_back(std::move(line)); }
  std::string text() const;
};

struct Subrule {
  QuantifiedConjunct formula;
  Uapdg merged;                // fold of all examples
  Uapdg common;                // projection the formula was read from
  std::vector<Vpdg> examples;  // inputs re-valuated over the formula's variables
};

/// Aligns and merges the examples in order, then keeps what every example
/// shares. A lone example with free variables keeps only the nodes within
/// `config.radius` of its frozen nodes.
Subrule get_conjunctive_subrule(const std::vector<Vpdg>& examples, const SynthConfig& config,
                                SynthReport* report = nullptr);

/// Fold-merge only, sources numbered by position.
Uapdg merge_all(const std::vector<Vpdg>& examples, const SynthConfig& config, SynthReport* report = nullptr);

/// Entropy of a set of sources over the presence of every merged node.
double group_entropy(const Uapdg& merged, const std::vector<int>& group);

/// Weighted entropy of splitting sources 0..num_examples-1 on `split_node`.
double compute_entropy(const Uapdg& merged, std::size_t num_examples, std::size_t split_node);

struct CandidateSplit {
  std::vector<std::size_t> with;     // example indices containing the node
  std::vector<std::size_t> without;  // the rest
  std::size_t node = 0;              // index in the merged graph
  std::string label;
  double entropy = 0;
};

/// Splits on action nodes adjacent to the common core whose entropy is
/// within `config.delta` of the best, ordered by entropy then node index.
std::vector<CandidateSplit> generate_candidate_partitions(const std::vector<Vpdg>& examples,
                                                          const SynthConfig& config,
                                                          SynthReport* report = nullptr);

/// Disjuncts rejecting every pinned violating example; empty when there are
/// no conforming examples. Throws SynthesisFailure when no partition within
/// the budget separates the two sets.
std::vector<QuantifiedConjunct> synthesize_pc(const std::vector<Vpdg>& violating, const std::vector<Vpdg>& conforming,
                                              const SynthConfig& config, SynthReport* report = nullptr);

struct SynthesisInput {
  std::vector<Pdg> violating;
  std::vector<Pdg> conforming;
  SynthConfig config;
};

/// Precondition core, conforming models, postcondition, final check. The
/// returned rule flags every violating example and no conforming one;
/// otherwise SynthesisFailure names the offending example.
Rule synthesize_rule(const SynthesisInput& input, const std::string& name = "rule", SynthReport* report = nullptr);

/// True when every node of `g` carries a change tag.
bool is_change_tagged(const Pdg& g);

}  // namespace rulesynth
