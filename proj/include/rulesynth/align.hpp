// rulesynth/align.hpp - maximal pairwise graph alignment as a 0-1 program.
//
// Both PDGs and merged graphs are aligned through a small view that keeps
// only what the constraints look at: node kind, label predicate, change tag
// and labeled edges.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rulesynth/ilp.hpp"
#include "rulesynth/lattice.hpp"
#include "rulesynth/pdg.hpp"

namespace rulesynth {

struct AlignNode {
  std::string name;  // used for variable names and messages
  NodeKind kind = NodeKind::Data;
  ConstLattice<std::string> label;
  ChangeTag change_tag = ChangeTag::None;
};

struct AlignEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  EdgeLabel label;
};

struct AlignGraph {
  std::vector<AlignNode> nodes;
  std::vector<AlignEdge> edges;
};

AlignGraph align_view(const Pdg& g);

enum class AlignMode {
  Precondition,   // action nodes must also agree on change tags
  Postcondition,  // change tags ignored
};

struct AlignmentProblem {
  AlignGraph g1;
  AlignGraph g2;
  AlignMode mode = AlignMode::Postcondition;
  std::vector<std::pair<std::size_t, std::size_t>> pins;  // node indices that must be aligned
};

struct AlignOptions {
  /// Cap on candidate node pairs; exceeding it raises SolverBudgetExceeded.
  std::size_t max_node_pairs = 20000;
  std::uint64_t max_search_nodes = 20'000'000;
  /// Solver to use; the built-in branch and bound when null.
  IlpSolver* solver = nullptr;
  /// Called with every instance before it is solved (LP dumps).
  std::function<void(const IlpInstance&)> on_instance;
};

struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> node_map;  // sorted by first
  std::vector<std::pair<std::size_t, std::size_t>> edge_map;  // edge indices, sorted by first
  long long objective = 0;

  std::optional<std::size_t> image(std::size_t n1) const;
  std::optional<std::size_t> preimage(std::size_t n2) const;
};

struct AlignmentIlp {
  IlpInstance instance;
  std::vector<std::pair<std::size_t, std::size_t>> node_pairs;  // candidate pairs, variable i
  std::vector<std::pair<std::size_t, std::size_t>> edge_pairs;  // variable node_pairs.size() + j
};

/// Encodes the alignment constraints over label- and tag-compatible
/// candidate pairs only. Throws AlignmentError for invalid pins and
/// SolverBudgetExceeded when the candidate set exceeds the cap.
AlignmentIlp build_alignment_ilp(const AlignmentProblem& p, const AlignOptions& options = {});

/// Optimal alignment; the result is re-checked against every structural
/// constraint before it is returned.
Alignment align(const AlignmentProblem& p, const AlignOptions& options = {});

/// Throws AlignmentError describing the first violated constraint.
void check_alignment(const AlignmentProblem& p, const Alignment& a);

/// Aligns a change's two sides ignoring tags and tags mapped nodes
/// Unchanged, unmapped before-nodes Deleted and unmapped after-nodes Added.
std::pair<Pdg, Pdg> diff_pdgs(const Pdg& before, const Pdg& after, const AlignOptions& options = {});

}  // namespace rulesynth
