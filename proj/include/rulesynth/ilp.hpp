// rulesynth/ilp.hpp - 0-1 integer programs and an exact branch-and-bound solver.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rulesynth {

enum class Sense { Le, Eq, Ge };

struct LinearTerm {
  int var = 0;
  int coef = 0;
};

struct IlpConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense = Sense::Le;
  int rhs = 0;
  /// Rows of the same cover group (>= 0) should each hold "at most one of
  /// these variables" and jointly cover the objective; the solver uses them
  /// for its upper bound. -1 means the row only constrains.
  int cover_group = -1;
};

/// maximize objective . x  subject to constraints, x in {0,1}^n.
struct IlpInstance {
  std::vector<std::string> var_names;
  std::vector<int> objective;  // one coefficient per variable
  std::vector<IlpConstraint> constraints;

  int add_var(std::string name, int objective_coef);
  std::size_t num_vars() const noexcept { return var_names.size(); }
};

struct IlpSolution {
  std::vector<std::uint8_t> values;
  long long objective = 0;
  std::uint64_t search_nodes = 0;
};

/// Pluggable boundary so another exact MILP backend can replace the built-in one.
class IlpSolver {
 public:
  virtual ~IlpSolver() = default;
  /// Returns an optimal assignment. Throws SchemaError for infeasible
  /// instances and SolverBudgetExceeded when a resource cap is hit.
  virtual IlpSolution solve(const IlpInstance& instance) = 0;
};

struct BranchAndBoundOptions {
  std::uint64_t max_search_nodes = 20'000'000;
};

/// Depth-first branch and bound over the variables in index order with
/// activity-based propagation and a cover-group bound. A 1-first pass finds
/// the optimum; a 0-first pass pruned against it then returns the
/// lexicographically smallest optimal 0/1 vector.
class BranchAndBoundSolver : public IlpSolver {
 public:
  explicit BranchAndBoundSolver(BranchAndBoundOptions options = {}) : options_(options) {}
  IlpSolution solve(const IlpInstance& instance) override;

 private:
  BranchAndBoundOptions options_;
};

/// True iff `values` satisfies every constraint of `instance`.
bool is_feasible(const IlpInstance& instance, const std::vector<std::uint8_t>& values);
long long objective_value(const IlpInstance& instance, const std::vector<std::uint8_t>& values);

/// CPLEX-LP-style text: objective, one constraint per line, binaries.
std::string to_lp_text(const IlpInstance& instance);

}  // namespace rulesynth
