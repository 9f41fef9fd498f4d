#include "rulesynth/ilp.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

#include "rulesynth/error.hpp"

namespace rulesynth {

int IlpInstance::add_var(std::string name, int objective_coef) {
  var_names.push_back(std::move(name));
  objective.push_back(objective_coef);
  return static_cast<int>(var_names.size() - 1);
}

bool is_feasible(const IlpInstance& instance, const std::vector<std::uint8_t>& values) {
  for (const auto& c : instance.constraints) {
    long long act = 0;
    for (const auto& t : c.terms) act += static_cast<long long>(t.coef) * values.at(t.var);
    if (c.sense == Sense::Le && act > c.rhs) return false;
    if (c.sense == Sense::Ge && act < c.rhs) return false;
    if (c.sense == Sense::Eq && act != c.rhs) return false;
  }
  return true;
}

long long objective_value(const IlpInstance& instance, const std::vector<std::uint8_t>& values) {
  long long v = 0;
  for (std::size_t i = 0; i < instance.num_vars(); ++i) v += static_cast<long long>(instance.objective[i]) * values.at(i);
  return v;
}

namespace {

class Search {
 public:
  Search(const IlpInstance& inst, const BranchAndBoundOptions& opt) : inst_(inst), opt_(opt) {
    const std::size_t n = inst.num_vars();
    val_.assign(n, -1);
    incidence_.resize(n);
    lo_.resize(inst.constraints.size());
    hi_.resize(inst.constraints.size());
    in_queue_.assign(inst.constraints.size(), false);
    for (std::size_t c = 0; c < inst.constraints.size(); ++c) {
      for (const auto& t : inst.constraints[c].terms) {
        if (t.var < 0 || static_cast<std::size_t>(t.var) >= n)
          throw SchemaError("constraint " + inst.constraints[c].name + " references an unknown variable");
        incidence_[t.var].push_back({static_cast<int>(c), t.coef});
        lo_[c] += std::min(0, t.coef);
        hi_[c] += std::max(0, t.coef);
      }
    }
    build_components();
  }

  IlpSolution run() {
    for (std::size_t c = 0; c < inst_.constraints.size(); ++c) enqueue(static_cast<int>(c));
    if (!propagate()) throw SchemaError("infeasible 0-1 program");
    const std::size_t root = trail_.size();
    dfs(0);
    if (!found_) throw SchemaError("infeasible 0-1 program");
    // Second pass: with the optimum known, the first optimal leaf of a
    // 0-first search is the lexicographically smallest optimal vector.
    undo_to(root);
    best_ -= 1;
    lex_pass_ = true;
    dfs(0);
    IlpSolution s;
    s.values = best_values_;
    s.objective = best_;
    s.search_nodes = nodes_;
    return s;
  }

 private:
  struct Incidence {
    int row;
    int coef;
  };

  void build_components() {
    const std::size_t n = inst_.num_vars();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<int> cover_rows;
    for (std::size_t c = 0; c < inst_.constraints.size(); ++c) {
      const auto& row = inst_.constraints[c];
      if (row.cover_group < 0) continue;
      // Only a valid cover if the row really limits its positive variables to one.
      bool ok = row.sense != Sense::Ge && row.rhs == 1;
      for (const auto& t : row.terms) ok = ok && t.coef == 1;
      if (!ok) continue;
      cover_rows.push_back(static_cast<int>(c));
      int first = -1;
      for (const auto& t : row.terms) {
        if (inst_.objective[t.var] <= 0) continue;
        if (first < 0) {
          first = t.var;
        } else {
          parent[find(t.var)] = find(first);
        }
      }
    }
    std::vector<int> comp_of(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
      if (inst_.objective[v] <= 0) continue;
      const int root = find(static_cast<int>(v));
      if (comp_of[root] < 0) {
        comp_of[root] = static_cast<int>(components_.size());
        components_.emplace_back();
      }
      components_[comp_of[root]].vars.push_back(static_cast<int>(v));
    }
    for (int c : cover_rows) {
      const auto& row = inst_.constraints[c];
      int comp = -1;
      for (const auto& t : row.terms)
        if (inst_.objective[t.var] > 0) comp = comp_of[find(t.var)];
      if (comp < 0) continue;
      auto& groups = components_[comp].groups;
      auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.id == row.cover_group; });
      if (it == groups.end()) {
        groups.push_back(Group{row.cover_group, {}, {}});
        it = groups.end() - 1;
      }
      it->rows.push_back(c);
    }
    for (auto& comp : components_) {
      for (auto& g : comp.groups) {
        std::vector<bool> covered(n, false);
        for (int c : g.rows)
          for (const auto& t : inst_.constraints[c].terms) covered[t.var] = true;
        for (int v : comp.vars)
          if (!covered[v]) g.uncovered.push_back(v);
      }
    }
  }

  long long bound() const {
    long long total = 0;
    for (const auto& comp : components_) {
      long long free_sum = 0;
      for (int v : comp.vars)
        if (val_[v] < 0) free_sum += inst_.objective[v];
      long long best = free_sum;
      for (const auto& g : comp.groups) {
        long long s = 0;
        for (int c : g.rows) {
          int m = 0;
          for (const auto& t : inst_.constraints[c].terms)
            if (val_[t.var] < 0) m = std::max(m, inst_.objective[t.var]);
          s += m;
        }
        for (int v : g.uncovered)
          if (val_[v] < 0) s += inst_.objective[v];
        best = std::min(best, s);
      }
      total += best;
    }
    return total;
  }

  void enqueue(int c) {
    if (!in_queue_[c]) {
      in_queue_[c] = true;
      queue_.push_back(c);
    }
  }

  void set(int v, int value) {
    val_[v] = static_cast<std::int8_t>(value);
    trail_.push_back(v);
    fixed_obj_ += static_cast<long long>(inst_.objective[v]) * value;
    for (const auto& [row, a] : incidence_[v]) {
      lo_[row] += static_cast<long long>(a) * value - std::min(0, a);
      hi_[row] += static_cast<long long>(a) * value - std::max(0, a);
      enqueue(row);
    }
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const int v = trail_.back();
      trail_.pop_back();
      const int value = val_[v];
      fixed_obj_ -= static_cast<long long>(inst_.objective[v]) * value;
      for (const auto& [row, a] : incidence_[v]) {
        lo_[row] -= static_cast<long long>(a) * value - std::min(0, a);
        hi_[row] -= static_cast<long long>(a) * value - std::max(0, a);
      }
      val_[v] = -1;
    }
  }

  bool propagate() {
    bool ok = true;
    while (!queue_.empty()) {
      const int c = queue_.back();
      queue_.pop_back();
      in_queue_[c] = false;
      if (!ok) continue;
      const auto& row = inst_.constraints[c];
      const bool upper = row.sense != Sense::Ge;
      const bool lower = row.sense != Sense::Le;
      if ((upper && lo_[c] > row.rhs) || (lower && hi_[c] < row.rhs)) {
        ok = false;
        continue;
      }
      for (const auto& t : row.terms) {
        if (val_[t.var] >= 0) continue;
        const long long a = t.coef;
        if (upper) {
          if (a > 0 && lo_[c] + a > row.rhs) {
            set(t.var, 0);
            continue;
          }
          if (a < 0 && lo_[c] - a > row.rhs) {
            set(t.var, 1);
            continue;
          }
        }
        if (lower) {
          if (a > 0 && hi_[c] - a < row.rhs) {
            set(t.var, 1);
            continue;
          }
          if (a < 0 && hi_[c] + a < row.rhs) {
            set(t.var, 0);
            continue;
          }
        }
      }
      if ((upper && lo_[c] > row.rhs) || (lower && hi_[c] < row.rhs)) ok = false;
    }
    return ok;
  }

  void dfs(std::size_t pos) {
    if (++nodes_ > opt_.max_search_nodes)
      throw SolverBudgetExceeded("0-1 solver exceeded its search budget of " + std::to_string(opt_.max_search_nodes) +
                                 " nodes");
    if (done_ || (found_ && fixed_obj_ + bound() <= best_)) return;
    while (pos < val_.size() && val_[pos] >= 0) ++pos;
    if (pos == val_.size()) {
      if (!found_ || fixed_obj_ > best_) {
        found_ = true;
        best_ = fixed_obj_;
        best_values_.assign(val_.begin(), val_.end());
        done_ = lex_pass_;
      }
      return;
    }
    const int order[2][2] = {{1, 0}, {0, 1}};
    for (int value : order[lex_pass_ ? 1 : 0]) {
      const std::size_t mark = trail_.size();
      set(static_cast<int>(pos), value);
      if (propagate()) dfs(pos + 1);
      undo_to(mark);
      if (done_) return;
    }
  }

  struct Group {
    int id;
    std::vector<int> rows;
    std::vector<int> uncovered;
  };
  struct Component {
    std::vector<int> vars;
    std::vector<Group> groups;
  };

  const IlpInstance& inst_;
  BranchAndBoundOptions opt_;
  std::vector<std::int8_t> val_;
  std::vector<std::vector<Incidence>> incidence_;
  std::vector<long long> lo_;
  std::vector<long long> hi_;
  std::vector<bool> in_queue_;
  std::vector<int> queue_;
  std::vector<int> trail_;
  std::vector<Component> components_;
  long long fixed_obj_ = 0;
  bool found_ = false;
  bool lex_pass_ = false;
  bool done_ = false;
  long long best_ = std::numeric_limits<long long>::min();
  std::vector<std::uint8_t> best_values_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

IlpSolution BranchAndBoundSolver::solve(const IlpInstance& instance) {
  if (instance.objective.size() != instance.var_names.size())
    throw SchemaError("objective length does not match the number of variables");
  return Search(instance, options_).run();
}

std::string to_lp_text(const IlpInstance& instance) {
  std::ostringstream out;
  auto term = [&](int coef, int var, bool first) {
    if (coef < 0) {
      out << (first ? "- " : " - ");
    } else if (!first) {
      out << " + ";
    }
    if (std::abs(coef) != 1) out << std::abs(coef) << " ";
    out << instance.var_names[var];
  };
  out << "Maximize\n obj:";
  bool first = true;
  for (std::size_t v = 0; v < instance.num_vars(); ++v) {
    if (instance.objective[v] == 0) continue;
    out << " ";
    term(instance.objective[v], static_cast<int>(v), first);
    first = false;
  }
  if (first) out << " 0";
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < instance.constraints.size(); ++i) {
    const auto& c = instance.constraints[i];
    out << " " << (c.name.empty() ? "c" + std::to_string(i) : c.name) << ":";
    if (c.terms.empty()) out << " 0";
    bool f = true;
    for (const auto& t : c.terms) {
      out << " ";
      term(t.coef, t.var, f);
      f = false;
    }
    out << (c.sense == Sense::Le ? " <= " : c.sense == Sense::Ge ? " >= " : " = ") << c.rhs << "\n";
  }
  out << "Binary\n";
  for (const auto& name : instance.var_names) out << " " << name << "\n";
  out << "End\n";
  return out.str();
}

}  // namespace rulesynth
