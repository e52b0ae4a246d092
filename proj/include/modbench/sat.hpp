#pragma once

#include <cstdint>
#include <vector>

namespace modbench::sat {

// Literals use DIMACS conventions throughout the public interface: variable
// v >= 1, literal +v or -v.

enum class Verdict { Sat, Unsat, Unknown };

constexpr uint64_t kDefaultConflictBudget = 200000;

struct Stats {
  uint64_t conflicts = 0;
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t restarts = 0;
  uint64_t solves = 0;
};

// Incremental CDCL solver: two watched literals, VSIDS branching with phase
// saving, first-UIP learning, Luby restarts and learnt clause reduction.
// Clauses may be added between calls to solve().
class Solver {
 public:
  Solver();
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  int new_var();
  int num_vars() const;

  // Returns false once the clause set is unsatisfiable at the top level.
  bool add_clause(const std::vector<int>& lits);

  // Solves under `assumptions`. Gives up with Unknown after `budget`
  // conflicts in this call.
  Verdict solve(const std::vector<int>& assumptions = {}, uint64_t budget = kDefaultConflictBudget);

  // Model value of variable `var` after a Sat verdict.
  bool model_value(int var) const;

  const Stats& stats() const;

 private:
  struct Impl;
  Impl* impl_;
};

struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

struct SatResult {
  Verdict verdict = Verdict::Unknown;
  std::vector<bool> model;  // model[v] for v in 1..num_vars; index 0 unused
  Stats stats;
};

SatResult sat_solve(const Cnf& f, const std::vector<int>& assumptions = {},
                    uint64_t budget = kDefaultConflictBudget);

}  // namespace modbench::sat
