#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modbench/error.hpp"
#include "modbench/netlist.hpp"
#include "modbench/sat.hpp"

namespace modbench {

class InterfaceError : public Error {
 public:
  using Error::Error;
};

// Golden and candidate copies over one set of shared inputs. Registers stay
// separate: the golden copy's come first, named "golden/<name>", followed by
// the candidate's, named "candidate/<name>".
struct Miter {
  Netlist net;
  std::vector<Port> input_ports;       // golden input ports, bits index net.inputs
  std::vector<std::string> out_names;  // one per compared output bit, golden order
  std::vector<Lit> golden_out;
  std::vector<Lit> cand_out;
  std::vector<Lit> eq;  // XNOR per output bit
  Lit eq_all = kTrue;
  size_t golden_regs = 0;

  // Same-name register pairs (indices into net.registers).
  std::vector<std::pair<size_t, size_t>> matched;
  std::vector<Lit> state_eq;  // XNOR of each matched pair's current values
  std::vector<Lit> next_eq;   // XNOR of each matched pair's next-state values
  bool fully_matched = false; // every register paired, with equal reset values
};

// Throws InterfaceError listing missing, extra and mis-sized ports.
Miter build_miter(const Netlist& golden, const Netlist& candidate);

// Tseitin encoding of a combinational netlist: node i is variable i+1 and
// register outputs are unconstrained variables.
sat::Cnf tseitin(const Netlist& n);

enum class Verdict { Equivalent, NotEquivalent, Unknown };

const char* verdict_name(Verdict v);

struct EquivOptions {
  unsigned k = 30;
  uint64_t conflict_budget = sat::kDefaultConflictBudget;
};

struct CheckResult {
  Verdict verdict = Verdict::Unknown;
  std::vector<Verdict> bits;  // per miter output bit
  // Input stimulus reaching a mismatch, one entry per cycle; present iff
  // verdict is NotEquivalent.
  std::optional<std::vector<std::map<std::string, BitVec>>> stimulus;
  std::string method;
  std::string note;  // why the verdict is unknown, when it is
  uint64_t queries = 0;
  sat::Stats stats;
};

// One SAT query per output bit with all registers as free inputs, same-name
// pairs sharing a variable. Exact for combinational miters; for sequential
// ones a NotEquivalent bit may come from an unreachable state.
CheckResult check_combinational(const Miter& m, const EquivOptions& opt = {});

// Base case from reset over cycles 0..k-1, then a k-deep induction step from
// arbitrary states. Output equalities and matched-register equalities are
// candidate invariants; any that fail the step are dropped and the step is
// retried on the rest. Output bits still standing are proved.
CheckResult check_inductive(const Miter& m, const EquivOptions& opt = {});

// check_combinational for register-free miters. Otherwise tries the
// cut-point proof when every register is paired, then check_inductive.
CheckResult check_equivalence(const Miter& m, const EquivOptions& opt = {});

// 100 * sum of equivalent weights / total weight. Unknown counts as not
// equivalent.
double partition_coverage(const std::vector<Verdict>& verdicts, const std::vector<uint64_t>& weights);

// Cone weight of each golden output bit (sequential cone, at least 1).
std::vector<uint64_t> partition_weights(const Netlist& golden);

struct Replay {
  bool mismatch = false;
  size_t cycle = 0;
  std::vector<std::string> outputs;  // ports that differ at `cycle`
  SimTrace golden;
  std::vector<std::map<std::string, BitVec>> candidate;
};

// Simulates both netlists on `stimulus` and reports the first differing cycle.
Replay replay(const Netlist& golden, const Netlist& candidate,
              const std::vector<std::map<std::string, BitVec>>& stimulus);

// Per-cycle table with golden and candidate outputs side by side.
std::string format_counterexample(const Replay& r);

}  // namespace modbench
