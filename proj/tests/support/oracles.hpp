#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "modbench/bitvec.hpp"
#include "modbench/netlist.hpp"

namespace oracle {

using modbench::BitVec;
using modbench::Lit;
using modbench::Netlist;
using Rng = std::mt19937_64;
using Stimulus = std::vector<std::map<std::string, BitVec>>;

// Copies `src` gate by gate. `gate` builds the replacement for AND node
// `node` from its already-mapped fanins; the default is a plain make_and.
using GateHook = std::function<Lit(Netlist& dst, uint32_t node, Lit a, Lit b)>;
Netlist rebuild(const Netlist& src, const GateHook& gate = {});

// Single-bit ports i0.., o0.. over a random AND/inverter DAG.
Netlist random_comb(Rng& rng, unsigned inputs, unsigned gates, unsigned outputs);

// Equivalent netlist with different structure: Shannon expansion of every
// output on a random input plus local redundant rewrites.
Netlist rewrite_equivalent(const Netlist& n, Rng& rng);

// One AND node altered: a fanin complemented, a fanin rewired, or the gate
// turned into an OR.
Netlist mutate_gate(const Netlist& n, Rng& rng);

// Random Mealy machine: `state_bits` registers named s0.., single-bit
// inputs i0.. and outputs o0...
Netlist random_fsm(Rng& rng, unsigned inputs, unsigned state_bits, unsigned outputs, unsigned gates_per_fn);

// Same behaviour, register `j` stored inverted and renamed.
Netlist reencode(const Netlist& n, Rng& rng);

// Straight-line evaluator over the node array. `state` is indexed by
// register, `in` by input bit.
struct Eval {
  std::vector<bool> outputs;
  std::vector<bool> next;
};
Eval eval_netlist(const Netlist& n, const std::vector<bool>& in, const std::vector<bool>& state);

// Output bits for every input assignment of a combinational netlist,
// assignment index = sum of in[i] << i.
std::vector<std::vector<bool>> truth_table(const Netlist& n);

// Breadth-first search over the product machine from the reset state.
// Returns the shortest input sequence (one assignment index per cycle) whose
// last cycle shows an output difference.
std::optional<std::vector<uint64_t>> distinguishing_trace(const Netlist& a, const Netlist& b);

// Runs a netlist from reset on a port-level stimulus with eval_netlist.
std::vector<std::vector<bool>> run_trace(const Netlist& n, const Stimulus& stim);

// Brute-force satisfiability over DIMACS clauses.
bool brute_force_sat(unsigned vars, const std::vector<std::vector<int>>& clauses);

// Mutable operator tokens of a module body (outside brackets).
struct SourceMutation {
  size_t offset = 0;
  size_t length = 0;
  std::string replacement;
};
std::vector<SourceMutation> operator_mutations(const std::string& module_source, size_t body_begin);
std::string apply(const std::string& s, const SourceMutation& m);

// Verilog text of one random design with `modules` modules, each a small
// combinational or clocked block; later modules may instantiate earlier ones.
std::string random_design(Rng& rng, unsigned modules, const std::string& prefix);

}  // namespace oracle
