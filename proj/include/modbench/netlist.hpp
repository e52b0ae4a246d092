#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "modbench/ast.hpp"
#include "modbench/bitvec.hpp"

namespace modbench {

// AIG literal: node index * 2 + complement flag. Node 0 is constant false.
using Lit = uint32_t;
constexpr Lit kFalse = 0;
constexpr Lit kTrue = 1;

constexpr uint32_t lit_node(Lit l) { return l >> 1; }
constexpr bool lit_neg(Lit l) { return l & 1; }
constexpr Lit make_lit(uint32_t node, bool neg = false) { return (node << 1) | (neg ? 1u : 0u); }
constexpr Lit lit_not(Lit l) { return l ^ 1u; }

enum class NodeKind : uint8_t { Const, Input, Latch, And };

struct Node {
  NodeKind kind = NodeKind::Const;
  Lit fanin0 = 0;
  Lit fanin1 = 0;
};

struct InputBit {
  std::string name;
  uint32_t node = 0;
};

struct OutputBit {
  std::string name;
  Lit lit = kFalse;
};

struct Register {
  std::string name;
  uint32_t node = 0;  // latch node holding the current state
  Lit next = kFalse;
  std::string clock;
  bool reset_value = false;
};

// Port-level view over bit-level inputs/outputs; bits listed LSB first as
// indices into `inputs` or `outputs`.
struct Port {
  std::string name;
  ast::Direction direction = ast::Direction::In;
  uint32_t width = 1;
  std::vector<uint32_t> bits;
};

// Flat bit-level circuit: and-inverter graph plus clocked registers.
class Netlist {
 public:
  Netlist();

  Lit add_input(const std::string& name);
  // Adds a register; its next-state literal is filled in later.
  size_t add_register(const std::string& name, const std::string& clock, bool reset_value);
  Lit register_lit(size_t reg) const { return make_lit(registers[reg].node); }
  void add_output(const std::string& name, Lit lit);

  // Structurally hashed gate constructors with constant folding.
  Lit make_and(Lit a, Lit b);
  Lit make_or(Lit a, Lit b) { return lit_not(make_and(lit_not(a), lit_not(b))); }
  Lit make_xor(Lit a, Lit b);
  Lit make_xnor(Lit a, Lit b) { return lit_not(make_xor(a, b)); }
  Lit make_mux(Lit sel, Lit then_lit, Lit else_lit);
  Lit make_and_all(std::span<const Lit> lits);
  Lit make_or_all(std::span<const Lit> lits);

  size_t and_count() const;
  bool is_combinational() const { return registers.empty(); }
  const Port* find_port(const std::string& name) const;

  // Throws ElabError when a node refers forward or to itself through AND
  // fanins (a combinational cycle) or to a missing node.
  void validate() const;

  // Number of AND nodes in the transitive fan-in of `lit`, stopping at inputs
  // and register outputs.
  size_t cone_size(Lit lit) const;

  // Like cone_size, but continues through registers into their next-state
  // logic (the sequential cone of influence).
  size_t coi_size(Lit lit) const;

  std::vector<Node> nodes;
  std::vector<InputBit> inputs;
  std::vector<OutputBit> outputs;
  std::vector<Register> registers;
  std::vector<Port> ports;
  // Registers whose asynchronous reset was folded into next-state logic.
  std::vector<std::string> async_reset_registers;

 private:
  std::unordered_map<uint64_t, uint32_t> strash_;
};

// AND/input/latch nodes ordered so every AND follows its fanins. Throws
// ElabError on cycles.
std::vector<uint32_t> topological_order(const Netlist& n);

// Textual dump: `input`, `reg id next=lit reset=b`, `id = AND(lit, lit)`,
// `output name = lit` lines.
std::string dump(const Netlist& n);

// Renumbers nodes in depth-first order from outputs and next-state
// functions, so isomorphic netlists produce identical dumps.
Netlist canonicalize(const Netlist& n);

// Per-cycle port values (by port name).
struct SimTrace {
  std::vector<std::map<std::string, BitVec>> inputs;
  std::vector<std::map<std::string, BitVec>> outputs;
};

// Runs the netlist from reset for one cycle per stimulus entry. Throws
// ElabError when an input port has no value in some cycle.
std::vector<std::map<std::string, BitVec>> simulate(const Netlist& n,
                                                    const std::vector<std::map<std::string, BitVec>>& stimulus);

// 64 independent traces at once. `inputs[cycle][i]` holds bit i of every
// lane; the result is `outputs[cycle][o]` in the same layout.
std::vector<std::vector<uint64_t>> simulate_words(const Netlist& n,
                                                  const std::vector<std::vector<uint64_t>>& inputs);

// Renders a trace as a per-cycle assignment table.
std::string format_trace(const SimTrace& t);

}  // namespace modbench
