#include "modbench/netlist.hpp"

#include <algorithm>
#include <sstream>

#include "modbench/error.hpp"

namespace modbench {

Netlist::Netlist() { nodes.push_back(Node{NodeKind::Const, 0, 0}); }

Lit Netlist::add_input(const std::string& name) {
  uint32_t id = static_cast<uint32_t>(nodes.size());
  nodes.push_back(Node{NodeKind::Input, 0, 0});
  inputs.push_back(InputBit{name, id});
  return make_lit(id);
}

size_t Netlist::add_register(const std::string& name, const std::string& clock, bool reset_value) {
  uint32_t id = static_cast<uint32_t>(nodes.size());
  nodes.push_back(Node{NodeKind::Latch, 0, 0});
  registers.push_back(Register{name, id, kFalse, clock, reset_value});
  return registers.size() - 1;
}

void Netlist::add_output(const std::string& name, Lit lit) { outputs.push_back(OutputBit{name, lit}); }

Lit Netlist::make_and(Lit a, Lit b) {
  if (a == kFalse || b == kFalse) return kFalse;
  if (a == kTrue) return b;
  if (b == kTrue) return a;
  if (a == b) return a;
  if (a == lit_not(b)) return kFalse;
  if (a > b) std::swap(a, b);
  uint64_t key = (static_cast<uint64_t>(a) << 32) | b;
  if (auto it = strash_.find(key); it != strash_.end()) return make_lit(it->second);
  uint32_t id = static_cast<uint32_t>(nodes.size());
  nodes.push_back(Node{NodeKind::And, a, b});
  strash_.emplace(key, id);
  return make_lit(id);
}

Lit Netlist::make_xor(Lit a, Lit b) {
  if (a == kFalse) return b;
  if (b == kFalse) return a;
  if (a == kTrue) return lit_not(b);
  if (b == kTrue) return lit_not(a);
  if (a == b) return kFalse;
  if (a == lit_not(b)) return kTrue;
  return make_or(make_and(a, lit_not(b)), make_and(lit_not(a), b));
}

Lit Netlist::make_mux(Lit sel, Lit t, Lit e) {
  if (sel == kTrue) return t;
  if (sel == kFalse) return e;
  if (t == e) return t;
  return make_or(make_and(sel, t), make_and(lit_not(sel), e));
}

Lit Netlist::make_and_all(std::span<const Lit> lits) {
  Lit acc = kTrue;
  for (Lit l : lits) acc = make_and(acc, l);
  return acc;
}

Lit Netlist::make_or_all(std::span<const Lit> lits) {
  Lit acc = kFalse;
  for (Lit l : lits) acc = make_or(acc, l);
  return acc;
}

size_t Netlist::and_count() const {
  return static_cast<size_t>(std::count_if(nodes.begin(), nodes.end(),
                                           [](const Node& n) { return n.kind == NodeKind::And; }));
}

const Port* Netlist::find_port(const std::string& name) const {
  for (const auto& p : ports)
    if (p.name == name) return &p;
  return nullptr;
}

namespace {

std::string lit_text(Lit l) {
  if (lit_node(l) == 0) return lit_neg(l) ? "1" : "0";
  return (lit_neg(l) ? "!n" : "n") + std::to_string(lit_node(l));
}

}  // namespace

std::vector<uint32_t> topological_order(const Netlist& n) {
  size_t count = n.nodes.size();
  std::vector<uint8_t> color(count, 0);
  std::vector<uint32_t> order;
  order.reserve(count);
  std::vector<std::pair<uint32_t, int>> stack;
  for (uint32_t root = 0; root < count; ++root) {
    if (color[root]) continue;
    stack.emplace_back(root, 0);
    color[root] = 1;
    while (!stack.empty()) {
      auto& [id, state] = stack.back();
      const Node& node = n.nodes[id];
      if (node.kind == NodeKind::And && state < 2) {
        Lit f = state == 0 ? node.fanin0 : node.fanin1;
        ++state;
        uint32_t child = lit_node(f);
        if (child >= count) throw ElabError("netlist refers to missing node " + std::to_string(child));
        if (color[child] == 1) throw ElabError("combinational cycle through node " + std::to_string(child));
        if (color[child] == 0) {
          color[child] = 1;
          stack.emplace_back(child, 0);
        }
        continue;
      }
      color[id] = 2;
      order.push_back(id);
      stack.pop_back();
    }
  }
  return order;
}

void Netlist::validate() const {
  topological_order(*this);
  auto check = [&](Lit l, const std::string& what) {
    if (lit_node(l) >= nodes.size()) throw ElabError(what + " refers to a missing node");
  };
  for (const auto& o : outputs) check(o.lit, "output " + o.name);
  for (const auto& r : registers) check(r.next, "register " + r.name);
}

size_t Netlist::cone_size(Lit lit) const {
  std::vector<uint8_t> seen(nodes.size(), 0);
  std::vector<uint32_t> stack{lit_node(lit)};
  size_t count = 0;
  while (!stack.empty()) {
    uint32_t id = stack.back();
    stack.pop_back();
    if (seen[id]) continue;
    seen[id] = 1;
    if (nodes[id].kind != NodeKind::And) continue;
    ++count;
    stack.push_back(lit_node(nodes[id].fanin0));
    stack.push_back(lit_node(nodes[id].fanin1));
  }
  return count;
}

size_t Netlist::coi_size(Lit lit) const {
  std::vector<uint8_t> seen(nodes.size(), 0);
  std::vector<uint32_t> latch_reg(nodes.size(), UINT32_MAX);
  for (uint32_t r = 0; r < registers.size(); ++r) latch_reg[registers[r].node] = r;
  std::vector<uint32_t> stack{lit_node(lit)};
  size_t count = 0;
  while (!stack.empty()) {
    uint32_t id = stack.back();
    stack.pop_back();
    if (seen[id]) continue;
    seen[id] = 1;
    if (nodes[id].kind == NodeKind::Latch && latch_reg[id] != UINT32_MAX) {
      stack.push_back(lit_node(registers[latch_reg[id]].next));
      continue;
    }
    if (nodes[id].kind != NodeKind::And) continue;
    ++count;
    stack.push_back(lit_node(nodes[id].fanin0));
    stack.push_back(lit_node(nodes[id].fanin1));
  }
  return count;
}

std::string dump(const Netlist& n) {
  std::ostringstream os;
  for (const auto& in : n.inputs) os << "input n" << in.node << " " << in.name << "\n";
  for (const auto& r : n.registers)
    os << "reg n" << r.node << " next=" << lit_text(r.next) << " reset=" << (r.reset_value ? 1 : 0)
       << "  # " << r.name << "\n";
  for (uint32_t id = 0; id < n.nodes.size(); ++id) {
    const Node& node = n.nodes[id];
    if (node.kind == NodeKind::And)
      os << "n" << id << " = AND(" << lit_text(node.fanin0) << ", " << lit_text(node.fanin1) << ")\n";
  }
  for (const auto& o : n.outputs) os << "output " << o.name << " = " << lit_text(o.lit) << "\n";
  return os.str();
}

Netlist canonicalize(const Netlist& src) {
  Netlist out;
  std::vector<Lit> map(src.nodes.size(), kFalse);
  std::vector<uint8_t> done(src.nodes.size(), 0);
  done[0] = 1;
  for (const auto& in : src.inputs) {
    map[in.node] = out.add_input(in.name);
    done[in.node] = 1;
  }
  for (const auto& r : src.registers) {
    size_t idx = out.add_register(r.name, r.clock, r.reset_value);
    map[r.node] = out.register_lit(idx);
    done[r.node] = 1;
  }
  auto translate = [&](Lit root) {
    std::vector<uint32_t> stack{lit_node(root)};
    while (!stack.empty()) {
      uint32_t id = stack.back();
      if (done[id]) {
        stack.pop_back();
        continue;
      }
      const Node& node = src.nodes[id];
      uint32_t a = lit_node(node.fanin0), b = lit_node(node.fanin1);
      if (!done[a]) {
        stack.push_back(a);
        continue;
      }
      if (!done[b]) {
        stack.push_back(b);
        continue;
      }
      map[id] = out.make_and(map[a] ^ (node.fanin0 & 1), map[b] ^ (node.fanin1 & 1));
      done[id] = 1;
      stack.pop_back();
    }
    return map[lit_node(root)] ^ (root & 1);
  };
  for (const auto& o : src.outputs) out.add_output(o.name, translate(o.lit));
  for (size_t i = 0; i < src.registers.size(); ++i) out.registers[i].next = translate(src.registers[i].next);
  out.ports = src.ports;
  return out;
}

std::vector<std::vector<uint64_t>> simulate_words(const Netlist& n,
                                                  const std::vector<std::vector<uint64_t>>& inputs) {
  std::vector<uint32_t> order = topological_order(n);
  std::vector<uint64_t> val(n.nodes.size(), 0);
  std::vector<uint64_t> state(n.registers.size());
  for (size_t r = 0; r < n.registers.size(); ++r) state[r] = n.registers[r].reset_value ? ~uint64_t{0} : 0;
  auto get = [&](Lit l) { return lit_neg(l) ? ~val[lit_node(l)] : val[lit_node(l)]; };
  std::vector<std::vector<uint64_t>> result;
  result.reserve(inputs.size());
  for (const auto& cycle : inputs) {
    if (cycle.size() != n.inputs.size()) throw ElabError("stimulus does not cover every input");
    for (size_t i = 0; i < n.inputs.size(); ++i) val[n.inputs[i].node] = cycle[i];
    for (size_t r = 0; r < n.registers.size(); ++r) val[n.registers[r].node] = state[r];
    for (uint32_t id : order) {
      const Node& node = n.nodes[id];
      if (node.kind == NodeKind::And) val[id] = get(node.fanin0) & get(node.fanin1);
    }
    std::vector<uint64_t> outs(n.outputs.size());
    for (size_t o = 0; o < n.outputs.size(); ++o) outs[o] = get(n.outputs[o].lit);
    result.push_back(std::move(outs));
    for (size_t r = 0; r < n.registers.size(); ++r) state[r] = get(n.registers[r].next);
  }
  return result;
}

std::vector<std::map<std::string, BitVec>> simulate(const Netlist& n,
                                                    const std::vector<std::map<std::string, BitVec>>& stimulus) {
  std::vector<std::vector<uint64_t>> words;
  words.reserve(stimulus.size());
  for (const auto& cycle : stimulus) {
    std::vector<uint64_t> w(n.inputs.size(), 0);
    for (const auto& p : n.ports) {
      if (p.direction != ast::Direction::In) continue;
      auto it = cycle.find(p.name);
      if (it == cycle.end()) throw ElabError("stimulus has no value for input '" + p.name + "'");
      for (size_t b = 0; b < p.bits.size(); ++b) w[p.bits[b]] = it->second.bit(static_cast<uint32_t>(b)) ? 1 : 0;
    }
    words.push_back(std::move(w));
  }
  auto out_words = simulate_words(n, words);
  std::vector<std::map<std::string, BitVec>> result;
  for (const auto& cycle : out_words) {
    std::map<std::string, BitVec> m;
    for (const auto& p : n.ports) {
      if (p.direction != ast::Direction::Out) continue;
      BitVec v(p.width);
      for (size_t b = 0; b < p.bits.size(); ++b) v.set_bit(static_cast<uint32_t>(b), cycle[p.bits[b]] & 1);
      m[p.name] = v;
    }
    result.push_back(std::move(m));
  }
  return result;
}

std::string format_trace(const SimTrace& t) {
  std::ostringstream os;
  for (size_t c = 0; c < t.inputs.size(); ++c) {
    os << "cycle " << c << ":";
    for (const auto& [name, v] : t.inputs[c]) os << " " << name << "=" << v.width() << "'h" << v.to_hex();
    if (c < t.outputs.size()) {
      os << " |";
      for (const auto& [name, v] : t.outputs[c]) os << " " << name << "=" << v.width() << "'h" << v.to_hex();
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace modbench
