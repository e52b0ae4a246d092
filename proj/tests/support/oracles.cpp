#include "oracles.hpp"

#include <deque>
#include <sstream>
#include <unordered_map>

#include "modbench/lexer.hpp"

namespace oracle {

using modbench::lit_neg;
using modbench::lit_node;
using modbench::lit_not;
using modbench::make_lit;
using modbench::NodeKind;
using modbench::Port;

namespace {

Lit pick(Rng& rng, const std::vector<Lit>& pool) {
  Lit l = pool[rng() % pool.size()];
  return (rng() & 1) ? lit_not(l) : l;
}

void scalar_ports(Netlist& n) {
  n.ports.clear();
  for (uint32_t i = 0; i < n.inputs.size(); ++i)
    n.ports.push_back(Port{n.inputs[i].name, modbench::ast::Direction::In, 1, {i}});
  for (uint32_t i = 0; i < n.outputs.size(); ++i)
    n.ports.push_back(Port{n.outputs[i].name, modbench::ast::Direction::Out, 1, {i}});
}

// Maps every AND node of src into dst given the images of inputs and
// latches in `map`.
void copy_gates(const Netlist& src, Netlist& dst, std::vector<Lit>& map, const GateHook& gate) {
  auto m = [&](Lit l) { return map[lit_node(l)] ^ (lit_neg(l) ? 1u : 0u); };
  for (uint32_t i = 0; i < src.nodes.size(); ++i) {
    const auto& nd = src.nodes[i];
    if (nd.kind != NodeKind::And) continue;
    Lit a = m(nd.fanin0), b = m(nd.fanin1);
    map[i] = gate ? gate(dst, i, a, b) : dst.make_and(a, b);
  }
}

Lit mapped(const std::vector<Lit>& map, Lit l) { return map[lit_node(l)] ^ (lit_neg(l) ? 1u : 0u); }

}  // namespace

Netlist rebuild(const Netlist& src, const GateHook& gate) {
  Netlist dst;
  std::vector<Lit> map(src.nodes.size(), modbench::kFalse);
  for (const auto& in : src.inputs) map[in.node] = dst.add_input(in.name);
  for (const auto& r : src.registers) {
    size_t k = dst.add_register(r.name, r.clock, r.reset_value);
    map[r.node] = dst.register_lit(k);
  }
  copy_gates(src, dst, map, gate);
  for (size_t k = 0; k < src.registers.size(); ++k) dst.registers[k].next = mapped(map, src.registers[k].next);
  for (const auto& o : src.outputs) dst.add_output(o.name, mapped(map, o.lit));
  dst.ports = src.ports;
  return dst;
}

Netlist random_comb(Rng& rng, unsigned inputs, unsigned gates, unsigned outputs) {
  Netlist n;
  std::vector<Lit> pool;
  for (unsigned i = 0; i < inputs; ++i) pool.push_back(n.add_input("i" + std::to_string(i)));
  for (unsigned g = 0; g < gates; ++g) {
    Lit a = pick(rng, pool), b = pick(rng, pool);
    pool.push_back(n.make_and(a, b));
  }
  size_t tail = std::min<size_t>(pool.size(), inputs + gates / 2 + 1);
  for (unsigned o = 0; o < outputs; ++o) {
    Lit l = pool[pool.size() - 1 - rng() % tail];
    n.add_output("o" + std::to_string(o), (rng() & 1) ? lit_not(l) : l);
  }
  scalar_ports(n);
  return n;
}

Netlist rewrite_equivalent(const Netlist& n, Rng& rng) {
  Netlist dst;
  std::vector<Lit> base(n.nodes.size(), modbench::kFalse);
  for (const auto& in : n.inputs) base[in.node] = dst.add_input(in.name);
  for (const auto& r : n.registers) base[r.node] = dst.register_lit(dst.add_register(r.name, r.clock, r.reset_value));

  auto noisy = [&rng](Netlist& d, uint32_t, Lit a, Lit b) -> Lit {
    switch (rng() % 4) {
      case 0: return d.make_and(d.make_or(a, b), d.make_xnor(a, b));
      case 1: return d.make_and(d.make_and(a, b), d.make_or(a, b));
      default: return d.make_and(a, b);
    }
  };
  std::vector<Lit> whole = base, hi = base, lo = base;
  copy_gates(n, dst, whole, noisy);
  std::optional<uint32_t> split;
  if (!n.inputs.empty()) {
    split = n.inputs[rng() % n.inputs.size()].node;
    hi[*split] = modbench::kTrue;
    lo[*split] = modbench::kFalse;
    copy_gates(n, dst, hi, noisy);
    copy_gates(n, dst, lo, noisy);
  }
  auto image = [&](Lit l) {
    if (!split) return mapped(whole, l);
    return dst.make_mux(base[*split], mapped(hi, l), mapped(lo, l));
  };
  for (size_t k = 0; k < n.registers.size(); ++k) dst.registers[k].next = image(n.registers[k].next);
  for (const auto& o : n.outputs) dst.add_output(o.name, image(o.lit));
  dst.ports = n.ports;
  return dst;
}

Netlist mutate_gate(const Netlist& n, Rng& rng) {
  std::vector<uint32_t> ands;
  for (uint32_t i = 0; i < n.nodes.size(); ++i)
    if (n.nodes[i].kind == NodeKind::And) ands.push_back(i);
  if (ands.empty()) return rebuild(n);
  uint32_t target = ands[rng() % ands.size()];
  unsigned kind = rng() % 4;
  uint64_t salt = rng();
  std::vector<Lit> seen;
  return rebuild(n, [&](Netlist& d, uint32_t node, Lit a, Lit b) -> Lit {
    Lit out;
    if (node != target) {
      out = d.make_and(a, b);
    } else {
      switch (kind) {
        case 0: out = d.make_and(lit_not(a), b); break;
        case 1: out = d.make_and(a, lit_not(b)); break;
        case 2: out = d.make_or(a, b); break;
        default: {
          Lit other = seen.empty() ? modbench::kTrue : seen[salt % seen.size()];
          out = d.make_and(a, (salt >> 32) & 1 ? lit_not(other) : other);
        }
      }
    }
    seen.push_back(out);
    return out;
  });
}

Netlist random_fsm(Rng& rng, unsigned inputs, unsigned state_bits, unsigned outputs, unsigned gates_per_fn) {
  Netlist n;
  std::vector<Lit> base;
  for (unsigned i = 0; i < inputs; ++i) base.push_back(n.add_input("i" + std::to_string(i)));
  for (unsigned s = 0; s < state_bits; ++s)
    base.push_back(n.register_lit(n.add_register("s" + std::to_string(s), "clk", rng() & 1)));
  auto function = [&]() {
    std::vector<Lit> pool = base;
    for (unsigned g = 0; g < gates_per_fn; ++g) pool.push_back(n.make_and(pick(rng, pool), pick(rng, pool)));
    Lit l = pool.back();
    return (rng() & 1) ? lit_not(l) : l;
  };
  for (unsigned s = 0; s < state_bits; ++s) n.registers[s].next = function();
  for (unsigned o = 0; o < outputs; ++o) n.add_output("o" + std::to_string(o), function());
  scalar_ports(n);
  return n;
}

Netlist reencode(const Netlist& n, Rng& rng) {
  Netlist dst;
  std::vector<Lit> map(n.nodes.size(), modbench::kFalse);
  for (const auto& in : n.inputs) map[in.node] = dst.add_input(in.name);
  size_t flip = n.registers.empty() ? 0 : rng() % n.registers.size();
  for (size_t k = 0; k < n.registers.size(); ++k) {
    const auto& r = n.registers[k];
    bool inv = k == flip;
    size_t d = dst.add_register("q" + std::to_string(k), r.clock, r.reset_value != inv);
    map[r.node] = inv ? lit_not(dst.register_lit(d)) : dst.register_lit(d);
  }
  copy_gates(n, dst, map, {});
  for (size_t k = 0; k < n.registers.size(); ++k) {
    Lit next = mapped(map, n.registers[k].next);
    dst.registers[k].next = k == flip ? lit_not(next) : next;
  }
  for (const auto& o : n.outputs) dst.add_output(o.name, mapped(map, o.lit));
  dst.ports = n.ports;
  return dst;
}

Eval eval_netlist(const Netlist& n, const std::vector<bool>& in, const std::vector<bool>& state) {
  std::vector<char> v(n.nodes.size(), 0);
  for (size_t i = 0; i < n.inputs.size(); ++i) v[n.inputs[i].node] = in[i];
  for (size_t r = 0; r < n.registers.size(); ++r) v[n.registers[r].node] = state[r];
  auto val = [&](Lit l) -> bool { return v[lit_node(l)] != lit_neg(l); };
  for (size_t i = 0; i < n.nodes.size(); ++i)
    if (n.nodes[i].kind == NodeKind::And) v[i] = val(n.nodes[i].fanin0) && val(n.nodes[i].fanin1);
  Eval e;
  for (const auto& o : n.outputs) e.outputs.push_back(val(o.lit));
  for (const auto& r : n.registers) e.next.push_back(val(r.next));
  return e;
}

std::vector<std::vector<bool>> truth_table(const Netlist& n) {
  std::vector<std::vector<bool>> rows;
  size_t ni = n.inputs.size();
  for (uint64_t a = 0; a < (uint64_t{1} << ni); ++a) {
    std::vector<bool> in(ni);
    for (size_t i = 0; i < ni; ++i) in[i] = (a >> i) & 1;
    rows.push_back(eval_netlist(n, in, {}).outputs);
  }
  return rows;
}

namespace {

std::vector<bool> reset_state(const Netlist& n) {
  std::vector<bool> s;
  for (const auto& r : n.registers) s.push_back(r.reset_value);
  return s;
}

uint64_t pack(const std::vector<bool>& a, const std::vector<bool>& b) {
  uint64_t x = 0;
  for (size_t i = 0; i < a.size(); ++i) x |= uint64_t{a[i]} << i;
  for (size_t i = 0; i < b.size(); ++i) x |= uint64_t{b[i]} << (a.size() + i);
  return x;
}

// b's input bit i takes a's input bit perm[i], matched by name.
std::vector<size_t> input_perm(const Netlist& a, const Netlist& b) {
  std::vector<size_t> perm;
  for (const auto& bi : b.inputs) {
    size_t j = 0;
    while (j < a.inputs.size() && a.inputs[j].name != bi.name) ++j;
    perm.push_back(j);
  }
  return perm;
}

}  // namespace

std::optional<std::vector<uint64_t>> distinguishing_trace(const Netlist& a, const Netlist& b) {
  size_t ni = a.inputs.size();
  auto perm = input_perm(a, b);
  struct Visit {
    uint64_t parent;
    uint64_t input;
  };
  std::unordered_map<uint64_t, Visit> seen;
  std::deque<std::pair<std::vector<bool>, std::vector<bool>>> queue;
  auto s0a = reset_state(a), s0b = reset_state(b);
  uint64_t root = pack(s0a, s0b);
  seen[root] = {root, 0};
  queue.emplace_back(s0a, s0b);
  auto path_to = [&](uint64_t key) {
    std::vector<uint64_t> p;
    while (key != root) {
      p.push_back(seen[key].input);
      key = seen[key].parent;
    }
    return std::vector<uint64_t>(p.rbegin(), p.rend());
  };
  while (!queue.empty()) {
    auto [sa, sb] = queue.front();
    queue.pop_front();
    uint64_t key = pack(sa, sb);
    for (uint64_t x = 0; x < (uint64_t{1} << ni); ++x) {
      std::vector<bool> ia(ni), ib(b.inputs.size());
      for (size_t i = 0; i < ni; ++i) ia[i] = (x >> i) & 1;
      for (size_t i = 0; i < ib.size(); ++i) ib[i] = perm[i] < ni && ia[perm[i]];
      Eval ea = eval_netlist(a, ia, sa), eb = eval_netlist(b, ib, sb);
      if (ea.outputs != eb.outputs) {
        auto p = path_to(key);
        p.push_back(x);
        return p;
      }
      uint64_t nk = pack(ea.next, eb.next);
      if (seen.count(nk)) continue;
      seen[nk] = {key, x};
      queue.emplace_back(ea.next, eb.next);
    }
  }
  return std::nullopt;
}

std::vector<std::vector<bool>> run_trace(const Netlist& n, const Stimulus& stim) {
  std::vector<std::vector<bool>> out;
  std::vector<bool> state = reset_state(n);
  for (const auto& cycle : stim) {
    std::vector<bool> in(n.inputs.size());
    for (const auto& p : n.ports) {
      if (p.direction != modbench::ast::Direction::In) continue;
      auto it = cycle.find(p.name);
      if (it == cycle.end()) continue;
      for (uint32_t k = 0; k < p.bits.size(); ++k) in[p.bits[k]] = it->second.bit(k);
    }
    Eval e = eval_netlist(n, in, state);
    out.push_back(e.outputs);
    state = e.next;
  }
  return out;
}

bool brute_force_sat(unsigned vars, const std::vector<std::vector<int>>& clauses) {
  for (uint64_t a = 0; a < (uint64_t{1} << vars); ++a) {
    bool all = true;
    for (const auto& c : clauses) {
      bool any = false;
      for (int l : c) {
        bool v = (a >> (std::abs(l) - 1)) & 1;
        if ((l > 0) == v) {
          any = true;
          break;
        }
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

std::vector<SourceMutation> operator_mutations(const std::string& src, size_t body_begin) {
  static const std::map<std::string, std::string, std::less<>> swaps = {
      {"&", "|"},   {"|", "&"},   {"^", "~^"},  {"~^", "^"},  {"^~", "^"},  {"&&", "||"}, {"||", "&&"},
      {"+", "-"},   {"-", "+"},   {"==", "!="}, {"!=", "=="}, {"<", ">="},  {">", "<="},  {">=", "<"},
      {"~", ""},    {"!", ""},    {"~&", "&"},  {"~|", "|"},
  };
  std::vector<SourceMutation> out;
  int depth = 0;
  for (const auto& t : modbench::lex(src)) {
    if (t.kind != modbench::TokKind::Op) continue;
    if (t.text == "[" || t.text == "{") ++depth;
    if (t.text == "]" || t.text == "}") --depth;
    if (t.offset < body_begin || t.text == "[" || t.text == "]") continue;
    if (depth > 0 && t.text != "{" && t.text != "}") {
      // concatenation members are fair game, bracketed widths are not
      bool in_index = false;
      int d = 0;
      for (size_t i = t.offset; i-- > body_begin;) {
        char c = src[i];
        if (c == ']' || c == '}') ++d;
        if (c == '[' || c == '{') {
          if (d == 0) {
            in_index = c == '[';
            break;
          }
          --d;
        }
      }
      if (in_index) continue;
    }
    auto it = swaps.find(t.text);
    if (it != swaps.end()) out.push_back({t.offset, t.text.size(), it->second});
  }
  return out;
}

std::string apply(const std::string& s, const SourceMutation& m) {
  return s.substr(0, m.offset) + m.replacement + s.substr(m.offset + m.length);
}

std::string random_design(Rng& rng, unsigned modules, const std::string& prefix) {
  static const char* ops[] = {"&", "|", "^", "+", "-"};
  struct Made {
    std::string name;
    unsigned width;
    bool clocked;
  };
  std::vector<Made> made;
  std::ostringstream os;
  for (unsigned m = 0; m < modules; ++m) {
    std::string name = prefix + "_m" + std::to_string(m);
    unsigned w = 1 + rng() % 8;
    std::optional<Made> sub;
    if (!made.empty() && rng() % 2) sub = made[rng() % made.size()];
    bool clocked = (sub && sub->clocked) || rng() % 3 == 0;
    if (rng() % 2) os << "// block " << m << "\n";
    os << "module " << name << " (\n";
    if (clocked) os << "    input wire clk,\n    input wire rst,\n";
    os << "    input wire [" << w - 1 << ":0] a,\n";
    os << "    input wire [" << w - 1 << ":0] b,\n";
    os << "    output wire [" << w - 1 << ":0] y\n);\n";
    std::string expr = std::string("a ") + ops[rng() % 5] + " b";
    if (sub) {
      os << "  wire [" << sub->width - 1 << ":0] t;\n";
      os << "  " << sub->name << " u_" << m << " (";
      if (sub->clocked) os << ".clk(clk), .rst(rst), ";
      os << ".a(a), .b(b), .y(t));\n";
      expr += std::string(" ") + ops[rng() % 5] + " t";
    }
    if (clocked) {
      os << "  reg [" << w - 1 << ":0] q;\n";
      os << "  always @(posedge clk) begin\n    if (rst) q <= 0;\n    else q <= " << expr << ";\n  end\n";
      os << "  assign y = q;\n";
    } else {
      os << "  assign y = " << expr << ";\n";
    }
    os << "endmodule\n\n";
    made.push_back({name, w, clocked});
  }
  return os.str();
}

}  // namespace oracle
