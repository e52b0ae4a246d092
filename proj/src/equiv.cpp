#include "modbench/equiv.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace modbench {

namespace {

using NodeMap = std::vector<Lit>;

// Copies `src` into `dst`, with src input i driven by input_lits[i].
NodeMap copy_into(Netlist& dst, const Netlist& src, const std::vector<Lit>& input_lits, const std::string& prefix) {
  NodeMap map(src.nodes.size(), kFalse);
  for (size_t i = 0; i < src.inputs.size(); ++i) map[src.inputs[i].node] = input_lits[i];
  size_t base = dst.registers.size();
  for (const auto& r : src.registers) {
    size_t idx = dst.add_register(prefix + r.name, r.clock, r.reset_value);
    map[r.node] = dst.register_lit(idx);
  }
  auto tr = [&](Lit l) { return map[lit_node(l)] ^ (l & 1u); };
  for (uint32_t id : topological_order(src)) {
    const Node& n = src.nodes[id];
    if (n.kind == NodeKind::And) map[id] = dst.make_and(tr(n.fanin0), tr(n.fanin1));
  }
  for (size_t r = 0; r < src.registers.size(); ++r) dst.registers[base + r].next = tr(src.registers[r].next);
  return map;
}

const char* dir_name(ast::Direction d) {
  switch (d) {
    case ast::Direction::In: return "input";
    case ast::Direction::Out: return "output";
    case ast::Direction::InOut: return "inout";
  }
  return "?";
}

// Lazily Tseitin-encodes time frames of a netlist into a solver. Frame f+1
// register outputs are the frame f next-state literals.
class Unroller {
 public:
  enum class Init { Reset, Free };

  Unroller(sat::Solver& s, const Netlist& n, Init init, const std::vector<std::pair<size_t, size_t>>* shared = nullptr)
      : s_(s), n_(n), init_(init), reg_of_(n.nodes.size(), -1), alias_(n.nodes.size(), UINT32_MAX) {
    true_var_ = s_.new_var();
    s_.add_clause({true_var_});
    for (size_t r = 0; r < n.registers.size(); ++r) reg_of_[n.registers[r].node] = static_cast<int>(r);
    if (shared) {
      for (auto [a, b] : *shared) {
        alias_[n.registers[a].node] = n.registers[b].node;
        alias_[n.registers[b].node] = n.registers[a].node;
      }
    }
  }

  int lit(uint32_t frame, Lit l) {
    int v = node(frame, lit_node(l));
    return lit_neg(l) ? -v : v;
  }

  // Model value of `l` in `frame`; unencoded nodes read as 0.
  bool value(uint32_t frame, Lit l) const {
    uint32_t id = lit_node(l);
    bool v = false;
    if (frame < enc_.size() && enc_[frame][id] != 0) {
      int e = enc_[frame][id];
      v = s_.model_value(std::abs(e)) != (e < 0);
    }
    return v != lit_neg(l);
  }

  bool encoded(uint32_t frame, uint32_t id) const { return frame < enc_.size() && enc_[frame][id] != 0; }

 private:
  int node(uint32_t frame, uint32_t root) {
    while (enc_.size() <= frame) enc_.emplace_back(n_.nodes.size(), 0);
    if (enc_[frame][root] != 0) return enc_[frame][root];
    std::vector<std::pair<uint32_t, uint32_t>> stack{{frame, root}};
    while (!stack.empty()) {
      auto [f, id] = stack.back();
      if (enc_[f][id] != 0) {
        stack.pop_back();
        continue;
      }
      const Node& nd = n_.nodes[id];
      int out = 0;
      switch (nd.kind) {
        case NodeKind::Const: out = -true_var_; break;
        case NodeKind::Input: out = s_.new_var(); break;
        case NodeKind::Latch: {
          int r = reg_of_[id];
          if (r < 0) {
            out = s_.new_var();
          } else if (f == 0) {
            if (init_ == Init::Reset) {
              out = n_.registers[static_cast<size_t>(r)].reset_value ? true_var_ : -true_var_;
            } else if (alias_[id] != UINT32_MAX && enc_[0][alias_[id]] != 0) {
              out = enc_[0][alias_[id]];
            } else {
              out = s_.new_var();
            }
          } else {
            Lit nx = n_.registers[static_cast<size_t>(r)].next;
            int prev = enc_[f - 1][lit_node(nx)];
            if (prev == 0) {
              stack.emplace_back(f - 1, lit_node(nx));
              continue;
            }
            out = lit_neg(nx) ? -prev : prev;
          }
          break;
        }
        case NodeKind::And: {
          int a = enc_[f][lit_node(nd.fanin0)];
          int b = enc_[f][lit_node(nd.fanin1)];
          if (a == 0 || b == 0) {
            if (a == 0) stack.emplace_back(f, lit_node(nd.fanin0));
            if (b == 0) stack.emplace_back(f, lit_node(nd.fanin1));
            continue;
          }
          if (lit_neg(nd.fanin0)) a = -a;
          if (lit_neg(nd.fanin1)) b = -b;
          out = s_.new_var();
          s_.add_clause({-out, a});
          s_.add_clause({-out, b});
          s_.add_clause({out, -a, -b});
          break;
        }
      }
      enc_[f][id] = out;
      stack.pop_back();
    }
    return enc_[frame][root];
  }

  sat::Solver& s_;
  const Netlist& n_;
  Init init_;
  int true_var_ = 0;
  std::vector<int> reg_of_;
  std::vector<uint32_t> alias_;
  std::vector<std::vector<int>> enc_;
};

std::vector<std::map<std::string, BitVec>> extract_stimulus(const Miter& m, const Unroller& u, uint32_t last) {
  std::vector<std::map<std::string, BitVec>> out;
  for (uint32_t f = 0; f <= last; ++f) {
    std::map<std::string, BitVec> cycle;
    for (const auto& p : m.input_ports) {
      BitVec v(p.width);
      for (uint32_t j = 0; j < p.bits.size(); ++j) v.set_bit(j, u.value(f, make_lit(m.net.inputs[p.bits[j]].node)));
      cycle.emplace(p.name, v);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

void add_stats(sat::Stats& into, const sat::Stats& s) {
  into.conflicts += s.conflicts;
  into.decisions += s.decisions;
  into.propagations += s.propagations;
  into.restarts += s.restarts;
  into.solves += s.solves;
}

Verdict overall(const std::vector<Verdict>& bits) {
  bool unknown = false;
  for (Verdict v : bits) {
    if (v == Verdict::NotEquivalent) return v;
    if (v == Verdict::Unknown) unknown = true;
  }
  return unknown ? Verdict::Unknown : Verdict::Equivalent;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Equivalent: return "equivalent";
    case Verdict::NotEquivalent: return "not_equivalent";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

Miter build_miter(const Netlist& golden, const Netlist& candidate) {
  std::vector<std::string> problems;
  for (const auto& gp : golden.ports) {
    const Port* cp = candidate.find_port(gp.name);
    if (!cp) {
      problems.push_back("missing port '" + gp.name + "'");
    } else if (cp->direction != gp.direction) {
      problems.push_back("port '" + gp.name + "' is " + dir_name(cp->direction) + ", expected " +
                         dir_name(gp.direction));
    } else if (cp->width != gp.width) {
      problems.push_back("port '" + gp.name + "' has width " + std::to_string(cp->width) + ", expected " +
                         std::to_string(gp.width));
    }
  }
  for (const auto& cp : candidate.ports)
    if (!golden.find_port(cp.name)) problems.push_back("extra port '" + cp.name + "'");
  if (!problems.empty()) {
    std::string msg = "interface mismatch: ";
    for (size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw InterfaceError(msg);
  }

  Miter m;
  std::vector<Lit> g_in(golden.inputs.size(), kFalse), c_in(candidate.inputs.size(), kFalse);
  std::vector<uint8_t> g_seen(golden.inputs.size(), 0), c_seen(candidate.inputs.size(), 0);
  for (const auto& gp : golden.ports) {
    if (gp.direction != ast::Direction::In) continue;
    const Port* cp = candidate.find_port(gp.name);
    Port p{gp.name, gp.direction, gp.width, {}};
    for (size_t j = 0; j < gp.bits.size(); ++j) {
      p.bits.push_back(static_cast<uint32_t>(m.net.inputs.size()));
      Lit l = m.net.add_input(golden.inputs[gp.bits[j]].name);
      g_in[gp.bits[j]] = l;
      c_in[cp->bits[j]] = l;
      g_seen[gp.bits[j]] = c_seen[cp->bits[j]] = 1;
    }
    m.input_ports.push_back(std::move(p));
  }
  // Inputs outside any port still need a source.
  for (size_t i = 0; i < g_in.size(); ++i)
    if (!g_seen[i]) g_in[i] = m.net.add_input("golden/" + golden.inputs[i].name);
  for (size_t i = 0; i < c_in.size(); ++i)
    if (!c_seen[i]) c_in[i] = m.net.add_input("candidate/" + candidate.inputs[i].name);

  NodeMap gmap = copy_into(m.net, golden, g_in, "golden/");
  m.golden_regs = m.net.registers.size();
  NodeMap cmap = copy_into(m.net, candidate, c_in, "candidate/");

  for (const auto& gp : golden.ports) {
    if (gp.direction != ast::Direction::Out) continue;
    const Port* cp = candidate.find_port(gp.name);
    for (size_t j = 0; j < gp.bits.size(); ++j) {
      Lit gl = golden.outputs[gp.bits[j]].lit;
      Lit cl = candidate.outputs[cp->bits[j]].lit;
      Lit a = gmap[lit_node(gl)] ^ (gl & 1u);
      Lit b = cmap[lit_node(cl)] ^ (cl & 1u);
      m.out_names.push_back(golden.outputs[gp.bits[j]].name);
      m.golden_out.push_back(a);
      m.cand_out.push_back(b);
      m.eq.push_back(m.net.make_xnor(a, b));
    }
  }
  m.eq_all = m.net.make_and_all(m.eq);
  for (size_t i = 0; i < m.eq.size(); ++i) m.net.add_output("eq:" + m.out_names[i], m.eq[i]);

  std::unordered_map<std::string, size_t> by_name;
  for (size_t r = 0; r < candidate.registers.size(); ++r) by_name.emplace(candidate.registers[r].name, r);
  bool resets_agree = true;
  for (size_t r = 0; r < golden.registers.size(); ++r) {
    auto it = by_name.find(golden.registers[r].name);
    if (it == by_name.end()) continue;
    size_t a = r, b = m.golden_regs + it->second;
    m.matched.emplace_back(a, b);
    const auto& ra = m.net.registers[a];
    const auto& rb = m.net.registers[b];
    if (ra.reset_value != rb.reset_value) resets_agree = false;
    m.state_eq.push_back(m.net.make_xnor(m.net.register_lit(a), m.net.register_lit(b)));
    m.next_eq.push_back(m.net.make_xnor(ra.next, rb.next));
  }
  m.fully_matched = resets_agree && m.matched.size() == golden.registers.size() &&
                    m.matched.size() == candidate.registers.size();
  return m;
}

sat::Cnf tseitin(const Netlist& n) {
  sat::Cnf f;
  f.num_vars = static_cast<int>(n.nodes.size());
  f.clauses.push_back({-1});
  auto v = [](Lit l) {
    int x = static_cast<int>(lit_node(l)) + 1;
    return lit_neg(l) ? -x : x;
  };
  for (uint32_t id = 0; id < n.nodes.size(); ++id) {
    const Node& nd = n.nodes[id];
    if (nd.kind != NodeKind::And) continue;
    int o = static_cast<int>(id) + 1;
    f.clauses.push_back({-o, v(nd.fanin0)});
    f.clauses.push_back({-o, v(nd.fanin1)});
    f.clauses.push_back({o, -v(nd.fanin0), -v(nd.fanin1)});
  }
  return f;
}

CheckResult check_combinational(const Miter& m, const EquivOptions& opt) {
  CheckResult res;
  res.method = "combinational";
  sat::Solver s;
  Unroller u(s, m.net, Unroller::Init::Free, &m.matched);
  for (size_t i = 0; i < m.eq.size(); ++i) {
    if (m.eq[i] == kTrue) {
      res.bits.push_back(Verdict::Equivalent);
      continue;
    }
    int l = u.lit(0, m.eq[i]);
    ++res.queries;
    switch (s.solve({-l}, opt.conflict_budget)) {
      case sat::Verdict::Unsat:
        res.bits.push_back(Verdict::Equivalent);
        s.add_clause({l});
        break;
      case sat::Verdict::Sat:
        res.bits.push_back(Verdict::NotEquivalent);
        if (!res.stimulus) res.stimulus = extract_stimulus(m, u, 0);
        break;
      case sat::Verdict::Unknown:
        res.bits.push_back(Verdict::Unknown);
        res.note = "conflict budget exhausted";
        break;
    }
  }
  res.verdict = overall(res.bits);
  add_stats(res.stats, s.stats());
  return res;
}

CheckResult check_inductive(const Miter& m, const EquivOptions& opt) {
  CheckResult res;
  res.method = "k-induction";
  const size_t n_out = m.eq.size();
  std::vector<Lit> cands = m.eq;
  cands.insert(cands.end(), m.state_eq.begin(), m.state_eq.end());
  const uint32_t k = std::max(1u, opt.k);

  std::vector<uint8_t> alive(cands.size(), 1);
  std::vector<uint8_t> failed(n_out, 0);
  bool base_complete = true;
  {
    sat::Solver s;
    Unroller u(s, m.net, Unroller::Init::Reset);
    for (uint32_t t = 0; t < k && base_complete; ++t) {
      for (;;) {
        std::vector<size_t> idx;
        std::vector<int> lits;
        for (size_t c = 0; c < cands.size(); ++c) {
          if (!alive[c] || cands[c] == kTrue) continue;
          idx.push_back(c);
          lits.push_back(u.lit(t, cands[c]));
        }
        if (idx.empty()) break;
        int act = s.new_var();
        std::vector<int> clause{-act};
        for (int l : lits) clause.push_back(-l);
        s.add_clause(clause);
        ++res.queries;
        sat::Verdict v = s.solve({act}, opt.conflict_budget);
        if (v == sat::Verdict::Unsat) {
          s.add_clause({-act});
          for (int l : lits) s.add_clause({l});
          break;
        }
        if (v == sat::Verdict::Unknown) {
          base_complete = false;
          res.note = "conflict budget exhausted in base case at cycle " + std::to_string(t);
          break;
        }
        for (size_t c : idx) {
          if (u.value(t, cands[c])) continue;
          alive[c] = 0;
          if (c < n_out) {
            failed[c] = 1;
            if (!res.stimulus) res.stimulus = extract_stimulus(m, u, t);
          }
        }
        s.add_clause({-act});
      }
    }
    add_stats(res.stats, s.stats());
  }

  std::vector<uint8_t> proven(cands.size(), 0);
  for (size_t c = 0; c < cands.size(); ++c)
    if (alive[c] && cands[c] == kTrue) proven[c] = 1;
  if (base_complete) {
    sat::Solver s;
    Unroller u(s, m.net, Unroller::Init::Free);
    std::vector<size_t> g;
    for (size_t c = 0; c < cands.size(); ++c)
      if (alive[c] && cands[c] != kTrue) g.push_back(c);
    auto has_output = [&] { return std::any_of(g.begin(), g.end(), [&](size_t c) { return c < n_out; }); };
    while (has_output()) {
      std::vector<int> assumptions;
      for (uint32_t t = 0; t < k; ++t)
        for (size_t c : g) assumptions.push_back(u.lit(t, cands[c]));
      int act = s.new_var();
      std::vector<int> clause{-act};
      for (size_t c : g) clause.push_back(-u.lit(k, cands[c]));
      s.add_clause(clause);
      assumptions.push_back(act);
      ++res.queries;
      sat::Verdict v = s.solve(assumptions, opt.conflict_budget);
      if (v == sat::Verdict::Unsat) {
        for (size_t c : g) proven[c] = 1;
        break;
      }
      if (v == sat::Verdict::Unknown) {
        res.note = "conflict budget exhausted in induction step";
        break;
      }
      std::vector<size_t> keep;
      for (size_t c : g)
        if (u.value(k, cands[c])) keep.push_back(c);
      g.swap(keep);
      s.add_clause({-act});
    }
    add_stats(res.stats, s.stats());
  }

  for (size_t i = 0; i < n_out; ++i) {
    if (failed[i]) res.bits.push_back(Verdict::NotEquivalent);
    else if (proven[i]) res.bits.push_back(Verdict::Equivalent);
    else res.bits.push_back(Verdict::Unknown);
  }
  res.verdict = overall(res.bits);
  if (res.verdict == Verdict::Unknown && res.note.empty())
    res.note = "induction step failed at depth " + std::to_string(k);
  return res;
}

CheckResult check_equivalence(const Miter& m, const EquivOptions& opt) {
  if (m.net.registers.empty()) return check_combinational(m, opt);
  CheckResult cut;
  if (m.fully_matched) {
    cut = check_combinational(m, opt);
    cut.method = "cut-point";
    if (cut.verdict == Verdict::Equivalent) {
      sat::Solver s;
      Unroller u(s, m.net, Unroller::Init::Free, &m.matched);
      for (Lit l : m.next_eq) {
        if (l == kTrue) continue;
        ++cut.queries;
        if (s.solve({-u.lit(0, l)}, opt.conflict_budget) != sat::Verdict::Unsat) {
          cut.verdict = Verdict::Unknown;
          break;
        }
      }
      add_stats(cut.stats, s.stats());
      if (cut.verdict == Verdict::Equivalent) return cut;
    }
  }
  CheckResult res = check_inductive(m, opt);
  res.queries += cut.queries;
  add_stats(res.stats, cut.stats);
  return res;
}

double partition_coverage(const std::vector<Verdict>& verdicts, const std::vector<uint64_t>& weights) {
  if (verdicts.size() != weights.size()) throw Error("partition_coverage: verdict and weight counts differ");
  uint64_t total = 0, good = 0;
  for (size_t i = 0; i < verdicts.size(); ++i) {
    uint64_t w = std::max<uint64_t>(1, weights[i]);
    total += w;
    if (verdicts[i] == Verdict::Equivalent) good += w;
  }
  if (total == 0) throw Error("partition_coverage: no partitions");
  return 100.0 * static_cast<double>(good) / static_cast<double>(total);
}

std::vector<uint64_t> partition_weights(const Netlist& golden) {
  std::vector<uint64_t> w;
  for (const auto& p : golden.ports) {
    if (p.direction != ast::Direction::Out) continue;
    for (uint32_t b : p.bits) w.push_back(std::max<uint64_t>(1, golden.coi_size(golden.outputs[b].lit)));
  }
  return w;
}

Replay replay(const Netlist& golden, const Netlist& candidate,
              const std::vector<std::map<std::string, BitVec>>& stimulus) {
  Replay r;
  r.golden.inputs = stimulus;
  r.golden.outputs = simulate(golden, stimulus);
  r.candidate = simulate(candidate, stimulus);
  for (size_t c = 0; c < stimulus.size() && !r.mismatch; ++c) {
    for (const auto& [name, v] : r.golden.outputs[c]) {
      auto it = r.candidate[c].find(name);
      if (it == r.candidate[c].end() || it->second != v) {
        r.mismatch = true;
        r.cycle = c;
        r.outputs.push_back(name);
      }
    }
  }
  return r;
}

std::string format_counterexample(const Replay& r) {
  std::ostringstream os;
  auto put = [&](const std::map<std::string, BitVec>& vals) {
    for (const auto& [name, v] : vals) os << " " << name << "=" << v.width() << "'h" << v.to_hex();
  };
  for (size_t c = 0; c < r.golden.inputs.size(); ++c) {
    os << "cycle " << c << ":";
    put(r.golden.inputs[c]);
    os << " | golden:";
    put(r.golden.outputs[c]);
    os << " | candidate:";
    put(r.candidate[c]);
    if (r.mismatch && c == r.cycle) os << "  <- mismatch";
    os << "\n";
  }
  return os.str();
}

}  // namespace modbench
