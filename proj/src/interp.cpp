#include "modbench/interp.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "modbench/error.hpp"

namespace modbench {

using ast::Expr;
using ast::ExprKind;
using ast::Stmt;
using ast::StmtKind;
using sema::SignalInfo;
using sema::Type;

namespace {

struct Inst;

struct Process {
  enum Kind { Assign, DeclInit, Comb, ChildIn, ChildOut } kind;
  Inst* inst;
  const Expr* lhs = nullptr;
  const Expr* rhs = nullptr;
  const ast::Always* always = nullptr;
  Inst* child = nullptr;
  size_t port = 0;
};

struct Inst {
  const ast::ModuleDecl* m = nullptr;
  sema::ParamEnv params;
  sema::SignalTable sigs;
  std::unique_ptr<sema::Typer> typer;
  std::map<std::string, BitVec, std::less<>> values;
  std::map<std::string, BitVec, std::less<>> initial;
  std::vector<const ast::Always*> clocked;
  std::vector<std::unique_ptr<Inst>> children;
};

// Overlay used while a clocked block runs: reads see blocking writes made
// earlier in the same block; the final values are committed after every
// block has run.
struct Frame {
  std::map<std::string, BitVec, std::less<>> local;
  std::map<std::string, BitVec, std::less<>> pending;
};

int64_t to_int(const BitVec& v, bool is_signed) {
  if (!is_signed) {
    for (uint32_t i = 63; i < v.width(); ++i)
      if (v.bit(i)) return INT64_MAX;
    return static_cast<int64_t>(v.to_u64());
  }
  return v.to_i64();
}

class Evaluator {
 public:
  Evaluator(Inst& in, Frame* frame) : in_(in), frame_(frame) {}

  BitVec self(const Expr& e) {
    Type t = in_.typer->type_of(e);
    return eval(e, t.width, t.is_signed);
  }

  BitVec assignment(const Expr& rhs, uint32_t width) {
    Type t = in_.typer->type_of(rhs);
    return eval(rhs, std::max(width, t.width), t.is_signed).resized(width);
  }

  BitVec eval(const Expr& e, uint32_t W, bool S) {
    switch (e.kind) {
      case ExprKind::Number: {
        if (!e.num.xz.is_zero()) throw ElabError("x/z literal");
        Type t = in_.typer->type_of(e);
        return e.num.value.resized(t.width, e.num.is_signed).resized(W, S);
      }
      case ExprKind::Ident:
        return named(e.name).resized(W, S);
      case ExprKind::Index:
      case ExprKind::Range:
      case ExprKind::IndexedUp:
      case ExprKind::IndexedDown:
        return select(e).resized(W, false);
      case ExprKind::Unary: {
        const auto& op = e.name;
        if (op == "~") return ~eval(e.args[0], W, S);
        if (op == "+") return eval(e.args[0], W, S);
        if (op == "-") return eval(e.args[0], W, S).negated();
        BitVec a = self(e.args[0]);
        bool r;
        if (op == "!")
          r = a.is_zero();
        else if (op == "&")
          r = a.reduce_and();
        else if (op == "~&")
          r = !a.reduce_and();
        else if (op == "|")
          r = a.reduce_or();
        else if (op == "~|")
          r = !a.reduce_or();
        else if (op == "^")
          r = a.reduce_xor();
        else
          r = !a.reduce_xor();
        return BitVec(W, r ? 1 : 0);
      }
      case ExprKind::Binary:
        return binary(e, W, S);
      case ExprKind::Ternary:
        return self(e.args[0]).is_zero() ? eval(e.args[2], W, S) : eval(e.args[1], W, S);
      case ExprKind::Concat: {
        BitVec acc(0);
        for (const auto& a : e.args) acc = BitVec::concat(acc, self(a));
        return acc.resized(W, false);
      }
      case ExprKind::Replicate: {
        int64_t n = sema::const_eval(e.args[0], in_.params);
        BitVec one(0);
        for (size_t i = 1; i < e.args.size(); ++i) one = BitVec::concat(one, self(e.args[i]));
        BitVec acc(0);
        for (int64_t k = 0; k < n; ++k) acc = BitVec::concat(acc, one);
        return acc.resized(W, false);
      }
      case ExprKind::Call: {
        if (e.name == "$signed" || e.name == "$unsigned") return self(e.args[0]).resized(W, S);
        Type t = in_.typer->type_of(e);
        return BitVec(64, static_cast<uint64_t>(sema::const_eval(e, in_.params))).resized(t.width).resized(W, S);
      }
      case ExprKind::String:
        throw ElabError("string literal");
    }
    throw ElabError("unsupported expression");
  }

  const SignalInfo& layout(const std::string& name, SignalInfo& scratch) {
    if (auto it = in_.sigs.find(name); it != in_.sigs.end()) return it->second;
    const auto& p = in_.params.at(name);
    scratch.msb = p.width - 1;
    scratch.lsb = 0;
    scratch.width = p.width;
    scratch.is_signed = p.is_signed;
    return scratch;
  }

  BitVec named(const std::string& name) {
    if (frame_) {
      if (auto it = frame_->local.find(name); it != frame_->local.end()) return it->second;
    }
    if (auto it = in_.values.find(name); it != in_.values.end()) return it->second;
    if (auto it = in_.params.find(name); it != in_.params.end()) return it->second.bits();
    throw ElabError("unknown identifier '" + name + "'");
  }

  // Declared index of result bit j of a select, given an evaluated base.
  static int64_t select_index(ExprKind k, bool desc, int64_t base, int64_t w, int64_t j) {
    switch (k) {
      case ExprKind::IndexedUp:
        return desc ? base + j : base + w - 1 - j;
      case ExprKind::IndexedDown:
        return desc ? base - w + 1 + j : base - j;
      default:
        return base;
    }
  }

  // Positions (or -1) addressed by a select expression, LSB of result first.
  std::vector<int64_t> positions(const Expr& e, const SignalInfo& info) {
    std::vector<int64_t> out;
    bool desc = info.msb >= info.lsb;
    if (e.kind == ExprKind::Ident) {
      for (uint32_t p = 0; p < info.width; ++p) out.push_back(p);
      return out;
    }
    if (e.kind == ExprKind::Range) {
      int64_t hi = sema::const_eval(e.args[0], in_.params), lo = sema::const_eval(e.args[1], in_.params);
      int64_t n = std::llabs(hi - lo) + 1;
      int64_t step = hi >= lo ? 1 : -1;
      for (int64_t j = 0; j < n; ++j) out.push_back(info.position(lo + j * step));
      return out;
    }
    Type it = in_.typer->type_of(e.args[0]);
    int64_t base = to_int(self(e.args[0]), it.is_signed);
    int64_t w = e.kind == ExprKind::Index ? 1 : sema::const_eval(e.args[1], in_.params);
    for (int64_t j = 0; j < w; ++j) {
      if (base == INT64_MAX) {
        out.push_back(-1);
        continue;
      }
      out.push_back(info.position(select_index(e.kind, desc, base, w, j)));
    }
    return out;
  }

  BitVec select(const Expr& e) {
    SignalInfo scratch;
    const SignalInfo& info = layout(e.name, scratch);
    BitVec src = named(e.name);
    auto pos = positions(e, info);
    BitVec out(static_cast<uint32_t>(pos.size()));
    for (size_t j = 0; j < pos.size(); ++j)
      if (pos[j] >= 0) out.set_bit(static_cast<uint32_t>(j), src.bit(static_cast<uint32_t>(pos[j])));
    return out;
  }

  BitVec binary(const Expr& e, uint32_t W, bool S) {
    const auto& op = e.name;
    const Expr& x = e.args[0];
    const Expr& y = e.args[1];
    if (op == "/" || op == "%" || op == "**") {
      Type t = in_.typer->type_of(e);
      return BitVec(64, static_cast<uint64_t>(sema::const_eval(e, in_.params))).resized(t.width).resized(W, S);
    }
    if (op == "&") return eval(x, W, S) & eval(y, W, S);
    if (op == "|") return eval(x, W, S) | eval(y, W, S);
    if (op == "^") return eval(x, W, S) ^ eval(y, W, S);
    if (op == "~^" || op == "^~") return ~(eval(x, W, S) ^ eval(y, W, S));
    if (op == "+") return eval(x, W, S) + eval(y, W, S);
    if (op == "-") return eval(x, W, S) - eval(y, W, S);
    if (op == "*") return eval(x, W, S) * eval(y, W, S);
    if (sema::is_compare(op)) {
      Type tx = in_.typer->type_of(x), ty = in_.typer->type_of(y);
      uint32_t w = std::max(tx.width, ty.width);
      bool s = tx.is_signed && ty.is_signed;
      BitVec a = eval(x, w, s), b = eval(y, w, s);
      bool lt = s ? a.slt(b) : a.ult(b);
      bool gt = s ? b.slt(a) : b.ult(a);
      bool r;
      if (op == "==" || op == "===")
        r = a == b;
      else if (op == "!=" || op == "!==")
        r = !(a == b);
      else if (op == "<")
        r = lt;
      else if (op == ">")
        r = gt;
      else if (op == "<=")
        r = !gt;
      else
        r = !lt;
      return BitVec(W, r ? 1 : 0);
    }
    if (sema::is_shift(op)) {
      BitVec a = eval(x, W, S);
      BitVec amount = self(y);
      uint64_t amt = to_int(amount, false);
      if (op == "<<" || op == "<<<") return a.shl(amt);
      if (op == ">>>" && S) return a.ashr(amt);
      return a.lshr(amt);
    }
    if (op == "&&" || op == "||") {
      bool a = !self(x).is_zero();
      bool b = !self(y).is_zero();
      return BitVec(W, (op == "&&" ? (a && b) : (a || b)) ? 1 : 0);
    }
    throw ElabError("unsupported operator '" + op + "'");
  }

 private:
  Inst& in_;
  Frame* frame_;
};

// Writes `v` (LSB first, starting at `offset`) into an lvalue. `store`
// receives whole-signal values.
uint32_t write_lvalue(Inst& in, Evaluator& ev, const Expr& lhs, const BitVec& v, uint32_t offset,
                      const std::function<BitVec(const std::string&)>& current,
                      const std::function<void(const std::string&, const BitVec&)>& store) {
  if (lhs.kind == ExprKind::Concat) {
    uint32_t used = 0;
    for (auto it = lhs.args.rbegin(); it != lhs.args.rend(); ++it)
      used += write_lvalue(in, ev, *it, v, offset + used, current, store);
    return used;
  }
  std::string root = sema::lvalue_root(lhs);
  const SignalInfo& info = in.sigs.at(root);
  auto pos = ev.positions(lhs, info);
  BitVec val = current(root);
  for (size_t j = 0; j < pos.size(); ++j)
    if (pos[j] >= 0) val.set_bit(static_cast<uint32_t>(pos[j]), v.bit(offset + static_cast<uint32_t>(j)));
  store(root, val);
  return static_cast<uint32_t>(pos.size());
}

bool case_matches(Evaluator& ev, Inst& in, const Stmt& s, const BitVec& subject, uint32_t w, bool sign,
                  const Expr& label) {
  bool wildcard = s.text == "casez" || s.text == "casex";
  if (label.kind == ExprKind::Number && !label.num.xz.is_zero()) {
    if (!wildcard) return false;
    uint32_t lw = in.typer->type_of(label).width;
    bool sext = sign && label.num.is_signed;
    BitVec val = label.num.value.resized(lw);
    BitVec xz = label.num.xz.resized(lw);
    for (uint32_t b = 0; b < w; ++b) {
      if (b >= lw && !sext) {
        if (subject.bit(b)) return false;
        continue;
      }
      uint32_t src = std::min(b, lw - 1);
      if (xz.bit(src)) continue;
      if (val.bit(src) != subject.bit(b)) return false;
    }
    return true;
  }
  return ev.eval(label, w, sign) == subject;
}

class Machine {
 public:
  Machine(const ast::SourceUnit& unit, const std::string& top, const sema::ParamEnv& overrides) : unit_(unit) {
    const ast::ModuleDecl* m = unit.find(top);
    if (!m) throw ElabError("top module '" + top + "' not found");
    root_ = build(*m, sema::module_params(*m, overrides), 0);
    reset();
  }

  void reset() { reset_inst(*root_); }

  std::map<std::string, BitVec> step(const std::map<std::string, BitVec>& inputs) {
    for (const auto& p : root_->m->ports) {
      if (p.direction != ast::Direction::In) continue;
      auto it = inputs.find(p.name);
      if (it == inputs.end()) throw ElabError("no value for input '" + p.name + "'");
      root_->values[p.name] = it->second.resized(root_->sigs.at(p.name).width);
    }
    settle();
    std::map<std::string, BitVec> out;
    for (const auto& p : root_->m->ports)
      if (p.direction == ast::Direction::Out) out[p.name] = root_->values.at(p.name);
    clock_edge();
    return out;
  }

 private:
  std::unique_ptr<Inst> build(const ast::ModuleDecl& m, sema::ParamEnv params, int depth) {
    if (depth > 64) throw ElabError("instantiation too deep");
    auto in = std::make_unique<Inst>();
    in->m = &m;
    in->params = std::move(params);
    in->sigs = sema::module_signals(m, in->params);
    in->typer = std::make_unique<sema::Typer>(in->sigs, in->params);
    for (const auto& [name, info] : in->sigs) in->initial[name] = BitVec(info.width);
    Inst* self = in.get();
    bool any_clocked = false;
    for (const auto& item : m.items) {
      if (const auto* ca = std::get_if<ast::ContAssign>(&item.data)) {
        for (const auto& [l, r] : ca->assigns) procs_.push_back({Process::Assign, self, &l, &r});
      } else if (const auto* nd = std::get_if<ast::NetDecl>(&item.data)) {
        for (const auto& d : nd->names) {
          if (!d.init) continue;
          const SignalInfo& info = in->sigs.at(d.name);
          if (info.declared_reg) {
            Type t = in->typer->type_of(*d.init);
            in->initial[d.name] = BitVec(64, static_cast<uint64_t>(sema::const_eval(*d.init, in->params)))
                                      .resized(std::min<uint32_t>(t.width, 64))
                                      .resized(info.width, t.is_signed);
          } else {
            decl_lhs_.push_back(std::make_unique<Expr>());
            decl_lhs_.back()->kind = ExprKind::Ident;
            decl_lhs_.back()->name = d.name;
            procs_.push_back({Process::DeclInit, self, decl_lhs_.back().get(), &*d.init});
          }
        }
      } else if (const auto* a = std::get_if<ast::Always>(&item.data)) {
        sema::AlwaysInfo info = sema::analyze_always(*a, in->sigs);
        if (info.sequential) {
          in->clocked.push_back(a);
          any_clocked = true;
        } else {
          Process p{Process::Comb, self};
          p.always = a;
          procs_.push_back(p);
        }
      } else if (const auto* inst = std::get_if<ast::Instance>(&item.data)) {
        add_child(*in, *inst, depth);
      } else if (const auto* o = std::get_if<ast::Opaque>(&item.data)) {
        throw ElabError("unsupported construct '" + o->keyword + "'");
      }
    }
    if (any_clocked) {
      for (const auto& [name, v] : sema::register_reset_values(m, in->sigs, in->params)) in->initial[name] = v;
    }
    return in;
  }

  void add_child(Inst& parent, const ast::Instance& inst, int depth) {
    const ast::ModuleDecl* sub = unit_.find(inst.module);
    if (!sub) throw ElabError("unknown module '" + inst.module + "'");
    sema::ParamEnv overrides;
    std::vector<const ast::Param*> overridable;
    for (const auto& p : sub->params)
      if (!p.local) overridable.push_back(&p);
    for (size_t k = 0; k < inst.params.size(); ++k) {
      const auto& c = inst.params[k];
      if (!c.expr) continue;
      std::string name = c.port.empty() ? overridable.at(k)->name : c.port;
      Type t = parent.typer->type_of(*c.expr);
      overrides[name] = sema::ParamValue{sema::const_eval(*c.expr, parent.params), std::min<uint32_t>(t.width, 64),
                                         t.is_signed};
    }
    auto child = build(*sub, sema::module_params(*sub, overrides), depth + 1);
    for (size_t k = 0; k < inst.ports.size(); ++k) {
      const auto& c = inst.ports[k];
      if (!c.expr) continue;
      size_t idx = k;
      if (!c.port.empty()) {
        auto it = std::find_if(sub->ports.begin(), sub->ports.end(), [&](const auto& p) { return p.name == c.port; });
        idx = static_cast<size_t>(it - sub->ports.begin());
      }
      Process p{sub->ports[idx].direction == ast::Direction::In ? Process::ChildIn : Process::ChildOut, &parent};
      p.lhs = &*c.expr;
      p.child = child.get();
      p.port = idx;
      procs_.push_back(p);
    }
    parent.children.push_back(std::move(child));
  }

  void reset_inst(Inst& in) {
    in.values = in.initial;
    for (auto& c : in.children) reset_inst(*c);
  }

  bool store(Inst& in, const std::string& name, const BitVec& v) {
    BitVec& slot = in.values.at(name);
    if (slot == v) return false;
    slot = v;
    return true;
  }

  bool run(const Process& p) {
    Inst& in = *p.inst;
    Evaluator ev(in, nullptr);
    bool changed = false;
    auto current = [&](const std::string& n) { return in.values.at(n); };
    auto put = [&](const std::string& n, const BitVec& v) { changed |= store(in, n, v); };
    switch (p.kind) {
      case Process::Assign:
      case Process::DeclInit: {
        uint32_t w = in.typer->type_of(*p.lhs).width;
        write_lvalue(in, ev, *p.lhs, ev.assignment(*p.rhs, w), 0, current, put);
        break;
      }
      case Process::Comb: {
        auto before = in.values;
        auto write = [&](const std::string& n, const BitVec& v) { store(in, n, v); };
        exec(in, ev, p.always->body, current, write, write);
        changed = in.values != before;
        break;
      }
      case Process::ChildIn: {
        const auto& port = p.child->m->ports[p.port];
        uint32_t w = p.child->sigs.at(port.name).width;
        changed |= store(*p.child, port.name, ev.assignment(*p.lhs, w));
        break;
      }
      case Process::ChildOut: {
        const auto& port = p.child->m->ports[p.port];
        const SignalInfo& pi = p.child->sigs.at(port.name);
        uint32_t w = in.typer->type_of(*p.lhs).width;
        BitVec v = p.child->values.at(port.name);
        v = v.resized(std::max(w, v.width()), pi.is_signed).resized(w);
        write_lvalue(in, ev, *p.lhs, v, 0, current, put);
        break;
      }
    }
    return changed;
  }

  using Getter = std::function<BitVec(const std::string&)>;
  using Setter = std::function<void(const std::string&, const BitVec&)>;

  void exec(Inst& in, Evaluator& ev, const Stmt& s, const Getter& current, const Setter& blocking,
            const Setter& nonblocking) {
    switch (s.kind) {
      case StmtKind::Null:
        return;
      case StmtKind::Opaque:
        throw ElabError("unsupported statement");
      case StmtKind::Block:
        for (const auto& b : s.body) exec(in, ev, b, current, blocking, nonblocking);
        return;
      case StmtKind::If:
        if (!ev.self(s.rhs).is_zero())
          exec(in, ev, s.body[0], current, blocking, nonblocking);
        else if (s.body.size() > 1)
          exec(in, ev, s.body[1], current, blocking, nonblocking);
        return;
      case StmtKind::Case: {
        Type st = in.typer->type_of(s.rhs);
        uint32_t w = st.width;
        bool sign = st.is_signed;
        for (const auto& labels : s.labels)
          for (const auto& l : labels) {
            Type lt = in.typer->type_of(l);
            w = std::max(w, lt.width);
            sign = sign && lt.is_signed;
          }
        BitVec subject = ev.eval(s.rhs, w, sign);
        std::optional<size_t> chosen, fallback;
        for (size_t i = 0; i < s.body.size() && !chosen; ++i) {
          if (s.labels[i].empty()) {
            fallback = i;
            continue;
          }
          for (const auto& l : s.labels[i])
            if (case_matches(ev, in, s, subject, w, sign, l)) {
              chosen = i;
              break;
            }
        }
        if (!chosen) chosen = fallback;
        if (chosen) exec(in, ev, s.body[*chosen], current, blocking, nonblocking);
        return;
      }
      case StmtKind::Blocking:
      case StmtKind::NonBlocking: {
        uint32_t w = in.typer->type_of(s.lhs).width;
        BitVec v = ev.assignment(s.rhs, w);
        write_lvalue(in, ev, s.lhs, v, 0, current, s.kind == StmtKind::Blocking ? blocking : nonblocking);
        return;
      }
    }
  }

  void settle() {
    size_t limit = procs_.size() + 8;
    for (size_t iter = 0; iter <= limit; ++iter) {
      bool changed = false;
      for (const auto& p : procs_) changed |= run(p);
      if (!changed) return;
    }
    throw ElabError("combinational logic did not settle");
  }

  void collect_clocked(Inst& in, std::vector<std::pair<Inst*, const ast::Always*>>& out) {
    for (auto* a : in.clocked) out.emplace_back(&in, a);
    for (auto& c : in.children) collect_clocked(*c, out);
  }

  void clock_edge() {
    std::vector<std::pair<Inst*, const ast::Always*>> blocks;
    collect_clocked(*root_, blocks);
    std::vector<std::pair<Inst*, Frame>> frames;
    for (auto& [in, a] : blocks) {
      Frame f;
      Evaluator ev(*in, &f);
      // Last write in program order wins, for blocking and non-blocking alike.
      Getter current_nb = [&](const std::string& n) {
        if (auto it = f.pending.find(n); it != f.pending.end()) return it->second;
        if (auto it = f.local.find(n); it != f.local.end()) return it->second;
        return in->values.at(n);
      };
      Getter current_b = [&](const std::string& n) {
        if (auto it = f.local.find(n); it != f.local.end()) return it->second;
        return in->values.at(n);
      };
      Setter blocking = [&](const std::string& n, const BitVec& v) {
        f.local[n] = v;
        f.pending[n] = v;
      };
      Setter nonblocking = [&](const std::string& n, const BitVec& v) { f.pending[n] = v; };
      exec_clocked(*in, ev, a->body, current_b, current_nb, blocking, nonblocking);
      frames.emplace_back(in, std::move(f));
    }
    for (auto& [in, f] : frames)
      for (auto& [n, v] : f.pending) in->values[n] = v;
  }

  // Like exec, but blocking and non-blocking writes see different "current"
  // values for partial updates.
  void exec_clocked(Inst& in, Evaluator& ev, const Stmt& s, const Getter& cur_b, const Getter& cur_nb,
                    const Setter& blocking, const Setter& nonblocking) {
    if (s.kind == StmtKind::Blocking || s.kind == StmtKind::NonBlocking) {
      uint32_t w = in.typer->type_of(s.lhs).width;
      BitVec v = ev.assignment(s.rhs, w);
      if (s.kind == StmtKind::Blocking)
        write_lvalue(in, ev, s.lhs, v, 0, cur_b, blocking);
      else
        write_lvalue(in, ev, s.lhs, v, 0, cur_nb, nonblocking);
      return;
    }
    if (s.kind == StmtKind::Block) {
      for (const auto& b : s.body) exec_clocked(in, ev, b, cur_b, cur_nb, blocking, nonblocking);
      return;
    }
    if (s.kind == StmtKind::If) {
      if (!ev.self(s.rhs).is_zero())
        exec_clocked(in, ev, s.body[0], cur_b, cur_nb, blocking, nonblocking);
      else if (s.body.size() > 1)
        exec_clocked(in, ev, s.body[1], cur_b, cur_nb, blocking, nonblocking);
      return;
    }
    if (s.kind == StmtKind::Case) {
      Type st = in.typer->type_of(s.rhs);
      uint32_t w = st.width;
      bool sign = st.is_signed;
      for (const auto& labels : s.labels)
        for (const auto& l : labels) {
          Type lt = in.typer->type_of(l);
          w = std::max(w, lt.width);
          sign = sign && lt.is_signed;
        }
      BitVec subject = ev.eval(s.rhs, w, sign);
      std::optional<size_t> chosen, fallback;
      for (size_t i = 0; i < s.body.size() && !chosen; ++i) {
        if (s.labels[i].empty()) {
          fallback = i;
          continue;
        }
        for (const auto& l : s.labels[i])
          if (case_matches(ev, in, s, subject, w, sign, l)) {
            chosen = i;
            break;
          }
      }
      if (!chosen) chosen = fallback;
      if (chosen) exec_clocked(in, ev, s.body[*chosen], cur_b, cur_nb, blocking, nonblocking);
      return;
    }
    if (s.kind == StmtKind::Opaque) throw ElabError("unsupported statement");
  }

  const ast::SourceUnit& unit_;
  std::vector<Process> procs_;
  std::vector<std::unique_ptr<Expr>> decl_lhs_;
  std::unique_ptr<Inst> root_;
};

}  // namespace

struct Interpreter::Impl {
  Impl(const ast::SourceUnit& unit, const std::string& top, const sema::ParamEnv& overrides)
      : machine(unit, top, overrides) {}
  Machine machine;
};

Interpreter::Interpreter(const ast::SourceUnit& unit, const std::string& top, const sema::ParamEnv& overrides)
    : impl_(std::make_unique<Impl>(unit, top, overrides)) {}

Interpreter::~Interpreter() = default;

void Interpreter::reset() { impl_->machine.reset(); }

std::map<std::string, BitVec> Interpreter::step(const std::map<std::string, BitVec>& inputs) {
  return impl_->machine.step(inputs);
}

std::vector<std::map<std::string, BitVec>> interpret(const ast::SourceUnit& unit, const std::string& top,
                                                     const std::vector<std::map<std::string, BitVec>>& stimulus) {
  Interpreter sim(unit, top);
  std::vector<std::map<std::string, BitVec>> out;
  for (const auto& cycle : stimulus) out.push_back(sim.step(cycle));
  return out;
}

}  // namespace modbench
