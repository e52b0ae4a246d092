#include "modbench/elaborate.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>

#include "modbench/error.hpp"

namespace modbench {

using ast::Expr;
using ast::ExprKind;
using ast::Stmt;
using ast::StmtKind;
using sema::ParamEnv;
using sema::SignalInfo;
using sema::Type;

std::string bit_name(const std::string& signal, const SignalInfo& info, uint32_t position) {
  if (info.width == 1) return signal;
  int64_t index = info.msb >= info.lsb ? info.lsb + position : info.lsb - position;
  return signal + "[" + std::to_string(index) + "]";
}

namespace {

using Bits = std::vector<Lit>;
using OptBits = std::vector<std::optional<Lit>>;

constexpr int kMaxDepth = 64;
constexpr uint32_t kMaxMulOperand = 16;

// Procedural state while executing an always block.
struct Env {
  bool sequential = false;
  std::map<std::string, OptBits, std::less<>> cur;
  std::map<std::string, OptBits, std::less<>> next;
};

enum class DriverKind { Assign, DeclInit, Comb, Seq, InstanceOut, ParentIn };

struct Driver {
  DriverKind kind;
  size_t item = 0;
  size_t sub = 0;
  uint8_t status = 0;  // 0 pending, 1 running, 2 done
};

struct Signal {
  const SignalInfo* info = nullptr;
  Bits lit;
  std::vector<uint8_t> done;
  std::vector<int> driver;
  std::optional<BitVec> init;  // constant declaration initializer of a variable
};

struct RegisterSite {
  size_t index;
  class ModuleInst* owner;
  std::string clock;  // local signal name
  bool negedge = false;
};

struct Shared {
  const ast::SourceUnit& unit;
  Netlist& net;
  std::vector<RegisterSite> regs;
};

// Arithmetic on literal vectors (LSB first).
class Lowering {
 public:
  explicit Lowering(Netlist& n) : n_(n) {}

  Bits invert(const Bits& a) {
    Bits r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = lit_not(a[i]);
    return r;
  }
  Bits bitwise(const Bits& a, const Bits& b, char op) {
    Bits r(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
      switch (op) {
        case '&': r[i] = n_.make_and(a[i], b[i]); break;
        case '|': r[i] = n_.make_or(a[i], b[i]); break;
        case '^': r[i] = n_.make_xor(a[i], b[i]); break;
        default: r[i] = n_.make_xnor(a[i], b[i]); break;
      }
    }
    return r;
  }
  // Ripple-carry a + b + cin; returns the sum and stores the carry out.
  Bits add(const Bits& a, const Bits& b, Lit cin, Lit* cout = nullptr) {
    Bits r(a.size());
    Lit c = cin;
    for (size_t i = 0; i < a.size(); ++i) {
      Lit x = n_.make_xor(a[i], b[i]);
      r[i] = n_.make_xor(x, c);
      c = n_.make_or(n_.make_and(a[i], b[i]), n_.make_and(x, c));
    }
    if (cout) *cout = c;
    return r;
  }
  Bits sub(const Bits& a, const Bits& b, Lit* no_borrow = nullptr) { return add(a, invert(b), kTrue, no_borrow); }
  Bits mul(const Bits& a, const Bits& b) {
    size_t w = a.size();
    Bits acc(w, kFalse);
    for (size_t i = 0; i < w; ++i) {
      Bits partial(w, kFalse);
      for (size_t j = 0; i + j < w; ++j) partial[i + j] = n_.make_and(a[j], b[i]);
      acc = add(acc, partial, kFalse);
    }
    return acc;
  }
  Lit equal(const Bits& a, const Bits& b) {
    Lit r = kTrue;
    for (size_t i = 0; i < a.size(); ++i) r = n_.make_and(r, n_.make_xnor(a[i], b[i]));
    return r;
  }
  Lit less_than(const Bits& a, const Bits& b, bool is_signed) {
    Bits x = a, y = b;
    if (is_signed && !x.empty()) {
      x.back() = lit_not(x.back());
      y.back() = lit_not(y.back());
    }
    Lit no_borrow;
    sub(x, y, &no_borrow);
    return lit_not(no_borrow);
  }
  Lit reduce_or(const Bits& a) { return n_.make_or_all(a); }
  Lit reduce_and(const Bits& a) { return n_.make_and_all(a); }
  Lit reduce_xor(const Bits& a) {
    Lit r = kFalse;
    for (Lit l : a) r = n_.make_xor(r, l);
    return r;
  }
  // Logical/arithmetic shift by a variable amount as a mux ladder.
  Bits shift(const Bits& a, const Bits& amount, bool left, Lit fill) {
    Bits cur = a;
    size_t w = a.size();
    for (size_t k = 0; k < amount.size(); ++k) {
      Bits nxt(w);
      uint64_t dist = k < 63 ? uint64_t{1} << k : ~uint64_t{0};
      for (size_t i = 0; i < w; ++i) {
        Lit moved;
        if (left)
          moved = (dist <= i) ? cur[i - dist] : kFalse;
        else
          moved = (dist < w - i) ? cur[i + dist] : fill;
        nxt[i] = n_.make_mux(amount[k], moved, cur[i]);
      }
      cur = std::move(nxt);
    }
    return cur;
  }
  Bits mux(Lit sel, const Bits& t, const Bits& e) {
    Bits r(t.size());
    for (size_t i = 0; i < t.size(); ++i) r[i] = n_.make_mux(sel, t[i], e[i]);
    return r;
  }
  // Whether `a`, read as a (signed) integer, equals `value`.
  Lit equals_const(const Bits& a, bool is_signed, int64_t value) {
    size_t w = a.size();
    if (w < 64) {
      int64_t lo = is_signed ? -(int64_t{1} << (w - 1)) : 0;
      int64_t hi = is_signed ? (int64_t{1} << (w - 1)) - 1 : (int64_t{1} << w) - 1;
      if (value < lo || value > hi) return kFalse;
    } else if (!is_signed && value < 0) {
      return kFalse;
    }
    Lit r = kTrue;
    for (size_t i = 0; i < w; ++i) {
      bool bit = i < 64 ? ((static_cast<uint64_t>(value) >> i) & 1) : value < 0;
      r = n_.make_and(r, bit ? a[i] : lit_not(a[i]));
    }
    return r;
  }

 private:
  Netlist& n_;
};

Bits extend(Bits b, uint32_t width, bool sign) {
  Lit fill = (sign && !b.empty()) ? b.back() : kFalse;
  b.resize(width, fill);
  return b;
}

Bits const_bits(const BitVec& v) {
  Bits r(v.width());
  for (uint32_t i = 0; i < v.width(); ++i) r[i] = v.bit(i) ? kTrue : kFalse;
  return r;
}

std::optional<int64_t> try_const(const Expr& e, const ParamEnv& params) {
  try {
    return sema::const_eval(e, params);
  } catch (const ElabError&) {
    return std::nullopt;
  }
}

uint32_t significant_bits(int64_t v) {
  uint64_t u = static_cast<uint64_t>(v < 0 ? ~v : v);
  uint32_t n = 1;
  while (u) {
    ++n;
    u >>= 1;
  }
  return v < 0 ? n : std::max<uint32_t>(1, n - 1);
}

class ModuleInst {
 public:
  ModuleInst(Shared& sh, const ast::ModuleDecl& m, ParamEnv params, std::string prefix, ModuleInst* parent,
             size_t parent_item, int depth)
      : sh_(sh),
        m_(m),
        params_(std::move(params)),
        prefix_(std::move(prefix)),
        parent_(parent),
        parent_item_(parent_item),
        low_(sh.net) {
    if (depth > kMaxDepth) throw ElabError("instantiation deeper than " + std::to_string(kMaxDepth) + " levels");
    signals_ = sema::module_signals(m_, params_);
    typer_ = std::make_unique<sema::Typer>(signals_, params_);
    check_items();
    for (auto& [name, info] : signals_) {
      Signal s;
      s.info = &info;
      s.lit.assign(info.width, kFalse);
      s.done.assign(info.width, 0);
      s.driver.assign(info.width, -1);
      sigs_.emplace(name, std::move(s));
    }
    bind_ports();
    register_drivers(depth);
  }

  const ast::ModuleDecl& module() const { return m_; }
  const std::string& prefix() const { return prefix_; }

  Bits read_signal(const std::string& name) {
    Signal& s = signal(name);
    Bits r(s.info->width);
    for (uint32_t i = 0; i < s.info->width; ++i) r[i] = read_bit(s, i, name);
    return r;
  }

  // Runs every driver (so errors do not depend on what the outputs use) and
  // computes register next-state functions.
  void finalize() {
    for (size_t d = 0; d < drivers_.size(); ++d) run_driver(d);
    for (auto& c : children_)
      if (c) c->finalize();
  }

  Lit clock_literal(const std::string& local) {
    Signal& s = signal(local);
    if (s.info->width != 1) throw ElabError("clock '" + local + "' is not a single bit");
    return read_bit(s, 0, local);
  }

  std::string where() const {
    return prefix_.empty() ? m_.name : prefix_.substr(0, prefix_.size() - 1) + " (" + m_.name + ")";
  }

 private:
  // ---- setup ---------------------------------------------------------------

  void check_items() {
    for (const auto& p : m_.ports)
      if (p.direction == ast::Direction::InOut)
        throw ElabError("unsupported construct: inout port '" + p.name + "' in " + where());
    for (const auto& [name, info] : signals_) {
      if (info.is_array) throw ElabError("unsupported construct: memory '" + name + "' in " + where());
      const auto& t = info.net_type;
      if (t == "tri" || t == "wand" || t == "wor" || t == "supply0" || t == "supply1")
        throw ElabError("unsupported construct: net type '" + t + "' in " + where());
    }
    for (const auto& item : m_.items) {
      if (const auto* o = std::get_if<ast::Opaque>(&item.data))
        throw ElabError("unsupported construct: '" + o->keyword + "' in " + where());
    }
  }

  Signal& signal(const std::string& name) {
    auto it = sigs_.find(name);
    if (it == sigs_.end()) throw ElabError("unknown signal '" + name + "' in " + where());
    return it->second;
  }

  void bind_ports() {
    for (size_t i = 0; i < m_.ports.size(); ++i) {
      const auto& p = m_.ports[i];
      if (p.direction != ast::Direction::In) continue;
      Signal& s = signal(p.name);
      if (!parent_) {
        Port port{p.name, ast::Direction::In, s.info->width, {}};
        for (uint32_t b = 0; b < s.info->width; ++b) {
          port.bits.push_back(static_cast<uint32_t>(sh_.net.inputs.size()));
          s.lit[b] = sh_.net.add_input(bit_name(p.name, *s.info, b));
          s.done[b] = 1;
        }
        sh_.net.ports.push_back(std::move(port));
      } else {
        int d = add_driver({DriverKind::ParentIn, 0, i});
        for (uint32_t b = 0; b < s.info->width; ++b) claim(s, b, d, p.name);
      }
    }
  }

  int add_driver(Driver d) {
    drivers_.push_back(d);
    return static_cast<int>(drivers_.size() - 1);
  }

  void claim(Signal& s, uint32_t pos, int driver, const std::string& name) {
    if (s.driver[pos] != -1)
      throw ElabError("multiple drivers for '" + prefix_ + bit_name(name, *s.info, pos) + "' in " + where());
    s.driver[pos] = driver;
  }

  // Constant-select lvalue bits, LSB first; nullopt marks out-of-range bits.
  std::vector<std::pair<Signal*, std::optional<uint32_t>>> lvalue_bits(const Expr& e) {
    std::vector<std::pair<Signal*, std::optional<uint32_t>>> out;
    if (e.kind == ExprKind::Concat) {
      for (auto it = e.args.rbegin(); it != e.args.rend(); ++it) {
        auto part = lvalue_bits(*it);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    std::string root = sema::lvalue_root(e);
    if (root.empty()) throw ElabError("illegal assignment target in " + where());
    Signal& s = signal(root);
    for (auto idx : select_indices(e, *s.info, true)) {
      int64_t p = s.info->position(idx);
      out.emplace_back(&s, p < 0 ? std::nullopt : std::optional<uint32_t>(static_cast<uint32_t>(p)));
    }
    return out;
  }

  // Declared indices selected by a constant select, LSB of the result first.
  std::vector<int64_t> select_indices(const Expr& e, const SignalInfo& info, bool require_const) {
    std::vector<int64_t> idx;
    bool desc = info.msb >= info.lsb;
    auto need = [&](const Expr& x) {
      auto v = try_const(x, params_);
      if (!v && require_const) throw ElabError("non-constant select of '" + e.name + "' in " + where());
      return v;
    };
    switch (e.kind) {
      case ExprKind::Ident:
        for (uint32_t p = 0; p < info.width; ++p) idx.push_back(desc ? info.lsb + p : info.lsb - p);
        break;
      case ExprKind::Index:
        idx.push_back(*need(e.args[0]));
        break;
      case ExprKind::Range: {
        int64_t hi = *need(e.args[0]), lo = *need(e.args[1]);
        int64_t step = hi >= lo ? 1 : -1;
        for (int64_t i = lo;; i += step) {
          idx.push_back(i);
          if (i == hi) break;
        }
        break;
      }
      case ExprKind::IndexedUp:
      case ExprKind::IndexedDown: {
        int64_t base = *need(e.args[0]);
        int64_t w = sema::const_eval(e.args[1], params_);
        for (int64_t j = 0; j < w; ++j) idx.push_back(indexed_bit(e.kind == ExprKind::IndexedUp, desc, base, w, j));
        break;
      }
      default:
        throw ElabError("illegal select in " + where());
    }
    return idx;
  }

  // Declared index of result bit j of `base +: w` / `base -: w`.
  static int64_t indexed_bit(bool up, bool desc, int64_t base, int64_t w, int64_t j) {
    if (up) return desc ? base + j : base + w - 1 - j;
    return desc ? base - w + 1 + j : base - j;
  }

  void register_drivers(int depth) {
    // Variables with constant initializers keep that value when nothing drives them.
    for (const auto& item : m_.items) {
      const auto* nd = std::get_if<ast::NetDecl>(&item.data);
      if (!nd) continue;
      for (const auto& d : nd->names) {
        if (!d.init) continue;
        Signal& s = signal(d.name);
        if (s.info->declared_reg && !(s.info->is_port() && s.info->kind == sema::SignalKind::Input)) {
          auto v = try_const(*d.init, params_);
          if (!v) throw ElabError("non-constant initializer for '" + d.name + "' in " + where());
          Type t = typer_->type_of(*d.init);
          s.init = BitVec(std::min<uint32_t>(t.width, 64), static_cast<uint64_t>(*v)).resized(s.info->width, t.is_signed);
        }
      }
    }
    std::map<std::string, BitVec, std::less<>> reset_values;
    bool have_reset_values = false;
    for (size_t i = 0; i < m_.items.size(); ++i) {
      const auto& item = m_.items[i];
      if (const auto* ca = std::get_if<ast::ContAssign>(&item.data)) {
        for (size_t k = 0; k < ca->assigns.size(); ++k) {
          int d = add_driver({DriverKind::Assign, i, k});
          for (auto& [s, pos] : lvalue_bits(ca->assigns[k].first))
            if (pos) claim(*s, *pos, d, s->info->name);
        }
      } else if (const auto* nd = std::get_if<ast::NetDecl>(&item.data)) {
        for (size_t k = 0; k < nd->names.size(); ++k) {
          const auto& decl = nd->names[k];
          if (!decl.init) continue;
          Signal& s = signal(decl.name);
          if (s.info->declared_reg) continue;
          int d = add_driver({DriverKind::DeclInit, i, k});
          for (uint32_t b = 0; b < s.info->width; ++b) claim(s, b, d, decl.name);
        }
      } else if (const auto* al = std::get_if<ast::Always>(&item.data)) {
        sema::AlwaysInfo info = sema::analyze_always(*al, signals_);
        std::vector<std::string> targets;
        sema::collect_targets(al->body, targets);
        int d = add_driver({info.sequential ? DriverKind::Seq : DriverKind::Comb, i, 0});
        if (info.sequential && !have_reset_values) {
          reset_values = sema::register_reset_values(m_, signals_, params_);
          have_reset_values = true;
        }
        for (const auto& t : targets) {
          Signal& s = signal(t);
          if (s.info->kind == sema::SignalKind::Input)
            throw ElabError("procedural assignment to input '" + t + "' in " + where());
          for (uint32_t b = 0; b < s.info->width; ++b) {
            claim(s, b, d, t);
            if (info.sequential) {
              bool rv = false;
              if (auto it = reset_values.find(t); it != reset_values.end()) rv = it->second.bit(b);
              size_t r = sh_.net.add_register(prefix_ + bit_name(t, *s.info, b), "", rv);
              s.lit[b] = sh_.net.register_lit(r);
              s.done[b] = 1;
              if (info.reset && info.reset->asynchronous)
                sh_.net.async_reset_registers.push_back(sh_.net.registers[r].name);
              reg_index_[t].push_back(r);
              sh_.regs.push_back({r, this, info.clock, info.negedge});
            }
          }
        }
      } else if (const auto* inst = std::get_if<ast::Instance>(&item.data)) {
        add_instance(i, *inst, depth);
      }
    }
  }

  void add_instance(size_t item, const ast::Instance& inst, int depth) {
    const ast::ModuleDecl* sub = sh_.unit.find(inst.module);
    if (!sub) throw ElabError("unknown module '" + inst.module + "' instantiated as '" + inst.name + "' in " + where());
    // Parameter overrides.
    ParamEnv overrides;
    std::vector<const ast::Param*> overridable;
    for (const auto& p : sub->params)
      if (!p.local) overridable.push_back(&p);
    for (size_t k = 0; k < inst.params.size(); ++k) {
      const auto& c = inst.params[k];
      if (!c.expr) continue;
      std::string name;
      if (c.port.empty()) {
        if (k >= overridable.size()) throw ElabError("too many parameter overrides for '" + inst.name + "'");
        name = overridable[k]->name;
      } else {
        auto it = std::find_if(overridable.begin(), overridable.end(), [&](auto* p) { return p->name == c.port; });
        if (it == overridable.end())
          throw ElabError("module '" + inst.module + "' has no parameter '" + c.port + "'");
        name = c.port;
      }
      Type t = typer_->type_of(*c.expr);
      overrides[name] = sema::ParamValue{sema::const_eval(*c.expr, params_), std::min<uint32_t>(t.width, 64), t.is_signed};
    }
    // Port connections by child port index.
    std::vector<const Expr*> conns(sub->ports.size(), nullptr);
    bool named = !inst.ports.empty() && !inst.ports[0].port.empty();
    for (size_t k = 0; k < inst.ports.size(); ++k) {
      const auto& c = inst.ports[k];
      size_t idx;
      if (named) {
        if (c.port.empty()) throw ElabError("mixed named and positional connections on '" + inst.name + "'");
        auto it = std::find_if(sub->ports.begin(), sub->ports.end(), [&](const auto& p) { return p.name == c.port; });
        if (it == sub->ports.end()) throw ElabError("module '" + inst.module + "' has no port '" + c.port + "'");
        idx = static_cast<size_t>(it - sub->ports.begin());
      } else {
        if (k >= sub->ports.size()) throw ElabError("too many port connections on '" + inst.name + "'");
        idx = k;
      }
      if (conns[idx]) throw ElabError("port '" + sub->ports[idx].name + "' connected twice on '" + inst.name + "'");
      conns[idx] = c.expr ? &*c.expr : nullptr;
    }
    if (children_.size() <= item) children_.resize(item + 1);
    if (connections_.size() <= item) connections_.resize(item + 1);
    connections_[item] = conns;
    children_[item] = std::make_unique<ModuleInst>(sh_, *sub, sema::module_params(*sub, overrides),
                                                   prefix_ + inst.name + ".", this, item, depth + 1);
    for (size_t p = 0; p < sub->ports.size(); ++p) {
      if (sub->ports[p].direction != ast::Direction::Out || !conns[p]) continue;
      int d = add_driver({DriverKind::InstanceOut, item, p});
      for (auto& [s, pos] : lvalue_bits(*conns[p]))
        if (pos) claim(*s, *pos, d, s->info->name);
    }
  }

  // ---- lazy resolution -----------------------------------------------------

  Lit read_bit(Signal& s, uint32_t pos, const std::string& name) {
    if (s.done[pos]) return s.lit[pos];
    int d = s.driver[pos];
    if (d < 0) {
      if (s.init) return s.init->bit(pos) ? kTrue : kFalse;
      throw ElabError("'" + prefix_ + bit_name(name, *s.info, pos) + "' is read but never driven");
    }
    if (drivers_[d].status == 1)
      throw ElabError("combinational loop through '" + prefix_ + bit_name(name, *s.info, pos) + "'");
    run_driver(static_cast<size_t>(d));
    if (!s.done[pos]) throw ElabError("internal: driver left '" + name + "' unresolved");
    return s.lit[pos];
  }

  void run_driver(size_t d) {
    if (drivers_[d].status != 0) return;
    drivers_[d].status = 1;
    Driver drv = drivers_[d];
    const auto& item = m_.items[drv.item];
    switch (drv.kind) {
      case DriverKind::Assign: {
        const auto& [lhs, rhs] = std::get<ast::ContAssign>(item.data).assigns[drv.sub];
        drive_lvalue(lhs, rhs);
        break;
      }
      case DriverKind::DeclInit: {
        const auto& decl = std::get<ast::NetDecl>(item.data).names[drv.sub];
        Expr lhs;
        lhs.kind = ExprKind::Ident;
        lhs.name = decl.name;
        drive_lvalue(lhs, *decl.init);
        break;
      }
      case DriverKind::Comb:
        run_comb(std::get<ast::Always>(item.data));
        break;
      case DriverKind::Seq:
        run_seq(std::get<ast::Always>(item.data));
        break;
      case DriverKind::InstanceOut: {
        ModuleInst& child = *children_[drv.item];
        const auto& port = child.module().ports[drv.sub];
        Bits v = child.read_signal(port.name);
        auto bits = lvalue_bits(*connections_[drv.item][drv.sub]);
        v = extend(std::move(v), static_cast<uint32_t>(std::max(bits.size(), v.size())), port.is_signed);
        for (size_t i = 0; i < bits.size(); ++i) set_driven(bits[i], v[i]);
        break;
      }
      case DriverKind::ParentIn: {
        const auto& port = m_.ports[drv.sub];
        Signal& s = signal(port.name);
        Bits v = parent_->child_input(parent_item_, drv.sub, s.info->width);
        for (uint32_t b = 0; b < s.info->width; ++b) {
          s.lit[b] = v[b];
          s.done[b] = 1;
        }
        break;
      }
    }
    drivers_[d].status = 2;
  }

  Bits child_input(size_t item, size_t port, uint32_t width) {
    const Expr* e = connections_[item][port];
    if (!e) {
      const auto& inst = std::get<ast::Instance>(m_.items[item].data);
      throw ElabError("input '" + children_[item]->module().ports[port].name + "' of '" + prefix_ + inst.name +
                      "' is unconnected");
    }
    return assignment_value(*e, width, nullptr);
  }

  void set_driven(const std::pair<Signal*, std::optional<uint32_t>>& bit, Lit v) {
    if (!bit.second) return;
    bit.first->lit[*bit.second] = v;
    bit.first->done[*bit.second] = 1;
  }

  void drive_lvalue(const Expr& lhs, const Expr& rhs) {
    auto bits = lvalue_bits(lhs);
    Bits v = assignment_value(rhs, static_cast<uint32_t>(bits.size()), nullptr);
    for (size_t i = 0; i < bits.size(); ++i) set_driven(bits[i], v[i]);
  }

  // rhs evaluated in the context of an assignment to `width` bits.
  Bits assignment_value(const Expr& rhs, uint32_t width, Env* env) {
    Type t = typer_->type_of(rhs);
    Bits v = eval(rhs, std::max(width, t.width), t.is_signed, env);
    v.resize(width);
    return v;
  }

  // ---- always blocks -------------------------------------------------------

  void run_comb(const ast::Always& a) {
    std::vector<std::string> targets;
    sema::collect_targets(a.body, targets);
    Env env;
    for (const auto& t : targets) env.cur[t] = OptBits(signal(t).info->width);
    current_targets_ = &targets;
    exec(a.body, env);
    current_targets_ = nullptr;
    for (const auto& t : targets) {
      Signal& s = signal(t);
      const OptBits& v = env.cur[t];
      for (uint32_t b = 0; b < s.info->width; ++b) {
        if (!v[b]) throw ElabError("latch inferred for '" + prefix_ + bit_name(t, *s.info, b) + "' in " + where());
        s.lit[b] = *v[b];
        s.done[b] = 1;
      }
    }
  }

  void run_seq(const ast::Always& a) {
    std::vector<std::string> targets;
    sema::collect_targets(a.body, targets);
    Env env;
    env.sequential = true;
    for (const auto& t : targets) {
      Signal& s = signal(t);
      OptBits cur(s.info->width);
      for (uint32_t b = 0; b < s.info->width; ++b) cur[b] = s.lit[b];
      env.cur[t] = cur;
      env.next[t] = cur;
    }
    exec(a.body, env);
    for (const auto& t : targets) {
      const auto& regs = reg_index_.at(t);
      const OptBits& v = env.next[t];
      for (size_t b = 0; b < regs.size(); ++b) sh_.net.registers[regs[b]].next = *v[b];
    }
  }

  std::optional<Lit> merge_bit(Lit sel, std::optional<Lit> t, std::optional<Lit> e) {
    if (!t || !e) return (t == e) ? t : std::nullopt;
    return sh_.net.make_mux(sel, *t, *e);
  }

  void merge_into(Env& dst, Lit sel, const Env& t, const Env& e) {
    auto merge_map = [&](auto& out, const auto& a, const auto& b) {
      for (auto& [name, bits] : out) {
        const OptBits& x = a.at(name);
        const OptBits& y = b.at(name);
        for (size_t i = 0; i < bits.size(); ++i) bits[i] = merge_bit(sel, x[i], y[i]);
      }
    };
    merge_map(dst.cur, t.cur, e.cur);
    merge_map(dst.next, t.next, e.next);
  }

  void exec(const Stmt& s, Env& env) {
    switch (s.kind) {
      case StmtKind::Null:
        return;
      case StmtKind::Block:
        for (const auto& b : s.body) exec(b, env);
        return;
      case StmtKind::Opaque: {
        std::string head = s.text.substr(0, s.text.find_first_of(" \t\n(;"));
        throw ElabError("unsupported construct: '" + head + "' statement in " + where());
      }
      case StmtKind::If: {
        Lit cond = low_.reduce_or(eval_self(s.rhs, &env));
        Env t = env, e = env;
        exec(s.body[0], t);
        if (s.body.size() > 1) exec(s.body[1], e);
        merge_into(env, cond, t, e);
        return;
      }
      case StmtKind::Case:
        exec_case(s, env);
        return;
      case StmtKind::Blocking:
      case StmtKind::NonBlocking:
        assign(s.lhs, s.rhs, env, s.kind == StmtKind::Blocking || !env.sequential);
        return;
    }
  }

  void exec_case(const Stmt& s, Env& env) {
    bool wildcard = s.text == "casez" || s.text == "casex";
    Type st = typer_->type_of(s.rhs);
    uint32_t w = st.width;
    bool sign = st.is_signed;
    for (const auto& labels : s.labels)
      for (const auto& l : labels) {
        Type lt = typer_->type_of(l);
        w = std::max(w, lt.width);
        sign = sign && lt.is_signed;
      }
    Bits subject = eval(s.rhs, w, sign, &env);
    // Match literal of each item, in order; default has none.
    std::vector<std::optional<Lit>> match(s.body.size());
    std::optional<size_t> default_item;
    for (size_t i = 0; i < s.body.size(); ++i) {
      if (s.labels[i].empty()) {
        default_item = i;
        continue;
      }
      Lit any = kFalse;
      for (const auto& l : s.labels[i]) {
        Lit eq;
        if (l.kind == ExprKind::Number && !l.num.xz.is_zero()) {
          if (!wildcard) throw ElabError("unsupported construct: x/z case label in " + where());
          uint32_t lw = typer_->type_of(l).width;
          BitVec val = l.num.value.resized(lw, false);
          BitVec xz = l.num.xz.resized(lw, false);
          bool sext = sign && l.num.is_signed;
          eq = kTrue;
          for (uint32_t b = 0; b < w; ++b) {
            uint32_t src = b < lw ? b : lw - 1;
            if (b >= lw && !sext) {
              eq = sh_.net.make_and(eq, lit_not(subject[b]));
              continue;
            }
            if (xz.bit(src)) continue;
            eq = sh_.net.make_and(eq, val.bit(src) ? subject[b] : lit_not(subject[b]));
          }
        } else {
          eq = low_.equal(subject, eval(l, w, sign, &env));
        }
        any = sh_.net.make_or(any, eq);
      }
      match[i] = any;
    }
    // A case whose constant labels cover every subject value needs no default:
    // the last labelled item then acts as one.
    std::optional<size_t> last_item;
    if (!default_item && labels_cover(s, w, sign)) {
      for (size_t i = s.body.size(); i-- > 0;)
        if (match[i]) {
          last_item = i;
          break;
        }
    }
    Env acc = env;
    if (default_item) exec(s.body[*default_item], acc);
    if (last_item) exec(s.body[*last_item], acc);
    for (size_t i = s.body.size(); i-- > 0;) {
      if (!match[i] || last_item == i) continue;
      Env item = env;
      exec(s.body[i], item);
      Env merged = env;
      merge_into(merged, *match[i], item, acc);
      acc = std::move(merged);
    }
    env = std::move(acc);
  }

  // Whether constant case labels match every value of a `w`-bit subject.
  bool labels_cover(const Stmt& s, uint32_t w, bool sign) {
    if (w > 16) return false;
    bool wildcard = s.text == "casez" || s.text == "casex";
    std::vector<std::pair<uint64_t, uint64_t>> pats;  // (value, care mask)
    uint64_t all = (uint64_t{1} << w) - 1;
    for (const auto& labels : s.labels)
      for (const auto& l : labels) {
        uint32_t lw = typer_->type_of(l).width;
        bool sext = sign && typer_->type_of(l).is_signed;
        if (l.kind == ExprKind::Number && !l.num.xz.is_zero()) {
          if (!wildcard) continue;
          BitVec val = l.num.value.resized(lw), xz = l.num.xz.resized(lw);
          uint64_t v = 0, care = 0;
          for (uint32_t b = 0; b < w; ++b) {
            uint32_t src = std::min(b, lw - 1);
            if (b >= lw && !sext) {
              care |= uint64_t{1} << b;
              continue;
            }
            if (xz.bit(src)) continue;
            care |= uint64_t{1} << b;
            if (val.bit(src)) v |= uint64_t{1} << b;
          }
          pats.emplace_back(v, care);
          continue;
        }
        auto c = try_const(l, params_);
        if (!c) return false;
        BitVec bv = BitVec(std::min<uint32_t>(lw, 64), static_cast<uint64_t>(*c)).resized(lw).resized(std::max(w, lw), sext);
        bool upper = false;
        for (uint32_t b = w; b < bv.width(); ++b) upper |= bv.bit(b);
        if (upper) continue;  // can never equal a w-bit subject
        pats.emplace_back(bv.to_u64() & all, all);
      }
    for (uint64_t v = 0; v <= all; ++v) {
      bool hit = false;
      for (const auto& [pv, care] : pats)
        if ((v & care) == (pv & care)) {
          hit = true;
          break;
        }
      if (!hit) return false;
    }
    return true;
  }

  void assign(const Expr& lhs, const Expr& rhs, Env& env, bool blocking) {
    uint32_t w = typer_->type_of(lhs).width;
    Bits v = assignment_value(rhs, w, &env);
    write(lhs, v, 0, env, blocking);
  }

  // Writes bits of `v` starting at `offset` (LSB) into the target; returns
  // the number of bits consumed.
  uint32_t write(const Expr& lhs, const Bits& v, uint32_t offset, Env& env, bool blocking) {
    if (lhs.kind == ExprKind::Concat) {
      uint32_t used = 0;
      for (auto it = lhs.args.rbegin(); it != lhs.args.rend(); ++it) used += write(*it, v, offset + used, env, blocking);
      return used;
    }
    std::string root = sema::lvalue_root(lhs);
    if (root.empty()) throw ElabError("illegal assignment target in " + where());
    Signal& s = signal(root);
    const SignalInfo& info = *s.info;
    auto& bits_cur = env.cur.at(root);
    auto put = [&](uint32_t pos, std::optional<Lit> lit) {
      if (blocking) {
        bits_cur[pos] = lit;
        if (env.sequential) env.next.at(root)[pos] = lit;
      } else {
        env.next.at(root)[pos] = lit;
      }
    };
    auto old = [&](uint32_t pos) { return blocking ? bits_cur[pos] : env.next.at(root)[pos]; };
    uint32_t width = typer_->type_of(lhs).width;
    bool variable = false;
    if (lhs.kind == ExprKind::Index || lhs.kind == ExprKind::IndexedUp || lhs.kind == ExprKind::IndexedDown)
      variable = !try_const(lhs.args[0], params_);
    if (!variable) {
      auto idx = select_indices(lhs, info, true);
      for (size_t j = 0; j < idx.size(); ++j) {
        int64_t p = info.position(idx[j]);
        if (p >= 0) put(static_cast<uint32_t>(p), v[offset + j]);
      }
      return width;
    }
    Type it = typer_->type_of(lhs.args[0]);
    Bits base = eval_self(lhs.args[0], &env);
    bool desc = info.msb >= info.lsb;
    int64_t w = lhs.kind == ExprKind::Index ? 1 : sema::const_eval(lhs.args[1], params_);
    std::map<int64_t, Lit> eq_cache;
    auto eq = [&](int64_t value) {
      auto f = eq_cache.find(value);
      if (f != eq_cache.end()) return f->second;
      Lit l = low_.equals_const(base, it.is_signed, value);
      eq_cache.emplace(value, l);
      return l;
    };
    for (uint32_t p = 0; p < info.width; ++p) {
      int64_t index = desc ? info.lsb + p : info.lsb - p;
      std::optional<Lit> cur = old(p);
      bool touched = false;
      for (int64_t j = 0; j < w; ++j) {
        // Base value for which result bit j lands on `index`.
        int64_t need;
        if (lhs.kind == ExprKind::Index)
          need = index;
        else if (lhs.kind == ExprKind::IndexedUp)
          need = desc ? index - j : index - (w - 1 - j);
        else
          need = desc ? index + w - 1 - j : index + j;
        Lit sel = eq(need);
        if (sel == kFalse) continue;
        touched = true;
        cur = merge_bit(sel, v[offset + static_cast<uint32_t>(j)], cur);
      }
      if (touched) put(p, cur);
    }
    return width;
  }

  // ---- expressions ---------------------------------------------------------

  Bits eval_self(const Expr& e, Env* env) {
    Type t = typer_->type_of(e);
    return eval(e, t.width, t.is_signed, env);
  }

  Bits read_name(const std::string& name, Env* env) {
    if (env) {
      auto it = env->cur.find(name);
      if (it != env->cur.end()) {
        Signal& s = signal(name);
        Bits r(s.info->width);
        for (uint32_t b = 0; b < s.info->width; ++b) {
          if (it->second[b]) {
            r[b] = *it->second[b];
            continue;
          }
          if (current_targets_ &&
              std::find(current_targets_->begin(), current_targets_->end(), name) != current_targets_->end())
            throw ElabError("combinational loop: '" + prefix_ + bit_name(name, *s.info, b) +
                            "' is read before it is assigned in " + where());
          r[b] = read_bit(s, b, name);
        }
        return r;
      }
    }
    return read_signal(name);
  }

  // Value of a named operand (signal or parameter) with its declared layout.
  Bits operand_bits(const std::string& name, Env* env, const SignalInfo** info_out, SignalInfo& scratch) {
    if (sigs_.count(name)) {
      *info_out = signal(name).info;
      return read_name(name, env);
    }
    auto p = params_.find(name);
    if (p == params_.end()) throw ElabError("unknown identifier '" + name + "' in " + where());
    scratch = SignalInfo{};
    scratch.name = name;
    scratch.msb = p->second.width - 1;
    scratch.lsb = 0;
    scratch.width = p->second.width;
    scratch.is_signed = p->second.is_signed;
    *info_out = &scratch;
    return const_bits(p->second.bits());
  }

  Bits eval_select(const Expr& e, Env* env) {
    if (e.name.find('.') != std::string::npos)
      throw ElabError("unsupported construct: hierarchical reference '" + e.name + "' in " + where());
    SignalInfo scratch;
    const SignalInfo* info = nullptr;
    Bits src = operand_bits(e.name, env, &info, scratch);
    Type rt = typer_->type_of(e);
    bool variable = e.kind != ExprKind::Range && !try_const(e.args[0], params_);
    Bits out(rt.width, kFalse);
    if (!variable) {
      auto idx = select_indices(e, *info, true);
      for (size_t j = 0; j < idx.size(); ++j) {
        int64_t p = info->position(idx[j]);
        out[j] = p < 0 ? kFalse : src[static_cast<size_t>(p)];
      }
      return out;
    }
    Type it = typer_->type_of(e.args[0]);
    Bits base = eval_self(e.args[0], env);
    bool desc = info->msb >= info->lsb;
    int64_t w = rt.width;
    for (int64_t j = 0; j < w; ++j) {
      Lit acc = kFalse;
      for (uint32_t p = 0; p < info->width; ++p) {
        int64_t index = desc ? info->lsb + p : info->lsb - p;
        int64_t need;
        if (e.kind == ExprKind::Index)
          need = index;
        else if (e.kind == ExprKind::IndexedUp)
          need = desc ? index - j : index - (w - 1 - j);
        else
          need = desc ? index + w - 1 - j : index + j;
        acc = sh_.net.make_or(acc, sh_.net.make_and(low_.equals_const(base, it.is_signed, need), src[p]));
      }
      out[static_cast<size_t>(j)] = acc;
    }
    return out;
  }

  Bits eval(const Expr& e, uint32_t W, bool S, Env* env) {
    switch (e.kind) {
      case ExprKind::Number: {
        if (!e.num.xz.is_zero()) throw ElabError("unsupported construct: x/z literal in " + where());
        Type t = typer_->type_of(e);
        return extend(const_bits(e.num.value.resized(t.width, e.num.is_signed)), W, S);
      }
      case ExprKind::Ident: {
        if (e.name.find('.') != std::string::npos)
          throw ElabError("unsupported construct: hierarchical reference '" + e.name + "' in " + where());
        SignalInfo scratch;
        const SignalInfo* info = nullptr;
        return extend(operand_bits(e.name, env, &info, scratch), W, S);
      }
      case ExprKind::Index:
      case ExprKind::Range:
      case ExprKind::IndexedUp:
      case ExprKind::IndexedDown:
        return extend(eval_select(e, env), W, false);
      case ExprKind::Unary:
        return eval_unary(e, W, S, env);
      case ExprKind::Binary:
        return eval_binary(e, W, S, env);
      case ExprKind::Ternary: {
        Lit c = low_.reduce_or(eval_self(e.args[0], env));
        Bits t = eval(e.args[1], W, S, env);
        Bits f = eval(e.args[2], W, S, env);
        return low_.mux(c, t, f);
      }
      case ExprKind::Concat: {
        Bits r;
        for (auto it = e.args.rbegin(); it != e.args.rend(); ++it) {
          Bits part = eval_self(*it, env);
          r.insert(r.end(), part.begin(), part.end());
        }
        return extend(std::move(r), W, false);
      }
      case ExprKind::Replicate: {
        int64_t n = sema::const_eval(e.args[0], params_);
        Bits one;
        for (size_t i = e.args.size(); i-- > 1;) {
          Bits part = eval_self(e.args[i], env);
          one.insert(one.end(), part.begin(), part.end());
        }
        Bits r;
        for (int64_t k = 0; k < n; ++k) r.insert(r.end(), one.begin(), one.end());
        return extend(std::move(r), W, false);
      }
      case ExprKind::Call: {
        if ((e.name == "$signed" || e.name == "$unsigned") && e.args.size() == 1)
          return extend(eval_self(e.args[0], env), W, S);
        if (auto v = try_const(e, params_)) {
          Type t = typer_->type_of(e);
          return extend(const_bits(BitVec(std::min<uint32_t>(t.width, 64), static_cast<uint64_t>(*v)).resized(t.width, t.is_signed)), W, S);
        }
        if (e.name == "[]") throw ElabError("unsupported construct: multi-dimensional select in " + where());
        throw ElabError("unsupported construct: call to '" + e.name + "' in " + where());
      }
      case ExprKind::String:
        throw ElabError("unsupported construct: string literal in " + where());
    }
    throw ElabError("unsupported expression in " + where());
  }

  Bits eval_unary(const Expr& e, uint32_t W, bool S, Env* env) {
    const std::string& op = e.name;
    if (op == "~") return low_.invert(eval(e.args[0], W, S, env));
    if (op == "+") return eval(e.args[0], W, S, env);
    if (op == "-") return low_.sub(Bits(W, kFalse), eval(e.args[0], W, S, env));
    Bits a = eval_self(e.args[0], env);
    Lit r;
    if (op == "!")
      r = lit_not(low_.reduce_or(a));
    else if (op == "&")
      r = low_.reduce_and(a);
    else if (op == "~&")
      r = lit_not(low_.reduce_and(a));
    else if (op == "|")
      r = low_.reduce_or(a);
    else if (op == "~|")
      r = lit_not(low_.reduce_or(a));
    else if (op == "^")
      r = low_.reduce_xor(a);
    else if (op == "~^" || op == "^~")
      r = lit_not(low_.reduce_xor(a));
    else
      throw ElabError("unsupported construct: operator '" + op + "' in " + where());
    return extend(Bits{r}, W, false);
  }

  uint32_t operand_width(const Expr& e) {
    if (auto v = try_const(e, params_)) return significant_bits(*v);
    return typer_->type_of(e).width;
  }

  Bits eval_binary(const Expr& e, uint32_t W, bool S, Env* env) {
    const std::string& op = e.name;
    const Expr& x = e.args[0];
    const Expr& y = e.args[1];
    if (op == "/" || op == "%" || op == "**") {
      auto v = try_const(e, params_);
      if (!v) throw ElabError("unsupported construct: operator '" + op + "' on non-constant operands in " + where());
      Type t = typer_->type_of(e);
      return extend(const_bits(BitVec(std::min<uint32_t>(t.width, 64), static_cast<uint64_t>(*v)).resized(t.width, t.is_signed)), W, S);
    }
    if (op == "&" || op == "|" || op == "^" || op == "~^" || op == "^~") {
      char c = op == "&" ? '&' : op == "|" ? '|' : op == "^" ? '^' : '=';
      return low_.bitwise(eval(x, W, S, env), eval(y, W, S, env), c);
    }
    if (op == "+") return low_.add(eval(x, W, S, env), eval(y, W, S, env), kFalse);
    if (op == "-") return low_.sub(eval(x, W, S, env), eval(y, W, S, env));
    if (op == "*") {
      if (operand_width(x) > kMaxMulOperand || operand_width(y) > kMaxMulOperand)
        throw ElabError("unsupported construct: multiply operand wider than 16 bits in " + where());
      return low_.mul(eval(x, W, S, env), eval(y, W, S, env));
    }
    if (sema::is_compare(op)) {
      Type tx = typer_->type_of(x), ty = typer_->type_of(y);
      uint32_t w = std::max(tx.width, ty.width);
      bool s = tx.is_signed && ty.is_signed;
      Bits a = eval(x, w, s, env), b = eval(y, w, s, env);
      Lit r;
      if (op == "==" || op == "===")
        r = low_.equal(a, b);
      else if (op == "!=" || op == "!==")
        r = lit_not(low_.equal(a, b));
      else if (op == "<")
        r = low_.less_than(a, b, s);
      else if (op == ">")
        r = low_.less_than(b, a, s);
      else if (op == "<=")
        r = lit_not(low_.less_than(b, a, s));
      else
        r = lit_not(low_.less_than(a, b, s));
      return extend(Bits{r}, W, false);
    }
    if (sema::is_shift(op)) {
      Bits a = eval(x, W, S, env);
      bool left = op == "<<" || op == "<<<";
      Lit fill = (op == ">>>" && S && !a.empty()) ? a.back() : kFalse;
      if (auto amount = try_const(y, params_)) {
        Type ty = typer_->type_of(y);
        uint64_t amt = static_cast<uint64_t>(*amount);
        if (ty.width < 64) amt &= (uint64_t{1} << ty.width) - 1;
        Bits r(W);
        for (uint32_t i = 0; i < W; ++i) {
          if (left)
            r[i] = amt <= i ? a[i - amt] : kFalse;
          else
            r[i] = amt < W - i ? a[i + amt] : fill;
        }
        return r;
      }
      return low_.shift(a, eval_self(y, env), left, fill);
    }
    if (op == "&&" || op == "||") {
      Lit a = low_.reduce_or(eval_self(x, env));
      Lit b = low_.reduce_or(eval_self(y, env));
      Lit r = op == "&&" ? sh_.net.make_and(a, b) : sh_.net.make_or(a, b);
      return extend(Bits{r}, W, false);
    }
    throw ElabError("unsupported construct: operator '" + op + "' in " + where());
  }

  Shared& sh_;
  const ast::ModuleDecl& m_;
  ParamEnv params_;
  std::string prefix_;
  ModuleInst* parent_;
  size_t parent_item_;
  Lowering low_;
  sema::SignalTable signals_;
  std::unique_ptr<sema::Typer> typer_;
  std::map<std::string, Signal, std::less<>> sigs_;
  std::vector<Driver> drivers_;
  std::vector<std::unique_ptr<ModuleInst>> children_;
  std::vector<std::vector<const Expr*>> connections_;
  std::map<std::string, std::vector<size_t>, std::less<>> reg_index_;
  const std::vector<std::string>* current_targets_ = nullptr;
};

}  // namespace

Netlist elaborate(const ast::SourceUnit& unit, const std::string& top, const sema::ParamEnv& overrides) {
  const ast::ModuleDecl* m = unit.find(top);
  if (!m) throw ElabError("top module '" + top + "' not found");
  Netlist net;
  Shared sh{unit, net, {}};
  ModuleInst root(sh, *m, sema::module_params(*m, overrides), "", nullptr, 0, 0);
  for (const auto& p : m->ports) {
    if (p.direction != ast::Direction::Out) continue;
    Bits v = root.read_signal(p.name);
    const SignalInfo& info = sema::module_signals(*m, sema::module_params(*m, overrides)).at(p.name);
    Port port{p.name, ast::Direction::Out, static_cast<uint32_t>(v.size()), {}};
    for (uint32_t b = 0; b < v.size(); ++b) {
      port.bits.push_back(static_cast<uint32_t>(net.outputs.size()));
      net.add_output(bit_name(p.name, info, b), v[b]);
    }
    net.ports.push_back(std::move(port));
  }
  root.finalize();
  std::string clock;
  std::optional<bool> negedge;
  for (const auto& site : sh.regs) {
    Lit l = site.owner->clock_literal(site.clock);
    const InputBit* in = nullptr;
    if (!lit_neg(l))
      for (const auto& i : net.inputs)
        if (i.node == lit_node(l)) in = &i;
    if (!in)
      throw ElabError("clock '" + site.owner->prefix() + site.clock + "' is not driven directly by a top-level input");
    if (clock.empty()) clock = in->name;
    if (in->name != clock)
      throw ElabError("multiple clock domains: '" + clock + "' and '" + in->name + "'");
    if (!negedge) negedge = site.negedge;
    if (*negedge != site.negedge) throw ElabError("unsupported construct: both edges of clock '" + clock + "' used");
    net.registers[site.index].clock = clock;
  }
  net.validate();
  return net;
}

}  // namespace modbench
