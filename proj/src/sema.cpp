#include "modbench/sema.hpp"

#include <algorithm>

#include "modbench/error.hpp"

namespace modbench::sema {

using ast::Expr;
using ast::ExprKind;

namespace {

int64_t normalize(int64_t v, uint32_t width, bool is_signed) {
  if (width >= 64) return v;
  uint64_t u = static_cast<uint64_t>(v) & ((uint64_t{1} << width) - 1);
  if (is_signed && width > 0 && ((u >> (width - 1)) & 1)) u |= ~uint64_t{0} << width;
  return static_cast<int64_t>(u);
}

int64_t clog2(int64_t v) {
  if (v <= 1) return 0;
  int64_t r = 0;
  uint64_t x = static_cast<uint64_t>(v - 1);
  while (x) {
    ++r;
    x >>= 1;
  }
  return r;
}

uint32_t const_width(const Expr& e, const ParamEnv& params) {
  switch (e.kind) {
    case ExprKind::Number:
      if (!e.num.sized) throw ElabError("unsized constant in concatenation");
      return e.num.value.width();
    case ExprKind::Ident: {
      auto it = params.find(e.name);
      if (it == params.end()) throw ElabError("non-constant expression '" + e.name + "'");
      return it->second.width;
    }
    case ExprKind::Concat: {
      uint32_t w = 0;
      for (const auto& a : e.args) w += const_width(a, params);
      return w;
    }
    case ExprKind::Replicate: {
      uint32_t w = 0;
      for (size_t i = 1; i < e.args.size(); ++i) w += const_width(e.args[i], params);
      return w * static_cast<uint32_t>(const_eval(e.args[0], params));
    }
    default:
      throw ElabError("unsized operand in constant concatenation");
  }
}

}  // namespace

int64_t const_eval(const Expr& e, const ParamEnv& params) {
  switch (e.kind) {
    case ExprKind::Number: {
      if (!e.num.xz.is_zero()) throw ElabError("x/z value in constant expression");
      if (e.num.value.width() > 64) {
        for (uint32_t i = 64; i < e.num.value.width(); ++i)
          if (e.num.value.bit(i)) throw ElabError("constant wider than 64 bits");
      }
      return e.num.is_signed ? e.num.value.to_i64() : static_cast<int64_t>(e.num.value.to_u64());
    }
    case ExprKind::Ident: {
      auto it = params.find(e.name);
      if (it == params.end()) throw ElabError("non-constant expression '" + e.name + "'");
      return it->second.value;
    }
    case ExprKind::Unary: {
      int64_t v = const_eval(e.args[0], params);
      const auto& op = e.name;
      if (op == "-") return -v;
      if (op == "+") return v;
      if (op == "~") return ~v;
      if (op == "!") return v == 0;
      throw ElabError("unsupported constant operator '" + op + "'");
    }
    case ExprKind::Binary: {
      const auto& op = e.name;
      int64_t a = const_eval(e.args[0], params);
      if (op == "&&") return a != 0 && const_eval(e.args[1], params) != 0;
      if (op == "||") return a != 0 || const_eval(e.args[1], params) != 0;
      int64_t b = const_eval(e.args[1], params);
      if (op == "+") return a + b;
      if (op == "-") return a - b;
      if (op == "*") return a * b;
      if (op == "/" || op == "%") {
        if (b == 0) throw ElabError("division by zero in constant expression");
        return op == "/" ? a / b : a % b;
      }
      if (op == "**") {
        if (b < 0) return 0;
        int64_t r = 1;
        for (int64_t i = 0; i < b && i < 64; ++i) r *= a;
        return r;
      }
      if (op == "<<" || op == "<<<") return b >= 64 ? 0 : static_cast<int64_t>(static_cast<uint64_t>(a) << b);
      if (op == ">>") return b >= 64 ? 0 : static_cast<int64_t>(static_cast<uint64_t>(a) >> b);
      if (op == ">>>") return b >= 64 ? (a < 0 ? -1 : 0) : a >> b;
      if (op == "&") return a & b;
      if (op == "|") return a | b;
      if (op == "^") return a ^ b;
      if (op == "~^" || op == "^~") return ~(a ^ b);
      if (op == "==" || op == "===") return a == b;
      if (op == "!=" || op == "!==") return a != b;
      if (op == "<") return a < b;
      if (op == "<=") return a <= b;
      if (op == ">") return a > b;
      if (op == ">=") return a >= b;
      throw ElabError("unsupported constant operator '" + op + "'");
    }
    case ExprKind::Ternary:
      return const_eval(e.args[0], params) != 0 ? const_eval(e.args[1], params)
                                                 : const_eval(e.args[2], params);
    case ExprKind::Call:
      if (e.name == "$clog2" && e.args.size() == 1) return clog2(const_eval(e.args[0], params));
      if ((e.name == "$signed" || e.name == "$unsigned") && e.args.size() == 1)
        return const_eval(e.args[0], params);
      throw ElabError("unsupported function '" + e.name + "' in constant expression");
    case ExprKind::Concat: {
      uint64_t acc = 0;
      for (const auto& a : e.args) {
        uint32_t w = const_width(a, params);
        uint64_t v = static_cast<uint64_t>(const_eval(a, params));
        if (w < 64) v &= (uint64_t{1} << w) - 1;
        acc = (w >= 64 ? 0 : acc << w) | v;
      }
      return static_cast<int64_t>(acc);
    }
    case ExprKind::Replicate: {
      int64_t n = const_eval(e.args[0], params);
      Expr inner;
      inner.kind = ExprKind::Concat;
      inner.args.assign(e.args.begin() + 1, e.args.end());
      uint32_t w = const_width(inner, params);
      uint64_t v = static_cast<uint64_t>(const_eval(inner, params));
      uint64_t acc = 0;
      for (int64_t i = 0; i < n; ++i) acc = (w >= 64 ? 0 : acc << w) | v;
      return static_cast<int64_t>(acc);
    }
    default:
      throw ElabError("non-constant expression");
  }
}

ParamEnv module_params(const ast::ModuleDecl& m, const ParamEnv& overrides) {
  ParamEnv env;
  SignalTable none;
  auto bind = [&](const ast::Param& p) {
    ParamValue pv;
    std::optional<uint32_t> range_width;
    if (p.range) {
      int64_t msb = const_eval(p.range->msb, env), lsb = const_eval(p.range->lsb, env);
      range_width = static_cast<uint32_t>(std::llabs(msb - lsb) + 1);
    }
    auto ov = p.local ? overrides.end() : overrides.find(p.name);
    if (ov != overrides.end()) {
      pv = ov->second;
      if (range_width) {
        pv.width = *range_width;
        pv.is_signed = p.is_signed;
      }
    } else {
      pv.value = const_eval(p.value, env);
      if (range_width) {
        pv.width = *range_width;
        pv.is_signed = p.is_signed;
      } else {
        Type t = Typer(none, env).type_of(p.value);
        pv.width = t.width;
        pv.is_signed = t.is_signed || p.is_signed;
      }
    }
    if (pv.width > 64) throw ElabError("parameter '" + p.name + "' wider than 64 bits");
    pv.value = normalize(pv.value, pv.width, pv.is_signed);
    env[p.name] = pv;
  };
  size_t body_params = 0;
  for (const auto& item : m.items)
    if (auto* pd = std::get_if<ast::ParamDecl>(&item.data))
      for (const auto& p : pd->params) body_params += p.local ? 0 : 1;
  size_t header = m.params.size() - std::min(body_params, m.params.size());
  for (size_t i = 0; i < header; ++i) bind(m.params[i]);
  for (const auto& item : m.items)
    if (auto* pd = std::get_if<ast::ParamDecl>(&item.data))
      for (const auto& p : pd->params) bind(p);
  return env;
}

SignalTable module_signals(const ast::ModuleDecl& m, const ParamEnv& params) {
  SignalTable table;
  auto set_range = [&](SignalInfo& s, const std::optional<ast::Range>& r) {
    if (r) {
      s.msb = const_eval(r->msb, params);
      s.lsb = const_eval(r->lsb, params);
    } else {
      s.msb = s.lsb = 0;
    }
    s.width = static_cast<uint32_t>(std::llabs(s.msb - s.lsb) + 1);
  };
  auto dir_kind = [](ast::Direction d) {
    switch (d) {
      case ast::Direction::In: return SignalKind::Input;
      case ast::Direction::Out: return SignalKind::Output;
      default: return SignalKind::InOut;
    }
  };
  for (const auto& p : m.ports) {
    SignalInfo s;
    s.name = p.name;
    s.kind = dir_kind(p.direction);
    s.is_signed = p.is_signed;
    s.net_type = p.net_type;
    s.declared_reg = p.net_type == "reg" || p.net_type == "logic";
    set_range(s, p.range);
    table[p.name] = s;
  }
  for (const auto& item : m.items) {
    if (const auto* nd = std::get_if<ast::NetDecl>(&item.data)) {
      for (const auto& d : nd->names) {
        auto it = table.find(d.name);
        if (it != table.end()) {
          SignalInfo& s = it->second;
          // A non-ANSI port may be redeclared as reg/wire; anything else is a duplicate.
          if (!s.is_port() || m.ansi) throw ElabError("duplicate declaration of '" + d.name + "'");
          if (nd->type == "reg" || nd->type == "logic" || nd->type == "integer") s.declared_reg = true;
          if (!s.net_type.empty() && s.net_type != "wire" && s.net_type != nd->type)
            throw ElabError("conflicting declaration of '" + d.name + "'");
          s.net_type = nd->type;
          s.is_signed = s.is_signed || nd->is_signed;
          if (nd->range) {
            SignalInfo tmp;
            set_range(tmp, nd->range);
            if (tmp.width != s.width) throw ElabError("conflicting range for port '" + d.name + "'");
          }
          continue;
        }
        SignalInfo s;
        s.name = d.name;
        s.net_type = nd->type;
        s.is_array = d.is_array;
        if (nd->type == "integer") {
          s.kind = SignalKind::Integer;
          s.msb = 31;
          s.lsb = 0;
          s.width = 32;
          s.is_signed = true;
          s.declared_reg = true;
        } else {
          s.kind = (nd->type == "reg" || nd->type == "logic") ? SignalKind::Reg : SignalKind::Wire;
          s.declared_reg = s.kind == SignalKind::Reg;
          s.is_signed = nd->is_signed;
          set_range(s, nd->range);
        }
        table[d.name] = s;
      }
    }
  }
  return table;
}

bool is_context_binary(std::string_view op) {
  return op == "+" || op == "-" || op == "*" || op == "&" || op == "|" || op == "^" || op == "~^" ||
         op == "^~" || op == "/" || op == "%" || op == "**";
}

bool is_compare(std::string_view op) {
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=" ||
         op == "===" || op == "!==";
}

bool is_shift(std::string_view op) { return op == "<<" || op == ">>" || op == "<<<" || op == ">>>"; }

bool is_reduction(std::string_view op) {
  return op == "&" || op == "~&" || op == "|" || op == "~|" || op == "^" || op == "~^" || op == "^~";
}

Type Typer::type_of(const Expr& e) const {
  switch (e.kind) {
    case ExprKind::Number:
      if (e.num.sized) return {e.num.value.width(), e.num.is_signed};
      return {std::max<uint32_t>(32, e.num.value.width()), e.num.is_signed};
    case ExprKind::Ident: {
      if (auto it = signals_.find(e.name); it != signals_.end())
        return {it->second.width, it->second.is_signed};
      if (auto it = params_.find(e.name); it != params_.end())
        return {it->second.width, it->second.is_signed};
      throw ElabError("unknown identifier '" + e.name + "'");
    }
    case ExprKind::Index:
      return {1, false};
    case ExprKind::Range: {
      int64_t msb = const_eval(e.args[0], params_), lsb = const_eval(e.args[1], params_);
      return {static_cast<uint32_t>(std::llabs(msb - lsb) + 1), false};
    }
    case ExprKind::IndexedUp:
    case ExprKind::IndexedDown: {
      int64_t w = const_eval(e.args[1], params_);
      if (w < 1) throw ElabError("indexed part-select width must be positive");
      return {static_cast<uint32_t>(w), false};
    }
    case ExprKind::Unary: {
      if (e.name == "-" || e.name == "+" || e.name == "~") return type_of(e.args[0]);
      return {1, false};
    }
    case ExprKind::Binary: {
      const auto& op = e.name;
      if (is_compare(op) || op == "&&" || op == "||") return {1, false};
      Type a = type_of(e.args[0]);
      if (is_shift(op) || op == "**") return a;
      Type b = type_of(e.args[1]);
      return {std::max(a.width, b.width), a.is_signed && b.is_signed};
    }
    case ExprKind::Ternary: {
      Type a = type_of(e.args[1]), b = type_of(e.args[2]);
      return {std::max(a.width, b.width), a.is_signed && b.is_signed};
    }
    case ExprKind::Concat: {
      uint32_t w = 0;
      for (const auto& a : e.args) w += type_of(a).width;
      return {w, false};
    }
    case ExprKind::Replicate: {
      int64_t n = const_eval(e.args[0], params_);
      if (n < 1) throw ElabError("replication count must be positive");
      uint32_t w = 0;
      for (size_t i = 1; i < e.args.size(); ++i) w += type_of(e.args[i]).width;
      return {static_cast<uint32_t>(n) * w, false};
    }
    case ExprKind::Call: {
      if (e.name == "$signed" && e.args.size() == 1) return {type_of(e.args[0]).width, true};
      if (e.name == "$unsigned" && e.args.size() == 1) return {type_of(e.args[0]).width, false};
      if (e.name == "$clog2") return {32, true};
      throw ElabError("unsupported construct: call to '" + e.name + "'");
    }
    case ExprKind::String:
      throw ElabError("unsupported construct: string literal");
  }
  return {1, false};
}

const ast::Stmt& unwrap(const ast::Stmt& s) {
  const ast::Stmt* cur = &s;
  while (cur->kind == ast::StmtKind::Block && cur->body.size() == 1) cur = &cur->body[0];
  return *cur;
}

std::string lvalue_root(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Ident:
    case ExprKind::Index:
    case ExprKind::Range:
    case ExprKind::IndexedUp:
    case ExprKind::IndexedDown:
      return e.name;
    default:
      return {};
  }
}

namespace {

void collect_lvalue(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == ExprKind::Concat) {
    for (const auto& a : e.args) collect_lvalue(a, out);
    return;
  }
  auto r = lvalue_root(e);
  if (!r.empty() && std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
}

// Returns the polarity p such that `cond` is true exactly when signal == p.
std::optional<std::pair<std::string, bool>> reset_test(const Expr& cond) {
  if (cond.kind == ExprKind::Ident) return std::pair{cond.name, true};
  if (cond.kind == ExprKind::Unary && (cond.name == "!" || cond.name == "~") &&
      cond.args[0].kind == ExprKind::Ident)
    return std::pair{cond.args[0].name, false};
  if (cond.kind == ExprKind::Binary && (cond.name == "==" || cond.name == "!=") &&
      cond.args[0].kind == ExprKind::Ident && cond.args[1].kind == ExprKind::Number &&
      cond.args[1].num.xz.is_zero()) {
    bool one = !cond.args[1].num.value.is_zero();
    return std::pair{cond.args[0].name, cond.name == "==" ? one : !one};
  }
  return std::nullopt;
}

}  // namespace

void collect_targets(const ast::Stmt& s, std::vector<std::string>& out) {
  if (s.kind == ast::StmtKind::Blocking || s.kind == ast::StmtKind::NonBlocking) {
    collect_lvalue(s.lhs, out);
    return;
  }
  for (const auto& b : s.body) collect_targets(b, out);
}

AlwaysInfo analyze_always(const ast::Always& a, const SignalTable& signals) {
  AlwaysInfo info;
  if (a.keyword == "always_latch") throw ElabError("unsupported construct: always_latch");
  std::vector<const ast::SensItem*> edges;
  bool level = false;
  for (const auto& s : a.sens) {
    if (s.edge == ast::Edge::None)
      level = true;
    else
      edges.push_back(&s);
  }
  if (a.keyword == "always_comb" || a.star || edges.empty()) {
    if (a.keyword == "always" && !a.star && a.sens.empty())
      throw ElabError("unsupported construct: always without sensitivity list");
    return info;
  }
  if (level) throw ElabError("unsupported construct: mixed edge and level sensitivity");
  if (edges.size() > 2) throw ElabError("unsupported construct: more than two edge events");
  info.sequential = true;
  const ast::Stmt& top = unwrap(a.body);
  std::optional<std::pair<std::string, bool>> test;
  if (top.kind == ast::StmtKind::If) test = reset_test(top.rhs);

  if (edges.size() == 1) {
    info.clock = edges[0]->signal;
    info.negedge = edges[0]->edge == ast::Edge::Neg;
    if (test && test->first != info.clock) {
      auto it = signals.find(test->first);
      if (it != signals.end() && it->second.kind == SignalKind::Input && it->second.width == 1)
        info.reset = ResetInfo{test->first, test->second, false, 0};
    }
    return info;
  }
  const ast::SensItem* rst = nullptr;
  const ast::SensItem* clk = nullptr;
  for (auto* e : edges) {
    if (test && e->signal == test->first)
      rst = e;
    else
      clk = e;
  }
  if (!rst || !clk)
    throw ElabError("multiple clock domains: edge on '" + edges[1]->signal +
                    "' is not a recognized asynchronous reset");
  info.clock = clk->signal;
  info.negedge = clk->edge == ast::Edge::Neg;
  bool asserted = rst->edge == ast::Edge::Pos;
  size_t branch = (test->second == asserted) ? 0 : 1;
  if (branch >= top.body.size())
    throw ElabError("asynchronous reset '" + rst->signal + "' has no reset branch");
  info.reset = ResetInfo{rst->signal, asserted, true, branch};
  return info;
}

namespace {

void record_reset_assign(const ast::Stmt& s, const Typer& typer, const ParamEnv& params,
                         std::map<std::string, BitVec, std::less<>>& values,
                         std::map<std::string, BitVec, std::less<>>& covered) {
  if (s.kind == ast::StmtKind::Block) {
    for (const auto& b : s.body) record_reset_assign(b, typer, params, values, covered);
    return;
  }
  if (s.kind != ast::StmtKind::Blocking && s.kind != ast::StmtKind::NonBlocking) return;
  std::string root = lvalue_root(s.lhs);
  auto sig = typer.signals().find(root);
  if (root.empty() || sig == typer.signals().end()) return;
  int64_t v;
  Type t;
  try {
    v = const_eval(s.rhs, params);
    t = typer.type_of(s.rhs);
  } catch (const ElabError&) {
    return;
  }
  const SignalInfo& info = sig->second;
  BitVec& dst = values.try_emplace(root, BitVec(info.width)).first->second;
  BitVec& cov = covered.try_emplace(root, BitVec(info.width)).first->second;
  uint32_t lo = 0, w = info.width;
  try {
    if (s.lhs.kind == ExprKind::Index) {
      int64_t p = info.position(const_eval(s.lhs.args[0], params));
      if (p < 0) return;
      lo = static_cast<uint32_t>(p);
      w = 1;
    } else if (s.lhs.kind == ExprKind::Range) {
      int64_t a = info.position(const_eval(s.lhs.args[0], params));
      int64_t b = info.position(const_eval(s.lhs.args[1], params));
      if (a < 0 || b < 0) return;
      lo = static_cast<uint32_t>(std::min(a, b));
      w = static_cast<uint32_t>(std::llabs(a - b) + 1);
    } else if (s.lhs.kind != ExprKind::Ident) {
      return;
    }
  } catch (const ElabError&) {
    return;
  }
  BitVec val = BitVec(std::min<uint32_t>(t.width, 64), static_cast<uint64_t>(v)).resized(w, t.is_signed);
  for (uint32_t i = 0; i < w; ++i) {
    dst.set_bit(lo + i, val.bit(i));
    cov.set_bit(lo + i, true);
  }
}

}  // namespace

std::map<std::string, BitVec, std::less<>> register_reset_values(const ast::ModuleDecl& m,
                                                                  const SignalTable& signals,
                                                                  const ParamEnv& params) {
  std::map<std::string, BitVec, std::less<>> result;
  std::map<std::string, BitVec, std::less<>> reset_vals, covered;
  Typer typer(signals, params);
  std::vector<std::string> regs;
  for (const auto& item : m.items) {
    const auto* a = std::get_if<ast::Always>(&item.data);
    if (!a) continue;
    AlwaysInfo info;
    try {
      info = analyze_always(*a, signals);
    } catch (const ElabError&) {
      continue;
    }
    if (!info.sequential) continue;
    collect_targets(a->body, regs);
    if (info.reset) {
      const ast::Stmt& top = unwrap(a->body);
      record_reset_assign(top.body[info.reset->reset_branch], typer, params, reset_vals, covered);
    }
  }
  std::map<std::string, BitVec, std::less<>> inits;
  for (const auto& item : m.items) {
    const auto* nd = std::get_if<ast::NetDecl>(&item.data);
    if (!nd) continue;
    for (const auto& d : nd->names) {
      if (!d.init) continue;
      auto sig = signals.find(d.name);
      if (sig == signals.end()) continue;
      try {
        int64_t v = const_eval(*d.init, params);
        Type t = typer.type_of(*d.init);
        inits[d.name] = BitVec(std::min<uint32_t>(t.width, 64), static_cast<uint64_t>(v))
                            .resized(sig->second.width, t.is_signed);
      } catch (const ElabError&) {
      }
    }
  }
  for (const auto& r : regs) {
    auto sig = signals.find(r);
    if (sig == signals.end()) continue;
    uint32_t w = sig->second.width;
    BitVec v(w);
    if (auto it = inits.find(r); it != inits.end()) v = it->second;
    if (auto it = reset_vals.find(r); it != reset_vals.end()) {
      const BitVec& cov = covered.at(r);
      for (uint32_t i = 0; i < w; ++i)
        if (cov.bit(i)) v.set_bit(i, it->second.bit(i));
    }
    result[r] = v;
  }
  return result;
}

}  // namespace modbench::sema
