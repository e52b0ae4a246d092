#include "modbench/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "modbench/error.hpp"
#include "modbench/lexer.hpp"
#include "modbench/sema.hpp"

namespace modbench {

using ast::Expr;
using ast::ExprKind;
using ast::Stmt;
using ast::StmtKind;

ast::Number parse_number(std::string_view lit) {
  ast::Number n;
  std::string s;
  for (char c : lit)
    if (c != '_' && c != ' ' && c != '\t') s.push_back(c);
  auto q = s.find('\'');
  if (q == std::string::npos) {
    // Unsized decimal (real literals keep their integer part).
    BitVec v(64);
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) break;
      v = v * BitVec(64, 10) + BitVec(64, static_cast<uint64_t>(c - '0'));
    }
    uint32_t w = (v.to_u64() >> 31) ? 64 : 32;
    n.value = v.resized(w);
    n.xz = BitVec(w);
    n.is_signed = true;
    n.sized = false;
    return n;
  }
  uint32_t size = 32;
  n.sized = q > 0;
  if (n.sized) {
    size = static_cast<uint32_t>(std::stoul(s.substr(0, q)));
    if (size == 0 || size > 4096) throw ParseError("invalid literal size in '" + std::string(lit) + "'", 0);
  }
  size_t b = q + 1;
  if (b < s.size() && (s[b] == 's' || s[b] == 'S')) {
    n.is_signed = true;
    ++b;
  }
  char base = static_cast<char>(std::tolower(static_cast<unsigned char>(s[b])));
  std::string digits = s.substr(b + 1);
  if (digits.empty()) throw ParseError("malformed literal '" + std::string(lit) + "'", 0);
  auto is_xz = [](char c) { return c == 'x' || c == 'X' || c == 'z' || c == 'Z' || c == '?'; };
  if (base == 'd') {
    if (std::any_of(digits.begin(), digits.end(), is_xz)) {
      n.value = BitVec(size);
      n.xz = BitVec::ones(size);
      return n;
    }
    BitVec v(std::max<uint32_t>(size, 64));
    for (char c : digits) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad decimal digit in '" + std::string(lit) + "'", 0);
      v = v * BitVec(v.width(), 10) + BitVec(v.width(), static_cast<uint64_t>(c - '0'));
    }
    n.value = v.resized(size);
    n.xz = BitVec(size);
    return n;
  }
  uint32_t per = base == 'b' ? 1 : base == 'o' ? 3 : 4;
  uint32_t raw_w = static_cast<uint32_t>(digits.size()) * per;
  uint32_t w = std::max(raw_w, size);
  BitVec val(w), xz(w);
  for (size_t i = 0; i < digits.size(); ++i) {
    char c = digits[digits.size() - 1 - i];
    uint32_t lo = static_cast<uint32_t>(i) * per;
    if (is_xz(c)) {
      for (uint32_t k = 0; k < per; ++k) xz.set_bit(lo + k, true);
      continue;
    }
    unsigned d;
    if (std::isdigit(static_cast<unsigned char>(c)))
      d = static_cast<unsigned>(c - '0');
    else if (std::isxdigit(static_cast<unsigned char>(c)))
      d = static_cast<unsigned>(std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
    else
      throw ParseError("bad digit in '" + std::string(lit) + "'", 0);
    if (d >= (1u << per)) throw ParseError("digit out of range in '" + std::string(lit) + "'", 0);
    for (uint32_t k = 0; k < per; ++k) val.set_bit(lo + k, (d >> k) & 1);
  }
  if (is_xz(digits[0])) {
    for (uint32_t i = raw_w; i < w; ++i) xz.set_bit(i, true);
  }
  n.value = val.resized(size);
  n.xz = xz.resized(size);
  return n;
}

std::vector<std::string> ast::SourceUnit::unresolved_instances(const ModuleDecl& m) const {
  std::vector<std::string> out;
  for (const auto& item : m.items) {
    if (const auto* inst = std::get_if<Instance>(&item.data)) {
      if (!find(inst->module) && std::find(out.begin(), out.end(), inst->module) == out.end())
        out.push_back(inst->module);
    }
  }
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(lex(src)) {}

  ast::SourceUnit parse_unit() {
    ast::SourceUnit unit;
    size_t text_pos = 0;
    std::set<std::string> names;
    while (!at_end()) {
      if (peek().is("module") || peek().is("macromodule")) {
        ast::ModuleDecl m = parse_module();
        if (!names.insert(m.name).second)
          throw ParseError("duplicate module '" + m.name + "'", m.span.start);
        unit.trailing_text += std::string(src_.substr(text_pos, m.span.start - text_pos));
        text_pos = m.span.end;
        unit.modules.push_back(std::move(m));
        continue;
      }
      if (peek().is("endmodule")) throw ParseError("'endmodule' without matching 'module'", peek().offset);
      ++p_;
    }
    unit.trailing_text += std::string(src_.substr(text_pos));
    return unit;
  }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(p_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == TokKind::End; }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != TokKind::End) ++p_;
    return t;
  }
  bool accept(std::string_view s) {
    if (peek().is(s)) {
      ++p_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string near = t.kind == TokKind::End ? "end of input" : "'" + std::string(t.text) + "'";
    throw ParseError(msg + " near " + near, t.offset);
  }
  const Token& expect(std::string_view s) {
    if (!peek().is(s)) fail("expected '" + std::string(s) + "'");
    return next();
  }
  std::string expect_ident() {
    if (peek().kind != TokKind::Ident || is_keyword(peek().text))
      fail("expected identifier");
    return std::string(next().text);
  }
  uint32_t rel(size_t offset) const { return static_cast<uint32_t>(offset - mod_start_); }
  size_t prev_end() const { return toks_[p_ - 1].offset + toks_[p_ - 1].text.size(); }

  // ---- modules -----------------------------------------------------------

  ast::ModuleDecl parse_module() {
    ast::ModuleDecl m;
    mod_start_ = peek().offset;
    m.span.start = mod_start_;
    next();
    m.name = expect_ident();
    if (accept("#")) {
      expect("(");
      if (!peek().is(")")) {
        bool local = false;
        bool first = true;
        while (true) {
          bool kw = false;
          if (accept("parameter")) {
            local = false;
            kw = true;
          } else if (accept("localparam")) {
            local = true;
            kw = true;
          }
          if (first && !kw) local = false;
          first = false;
          ast::Param proto = parse_param_type();
          ast::Param prm = parse_param_assign(proto, local);
          m.params.push_back(std::move(prm));
          if (accept(",")) continue;
          break;
        }
      }
      expect(")");
    }
    std::vector<std::string> header_names;
    if (accept("(")) {
      if (!peek().is(")")) parse_port_list(m, header_names);
      expect(")");
    }
    expect(";");
    m.header_end = rel(prev_end());

    std::vector<ast::PortItem> body_ports;
    while (true) {
      if (at_end()) fail("missing 'endmodule' for module '" + m.name + "'");
      if (peek().is("endmodule")) {
        const Token& t = next();
        m.span.end = t.offset + t.text.size();
        break;
      }
      if (peek().is("module")) fail("missing 'endmodule' for module '" + m.name + "'");
      parse_item(m, body_ports);
    }

    if (!m.ansi) {
      for (const auto& n : header_names) {
        ast::PortDecl pd;
        pd.name = n;
        bool found = false;
        for (const auto& pi : body_ports) {
          if (std::find(pi.names.begin(), pi.names.end(), n) == pi.names.end()) continue;
          if (found) throw ParseError("port '" + n + "' declared twice", m.span.start);
          found = true;
          pd.direction = pi.direction;
          pd.net_type = pi.net_type;
          pd.is_signed = pi.is_signed;
          pd.range = pi.range;
        }
        if (!found) throw ParseError("malformed port list: port '" + n + "' has no direction", m.span.start);
        m.ports.push_back(std::move(pd));
      }
      for (const auto& pi : body_ports)
        for (const auto& n : pi.names)
          if (std::find(header_names.begin(), header_names.end(), n) == header_names.end())
            throw ParseError("'" + n + "' declared as port but missing from port list", m.span.start);
      for (const auto& item : m.items) {
        if (const auto* nd = std::get_if<ast::NetDecl>(&item.data)) {
          for (const auto& d : nd->names)
            for (auto& pd : m.ports)
              if (pd.name == d.name && (nd->type == "reg" || nd->type == "logic")) pd.net_type = nd->type;
        }
      }
    }
    try {
      sema::ParamEnv env = sema::module_params(m);
      for (auto& pd : m.ports) {
        if (!pd.range) {
          pd.width = 1;
          continue;
        }
        int64_t msb = sema::const_eval(pd.range->msb, env), lsb = sema::const_eval(pd.range->lsb, env);
        pd.width = static_cast<uint32_t>(std::llabs(msb - lsb) + 1);
      }
      for (auto& prm : m.params) prm.default_value = env.at(prm.name).value;
    } catch (const ElabError& e) {
      throw ParseError("module '" + m.name + "': " + e.what(), m.span.start);
    }
    return m;
  }

  ast::Param parse_param_type() {
    ast::Param p;
    if (accept("integer")) p.is_signed = true;
    if (peek().is("signed")) {
      next();
      p.is_signed = true;
    }
    if (peek().is("[")) p.range = parse_range();
    return p;
  }

  ast::Param parse_param_assign(const ast::Param& proto, bool local) {
    ast::Param p = proto;
    p.local = local;
    p.name = expect_ident();
    expect("=");
    p.value = parse_expr();
    return p;
  }

  ast::Range parse_range() {
    expect("[");
    ast::Range r;
    r.msb = parse_expr();
    expect(":");
    r.lsb = parse_expr();
    expect("]");
    return r;
  }

  static bool is_direction(const Token& t) { return t.is("input") || t.is("output") || t.is("inout"); }
  static ast::Direction to_direction(std::string_view s) {
    if (s == "input") return ast::Direction::In;
    if (s == "output") return ast::Direction::Out;
    return ast::Direction::InOut;
  }
  static bool is_net_type(const Token& t) {
    return t.is("wire") || t.is("reg") || t.is("logic") || t.is("tri") || t.is("wand") || t.is("wor") ||
           t.is("integer") || t.is("supply0") || t.is("supply1");
  }

  void parse_port_list(ast::ModuleDecl& m, std::vector<std::string>& header_names) {
    if (!is_direction(peek())) {
      m.ansi = false;
      while (true) {
        header_names.push_back(expect_ident());
        if (!accept(",")) break;
      }
      return;
    }
    ast::PortDecl cur;
    while (true) {
      if (is_direction(peek())) {
        cur = ast::PortDecl{};
        cur.direction = to_direction(next().text);
        if (is_net_type(peek())) cur.net_type = std::string(next().text);
        if (accept("signed")) cur.is_signed = true;
        accept("unsigned");
        if (peek().is("[")) cur.range = parse_range();
      }
      cur.name = expect_ident();
      if (peek().is("[")) fail("unpacked port dimensions are not supported");
      m.ports.push_back(cur);
      if (!accept(",")) break;
    }
  }

  // Skips to the next ';' at bracket depth 0 and returns the consumed text.
  void skip_to_semicolon() {
    int depth = 0;
    while (!at_end()) {
      const Token& t = peek();
      if (t.is("endmodule") && depth == 0) fail("expected ';'");
      if (t.is("(") || t.is("[") || t.is("{")) ++depth;
      if (t.is(")") || t.is("]") || t.is("}")) --depth;
      next();
      if (t.is(";") && depth <= 0) return;
    }
    fail("expected ';'");
  }

  void skip_until(std::string_view open, std::string_view close) {
    int depth = 0;
    while (!at_end()) {
      const Token& t = next();
      if (t.is(open)) ++depth;
      if (t.is(close)) {
        if (depth == 0) return;
        --depth;
      }
      if (t.is("endmodule")) fail("missing '" + std::string(close) + "'");
    }
    fail("missing '" + std::string(close) + "'");
  }

  void skip_parens() {
    expect("(");
    int depth = 1;
    while (!at_end() && depth > 0) {
      const Token& t = next();
      if (t.is("(")) ++depth;
      if (t.is(")")) --depth;
    }
    if (depth != 0) fail("unbalanced parentheses");
  }

  // Loop/conditional generate constructs written without `generate`.
  void skip_generate_construct() {
    const Token& kw = next();
    if (kw.is("else")) {
      if (peek().is("if")) {
        skip_generate_construct();
        return;
      }
    } else {
      skip_parens();
    }
    if (accept("begin")) {
      if (accept(":")) expect_ident();
      skip_until("begin", "end");
    } else if (peek().is("if") || peek().is("for")) {
      skip_generate_construct();
    } else {
      skip_to_semicolon();
    }
    if (peek().is("else")) skip_generate_construct();
  }

  void push_item(ast::ModuleDecl& m, size_t start, decltype(ast::Item::data) data) {
    ast::Item it;
    it.start = rel(start);
    it.end = rel(prev_end());
    it.data = std::move(data);
    m.items.push_back(std::move(it));
  }

  void push_opaque(ast::ModuleDecl& m, size_t start, std::string keyword) {
    ast::Opaque o;
    o.keyword = std::move(keyword);
    o.text = std::string(src_.substr(start, prev_end() - start));
    push_item(m, start, std::move(o));
  }

  void parse_item(ast::ModuleDecl& m, std::vector<ast::PortItem>& body_ports) {
    const Token& t = peek();
    size_t start = t.offset;
    if (t.is(";")) {
      next();
      return;
    }
    if (is_direction(t)) {
      if (m.ansi && !m.ports.empty()) fail("port redeclared in body of ANSI-style module");
      if (m.ansi) m.ansi = false;
      ast::PortItem pi;
      pi.direction = to_direction(next().text);
      if (is_net_type(peek())) pi.net_type = std::string(next().text);
      if (accept("signed")) pi.is_signed = true;
      if (peek().is("[")) pi.range = parse_range();
      while (true) {
        pi.names.push_back(expect_ident());
        if (!accept(",")) break;
      }
      expect(";");
      body_ports.push_back(pi);
      push_item(m, start, pi);
      return;
    }
    if (is_net_type(t)) {
      ast::NetDecl nd;
      nd.type = std::string(next().text);
      if (accept("signed")) nd.is_signed = true;
      accept("unsigned");
      if (peek().is("[")) nd.range = parse_range();
      while (true) {
        ast::Declarator d;
        d.name = expect_ident();
        while (peek().is("[")) {
          parse_range();
          d.is_array = true;
        }
        if (accept("=")) d.init = parse_expr();
        nd.names.push_back(std::move(d));
        if (!accept(",")) break;
      }
      expect(";");
      push_item(m, start, std::move(nd));
      return;
    }
    if (t.is("parameter") || t.is("localparam")) {
      bool local = next().is("localparam");
      ast::ParamDecl pd;
      ast::Param proto = parse_param_type();
      while (true) {
        pd.params.push_back(parse_param_assign(proto, local));
        if (!accept(",")) break;
      }
      expect(";");
      for (const auto& p : pd.params)
        if (!p.local) m.params.push_back(p);
      push_item(m, start, std::move(pd));
      return;
    }
    if (t.is("assign")) {
      next();
      if (accept("#")) parse_primary();
      ast::ContAssign ca;
      while (true) {
        Expr lhs = parse_lvalue();
        expect("=");
        Expr rhs = parse_expr();
        ca.assigns.emplace_back(std::move(lhs), std::move(rhs));
        if (!accept(",")) break;
      }
      expect(";");
      push_item(m, start, std::move(ca));
      return;
    }
    if (t.is("always") || t.is("always_ff") || t.is("always_comb") || t.is("always_latch")) {
      ast::Always a;
      a.keyword = std::string(next().text);
      if (a.keyword != "always_comb") {
        if (accept("@*")) {
          a.star = true;
        } else if (accept("@")) {
          if (accept("*")) {
            a.star = true;
          } else {
            expect("(");
            if (accept("*")) {
              a.star = true;
            } else {
              while (true) {
                ast::SensItem si;
                if (accept("posedge"))
                  si.edge = ast::Edge::Pos;
                else if (accept("negedge"))
                  si.edge = ast::Edge::Neg;
                si.signal = expect_ident();
                a.sens.push_back(si);
                if (accept("or") || accept(",")) continue;
                break;
              }
            }
            expect(")");
          }
        }
      }
      a.body = parse_stmt();
      push_item(m, start, std::move(a));
      return;
    }
    if (t.is("initial")) {
      next();
      parse_stmt();
      push_opaque(m, start, "initial");
      return;
    }
    if (t.is("generate")) {
      next();
      skip_until("generate", "endgenerate");
      push_opaque(m, start, "generate");
      return;
    }
    if (t.is("function") || t.is("task") || t.is("specify")) {
      std::string kw(next().text);
      skip_until(kw, "end" + kw);
      push_opaque(m, start, kw);
      return;
    }
    if (t.is("for") || t.is("if") || t.is("case")) {
      std::string kw(t.text);
      if (t.is("case")) {
        next();
        skip_until("case", "endcase");
      } else {
        skip_generate_construct();
      }
      push_opaque(m, start, kw);
      return;
    }
    if (t.kind == TokKind::Ident && !is_keyword(t.text) &&
        (peek(1).kind == TokKind::Ident || peek(1).is("#"))) {
      parse_instances(m, start);
      return;
    }
    if (t.kind == TokKind::Ident) {
      std::string kw(t.text);
      skip_to_semicolon();
      push_opaque(m, start, kw);
      return;
    }
    fail("unexpected token in module body");
  }

  std::vector<ast::Connection> parse_connections() {
    std::vector<ast::Connection> out;
    expect("(");
    if (accept(")")) return out;
    while (true) {
      ast::Connection c;
      if (accept(".")) {
        c.port = expect_ident();
        if (accept("(")) {
          if (!peek().is(")")) c.expr = parse_expr();
          expect(")");
        } else {
          Expr e;  // .name shorthand
          e.kind = ExprKind::Ident;
          e.name = c.port;
          c.expr = e;
        }
      } else if (peek().is(",") || peek().is(")")) {
        // empty positional connection
      } else {
        c.expr = parse_expr();
      }
      out.push_back(std::move(c));
      if (!accept(",")) break;
    }
    expect(")");
    return out;
  }

  void parse_instances(ast::ModuleDecl& m, size_t start) {
    std::string module(next().text);
    std::vector<ast::Connection> params;
    if (accept("#")) {
      if (peek().is("(")) {
        params = parse_connections();
      } else {
        ast::Connection c;
        c.expr = parse_primary();
        params.push_back(c);
      }
    }
    while (true) {
      ast::Instance inst;
      inst.module = module;
      inst.params = params;
      inst.name = expect_ident();
      if (peek().is("[")) fail("instance arrays are not supported");
      inst.ports = parse_connections();
      bool more = accept(",");
      if (!more) expect(";");
      push_item(m, start, std::move(inst));
      if (!more) break;
    }
  }

  // ---- statements ----------------------------------------------------------

  Stmt opaque_from(size_t start) {
    Stmt s;
    s.kind = StmtKind::Opaque;
    s.pos = rel(start);
    s.text = std::string(src_.substr(start, prev_end() - start));
    return s;
  }

  Stmt parse_stmt() {
    const Token& t = peek();
    size_t start = t.offset;
    Stmt s;
    s.pos = rel(start);
    if (t.is(";")) {
      next();
      s.kind = StmtKind::Null;
      return s;
    }
    if (t.is("begin")) {
      next();
      if (accept(":")) expect_ident();
      s.kind = StmtKind::Block;
      while (!peek().is("end")) {
        if (at_end() || peek().is("endmodule")) fail("missing 'end'");
        s.body.push_back(parse_stmt());
      }
      next();
      if (accept(":")) expect_ident();
      return s;
    }
    if (t.is("if")) {
      next();
      expect("(");
      s.kind = StmtKind::If;
      s.rhs = parse_expr();
      expect(")");
      s.body.push_back(parse_stmt());
      if (accept("else")) s.body.push_back(parse_stmt());
      return s;
    }
    if (t.is("unique") || t.is("priority")) {
      next();
      return parse_stmt();
    }
    if (t.is("case") || t.is("casez") || t.is("casex")) {
      s.kind = StmtKind::Case;
      s.text = std::string(next().text);
      expect("(");
      s.rhs = parse_expr();
      expect(")");
      while (!accept("endcase")) {
        if (at_end() || peek().is("endmodule")) fail("missing 'endcase'");
        std::vector<Expr> labels;
        if (accept("default")) {
          accept(":");
        } else {
          while (true) {
            labels.push_back(parse_expr());
            if (!accept(",")) break;
          }
          expect(":");
        }
        s.labels.push_back(std::move(labels));
        s.body.push_back(parse_stmt());
      }
      return s;
    }
    if (t.is("#")) {
      next();
      parse_primary();
      parse_stmt();
      return opaque_from(start);
    }
    if (t.is("@")) {
      next();
      if (!accept("*")) skip_parens();
      parse_stmt();
      return opaque_from(start);
    }
    if (t.is("@*")) {
      next();
      parse_stmt();
      return opaque_from(start);
    }
    if (t.is("for") || t.is("while") || t.is("repeat")) {
      next();
      skip_parens();
      parse_stmt();
      return opaque_from(start);
    }
    if (t.is("forever")) {
      next();
      parse_stmt();
      return opaque_from(start);
    }
    if (t.is("fork")) {
      next();
      skip_until("fork", "join");
      return opaque_from(start);
    }
    if (t.kind == TokKind::SysIdent || t.is("disable") || t.is("wait") || t.is("->") ||
        t.is("assert") || t.is("return")) {
      skip_to_semicolon();
      return opaque_from(start);
    }
    if (t.kind == TokKind::Ident && !is_keyword(t.text) && (peek(1).is("(") || peek(1).is(";"))) {
      skip_to_semicolon();  // task enable
      return opaque_from(start);
    }
    if (t.kind == TokKind::Ident && !is_keyword(t.text) && (peek(1).is("++") || peek(1).is("--"))) {
      skip_to_semicolon();
      return opaque_from(start);
    }
    Expr lhs = parse_lvalue();
    if (accept("=")) {
      s.kind = StmtKind::Blocking;
    } else if (accept("<=")) {
      s.kind = StmtKind::NonBlocking;
    } else {
      fail("expected assignment");
    }
    if (accept("#")) parse_primary();
    s.lhs = std::move(lhs);
    s.rhs = parse_expr();
    expect(";");
    return s;
  }

  // ---- expressions ---------------------------------------------------------

  Expr parse_lvalue() {
    if (peek().is("{")) {
      next();
      Expr e;
      e.kind = ExprKind::Concat;
      while (true) {
        e.args.push_back(parse_lvalue());
        if (!accept(",")) break;
      }
      expect("}");
      return e;
    }
    if (peek().kind != TokKind::Ident || is_keyword(peek().text)) fail("expected assignment target");
    Expr id;
    id.kind = ExprKind::Ident;
    id.name = std::string(next().text);
    return parse_selects(std::move(id));
  }

  static int binary_prec(const Token& t) {
    if (t.kind != TokKind::Op) return -1;
    auto s = t.text;
    if (s == "||") return 1;
    if (s == "&&") return 2;
    if (s == "|") return 3;
    if (s == "^" || s == "~^" || s == "^~") return 4;
    if (s == "&") return 5;
    if (s == "==" || s == "!=" || s == "===" || s == "!==") return 6;
    if (s == "<" || s == "<=" || s == ">" || s == ">=") return 7;
    if (s == "<<" || s == ">>" || s == "<<<" || s == ">>>") return 8;
    if (s == "+" || s == "-") return 9;
    if (s == "*" || s == "/" || s == "%") return 10;
    if (s == "**") return 11;
    return -1;
  }

  Expr parse_expr() {
    Expr cond = parse_binary(1);
    if (accept("?")) {
      Expr e;
      e.kind = ExprKind::Ternary;
      e.args.push_back(std::move(cond));
      e.args.push_back(parse_expr());
      expect(":");
      e.args.push_back(parse_expr());
      return e;
    }
    return cond;
  }

  Expr parse_binary(int min_prec) {
    Expr lhs = parse_unary();
    while (true) {
      int prec = binary_prec(peek());
      if (prec < min_prec) break;
      std::string op(next().text);
      Expr rhs = parse_binary(op == "**" ? prec : prec + 1);
      Expr e;
      e.kind = ExprKind::Binary;
      e.name = std::move(op);
      e.args.push_back(std::move(lhs));
      e.args.push_back(std::move(rhs));
      lhs = std::move(e);
    }
    return lhs;
  }

  Expr parse_unary() {
    const Token& t = peek();
    if (t.kind == TokKind::Op &&
        (t.text == "!" || t.text == "~" || t.text == "-" || t.text == "+" || t.text == "&" ||
         t.text == "|" || t.text == "^" || t.text == "~&" || t.text == "~|" || t.text == "~^" ||
         t.text == "^~")) {
      Expr e;
      e.kind = ExprKind::Unary;
      e.name = std::string(next().text);
      e.args.push_back(parse_unary());
      return e;
    }
    return parse_primary();
  }

  Expr parse_selects(Expr base) {
    while (peek().is("[")) {
      next();
      Expr first = parse_expr();
      Expr sel;
      if (accept(":")) {
        sel.kind = ExprKind::Range;
        sel.args.push_back(std::move(first));
        sel.args.push_back(parse_expr());
      } else if (accept("+:")) {
        sel.kind = ExprKind::IndexedUp;
        sel.args.push_back(std::move(first));
        sel.args.push_back(parse_expr());
      } else if (accept("-:")) {
        sel.kind = ExprKind::IndexedDown;
        sel.args.push_back(std::move(first));
        sel.args.push_back(parse_expr());
      } else {
        sel.kind = ExprKind::Index;
        sel.args.push_back(std::move(first));
      }
      expect("]");
      if (base.kind == ExprKind::Ident) {
        sel.name = base.name;
        base = std::move(sel);
      } else {
        // Chained selects (memories, multi-dimensional) stay representable
        // but are rejected by elaboration.
        Expr chained;
        chained.kind = ExprKind::Call;
        chained.name = "[]";
        chained.args.push_back(std::move(base));
        for (auto& a : sel.args) chained.args.push_back(std::move(a));
        base = std::move(chained);
      }
    }
    return base;
  }

  Expr parse_primary() {
    const Token& t = peek();
    if (t.kind == TokKind::Number) {
      Expr e;
      e.kind = ExprKind::Number;
      try {
        e.num = parse_number(t.text);
      } catch (const ParseError& pe) {
        throw ParseError(pe.what(), t.offset);
      }
      next();
      return e;
    }
    if (t.kind == TokKind::String) {
      Expr e;
      e.kind = ExprKind::String;
      e.name = std::string(t.text);
      next();
      return e;
    }
    if (t.is("(")) {
      next();
      Expr e = parse_expr();
      if (accept(":")) {  // min:typ:max
        parse_expr();
        expect(":");
        parse_expr();
      }
      expect(")");
      return e;
    }
    if (t.is("{")) {
      next();
      Expr first = parse_expr();
      if (peek().is("{")) {
        next();
        Expr e;
        e.kind = ExprKind::Replicate;
        e.args.push_back(std::move(first));
        while (true) {
          e.args.push_back(parse_expr());
          if (!accept(",")) break;
        }
        expect("}");
        expect("}");
        return e;
      }
      Expr e;
      e.kind = ExprKind::Concat;
      e.args.push_back(std::move(first));
      while (accept(",")) e.args.push_back(parse_expr());
      expect("}");
      return e;
    }
    if (t.kind == TokKind::SysIdent || (t.kind == TokKind::Ident && !is_keyword(t.text))) {
      bool sys = t.kind == TokKind::SysIdent;
      std::string name(next().text);
      while (!sys && peek().is(".") && peek(1).kind == TokKind::Ident) {
        next();
        name += "." + std::string(next().text);
      }
      if (peek().is("(")) {
        next();
        Expr e;
        e.kind = ExprKind::Call;
        e.name = std::move(name);
        if (!peek().is(")")) {
          while (true) {
            e.args.push_back(parse_expr());
            if (!accept(",")) break;
          }
        }
        expect(")");
        return e;
      }
      Expr e;
      e.kind = sys ? ExprKind::Call : ExprKind::Ident;
      e.name = std::move(name);
      return sys ? e : parse_selects(std::move(e));
    }
    fail("expected expression");
  }

  std::string_view src_;
  std::vector<Token> toks_;
  size_t p_ = 0;
  size_t mod_start_ = 0;
};

}  // namespace

ast::SourceUnit parse(std::string_view source) { return Parser(source).parse_unit(); }

}  // namespace modbench
