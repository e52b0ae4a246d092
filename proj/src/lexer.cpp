#include "modbench/lexer.hpp"

#include <array>
#include <cctype>
#include <string>

#include "modbench/error.hpp"

namespace modbench {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

constexpr std::array<std::string_view, 7> kLineDirectives = {
    "timescale", "default_nettype", "resetall", "celldefine", "endcelldefine",
    "nounconnected_drive", "unconnected_drive"};

constexpr std::array<std::string_view, 24> kOps = {
    "<<<", ">>>", "===", "!==", "~&", "~|", "~^", "^~", "==", "!=", "<=", ">=",
    "&&",  "||",  "<<",  ">>",  "**", "+:", "-:", "->", "::", "++", "--", "@*"};

}  // namespace

bool is_keyword(std::string_view w) {
  static constexpr std::array<std::string_view, 60> kw = {
      "module",   "endmodule", "input",     "output",   "inout",      "wire",      "reg",
      "logic",    "integer",   "parameter", "localparam", "assign",   "always",    "always_ff",
      "always_comb", "always_latch", "initial", "begin", "end",       "if",        "else",
      "case",     "casez",     "casex",     "endcase",  "default",    "posedge",   "negedge",
      "or",       "and",       "not",       "generate", "endgenerate", "genvar",   "for",
      "function", "endfunction", "task",    "endtask",  "signed",     "unsigned",  "while",
      "repeat",   "forever",   "specify",   "endspecify", "defparam", "supply0",   "supply1",
      "tri",      "real",      "time",      "event",    "wand",       "wor",       "buf",
      "xor",      "nand",      "nor",       "xnor"};
  for (auto k : kw)
    if (k == w) return true;
  return false;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  size_t i = 0, n = src.size();
  auto push = [&](TokKind k, size_t start, size_t end) {
    out.push_back(Token{k, src.substr(start, end - start), start});
  };
  while (i < n) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError("unterminated block comment", i);
      i = end + 2;
      continue;
    }
    if (c == '(' && i + 1 < n && src[i + 1] == '*') {
      // Attribute instance, unless this is the `@(*)` sensitivity list.
      size_t j = i + 2;
      while (j < n && std::isspace(static_cast<unsigned char>(src[j]))) ++j;
      if (j < n && src[j] != ')') {
        size_t end = src.find("*)", i + 2);
        if (end == std::string_view::npos) throw ParseError("unterminated attribute", i);
        i = end + 2;
        continue;
      }
    }
    if (c == '`') {
      size_t j = i + 1;
      while (j < n && ident_char(src[j])) ++j;
      std::string_view name = src.substr(i + 1, j - i - 1);
      bool line_directive = false;
      for (auto d : kLineDirectives) line_directive |= (d == name);
      if (!line_directive) throw ParseError("unexpanded macro or directive '`" + std::string(name) + "'", i);
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < n && src[j] != '"') {
        if (src[j] == '\\') ++j;
        if (src[j] == '\n') throw ParseError("unterminated string", i);
        ++j;
      }
      if (j >= n) throw ParseError("unterminated string", i);
      push(TokKind::String, i, j + 1);
      i = j + 1;
      continue;
    }
    if (c == '\\') {
      size_t j = i + 1;
      while (j < n && !std::isspace(static_cast<unsigned char>(src[j]))) ++j;
      push(TokKind::Ident, i, j);
      i = j;
      continue;
    }
    if (ident_start(c)) {
      size_t j = i + 1;
      while (j < n && ident_char(src[j])) ++j;
      push(TokKind::Ident, i, j);
      i = j;
      continue;
    }
    if (c == '$') {
      size_t j = i + 1;
      while (j < n && ident_char(src[j])) ++j;
      push(TokKind::SysIdent, i, j);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
      size_t j = i;
      while (j < n && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      // Real literal: digits '.' digits
      if (j < n && src[j] == '.' && j + 1 < n && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
        push(TokKind::Number, i, j);
        i = j;
        continue;
      }
      size_t k = j;
      while (k < n && (src[k] == ' ' || src[k] == '\t')) ++k;
      if (k < n && src[k] == '\'' && k + 1 < n) {
        size_t b = k + 1;
        if (b < n && (src[b] == 's' || src[b] == 'S')) ++b;
        if (b < n && std::string_view("bBoOdDhH").find(src[b]) != std::string_view::npos) {
          ++b;
          while (b < n && (src[b] == ' ' || src[b] == '\t')) ++b;
          size_t d = b;
          while (d < n && (std::isxdigit(static_cast<unsigned char>(src[d])) || src[d] == '_' ||
                           src[d] == 'x' || src[d] == 'X' || src[d] == 'z' || src[d] == 'Z' ||
                           src[d] == '?'))
            ++d;
          if (d == b) throw ParseError("malformed based literal", i);
          push(TokKind::Number, i, d);
          i = d;
          continue;
        }
      }
      if (j == i) {
        // A lone quote that does not start a based literal.
        push(TokKind::Op, i, i + 1);
        ++i;
        continue;
      }
      push(TokKind::Number, i, j);
      i = j;
      continue;
    }
    bool matched = false;
    for (auto op : kOps) {
      if (src.substr(i, op.size()) == op) {
        push(TokKind::Op, i, i + op.size());
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("()[]{};:,.#@=+-*/%&|^~!?<>'").find(c) != std::string_view::npos) {
      push(TokKind::Op, i, i + 1);
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i);
  }
  out.push_back(Token{TokKind::End, src.substr(n, 0), n});
  return out;
}

}  // namespace modbench
