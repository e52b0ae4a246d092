#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace modbench {

enum class TokKind { Ident, Number, String, SysIdent, Op, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string_view text;
  size_t offset = 0;  // byte offset into the lexed source

  bool is(std::string_view s) const { return (kind == TokKind::Op || kind == TokKind::Ident) && text == s; }
};

// Tokenizes preprocessed Verilog. Comments and attribute instances are
// dropped; `timescale-style directives are skipped to end of line; any other
// backtick token is reported as an unexpanded macro (ParseError).
std::vector<Token> lex(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace modbench
