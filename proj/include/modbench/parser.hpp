#pragma once

#include <string_view>

#include "modbench/ast.hpp"

namespace modbench {

// Parses preprocessed Verilog into modules with byte-exact spans. Constructs
// outside the supported subset that appear inside a module body are kept as
// opaque items; they are rejected by elaboration, not here.
// Throws ParseError carrying the byte offset of the offending token.
ast::SourceUnit parse(std::string_view source);

ast::Number parse_number(std::string_view literal);

}  // namespace modbench
