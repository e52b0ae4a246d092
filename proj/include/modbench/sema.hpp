#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modbench/ast.hpp"
#include "modbench/bitvec.hpp"

// Language-level semantics shared by the elaborator and the reference
// interpreter: constant folding, Verilog expression sizing rules, signal
// tables and register reset-value inference.
namespace modbench::sema {

struct ParamValue {
  int64_t value = 0;
  uint32_t width = 32;
  bool is_signed = true;

  BitVec bits() const { return BitVec(width, static_cast<uint64_t>(value)); }
};

using ParamEnv = std::map<std::string, ParamValue, std::less<>>;

// Evaluates a constant integer expression over parameters. Throws ElabError
// for anything non-constant.
int64_t const_eval(const ast::Expr& e, const ParamEnv& params);

// Parameter values of `m` in declaration order (localparams included), with
// `overrides` applied to overridable parameters by name.
ParamEnv module_params(const ast::ModuleDecl& m, const ParamEnv& overrides = {});

struct Type {
  uint32_t width = 1;
  bool is_signed = false;
};

enum class SignalKind { Input, Output, InOut, Wire, Reg, Integer };

struct SignalInfo {
  std::string name;
  SignalKind kind = SignalKind::Wire;
  bool declared_reg = false;  // reg/integer/logic storage
  int64_t msb = 0;
  int64_t lsb = 0;
  uint32_t width = 1;
  bool is_signed = false;
  bool is_array = false;
  std::string net_type;  // declared net keyword

  bool is_port() const {
    return kind == SignalKind::Input || kind == SignalKind::Output || kind == SignalKind::InOut;
  }
  // Maps a declared index (e.g. 7 in [7:0]) to a 0-based bit position, or -1.
  int64_t position(int64_t index) const {
    int64_t p = msb >= lsb ? index - lsb : lsb - index;
    return (p < 0 || p >= static_cast<int64_t>(width)) ? -1 : p;
  }
};

using SignalTable = std::map<std::string, SignalInfo, std::less<>>;

// All ports, nets and variables declared in `m`. Throws ElabError on
// conflicting or malformed declarations.
SignalTable module_signals(const ast::ModuleDecl& m, const ParamEnv& params);

class Typer {
 public:
  Typer(const SignalTable& signals, const ParamEnv& params) : signals_(signals), params_(params) {}

  // Self-determined width and signedness.
  Type type_of(const ast::Expr& e) const;

  const SignalTable& signals() const { return signals_; }
  const ParamEnv& params() const { return params_; }

 private:
  const SignalTable& signals_;
  const ParamEnv& params_;
};

// Operator classes used by both evaluators.
bool is_context_binary(std::string_view op);  // + - * & | ^ ~^ ^~ / % **
bool is_compare(std::string_view op);         // == != < <= > >= === !==
bool is_shift(std::string_view op);           // << >> <<< >>>
bool is_reduction(std::string_view op);       // unary & ~& | ~| ^ ~^ ^~

struct ResetInfo {
  std::string signal;
  bool active_high = true;
  bool asynchronous = false;
  size_t reset_branch = 0;  // index into the top-level if's body
};

struct AlwaysInfo {
  bool sequential = false;
  std::string clock;  // local signal name
  bool negedge = false;
  std::optional<ResetInfo> reset;
};

// Classifies an always block. Throws ElabError for edge lists this subset
// cannot map onto one clock plus an optional reset.
AlwaysInfo analyze_always(const ast::Always& a, const SignalTable& signals);

// Initial (reset) value of every register bit of `m`: the constant assigned
// in a recognized reset branch, else a constant declaration initializer,
// else zero.
std::map<std::string, BitVec, std::less<>> register_reset_values(const ast::ModuleDecl& m,
                                                                  const SignalTable& signals,
                                                                  const ParamEnv& params);

// Unwraps single-statement begin/end blocks.
const ast::Stmt& unwrap(const ast::Stmt& s);

// Signals assigned by a statement tree (whole-signal granularity).
void collect_targets(const ast::Stmt& s, std::vector<std::string>& out);
std::string lvalue_root(const ast::Expr& e);

}  // namespace modbench::sema
