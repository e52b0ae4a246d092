#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "modbench/bitvec.hpp"

namespace modbench::ast {

// Positions stored inside a module are relative to the module's start byte, so
// a module reparsed from its own slice compares equal to the original.

struct Number {
  BitVec value;
  BitVec xz;  // set bits mark x/z/? digits
  bool sized = false;
  bool is_signed = false;
  bool operator==(const Number&) const = default;
};

enum class ExprKind {
  Number,
  Ident,
  Index,        // name[args0]
  Range,        // name[args0:args1]
  IndexedUp,    // name[args0 +: args1]
  IndexedDown,  // name[args0 -: args1]
  Unary,        // op args0
  Binary,       // args0 op args1
  Ternary,      // args0 ? args1 : args2
  Concat,       // {args...}
  Replicate,    // {args0{args1...}}
  Call,         // name(args...), functions and system functions
  String,
};

struct Expr {
  ExprKind kind = ExprKind::Number;
  std::string name;  // identifier, operator, or callee
  Number num;
  std::vector<Expr> args;
  bool operator==(const Expr&) const = default;
};

enum class StmtKind { Block, If, Case, Blocking, NonBlocking, Null, Opaque };

struct Stmt {
  StmtKind kind = StmtKind::Null;
  uint32_t pos = 0;
  std::string text;  // opaque source text, or "case"/"casez"/"casex"
  Expr lhs;          // assignment target
  Expr rhs;          // assignment value, if condition, case subject
  std::vector<Stmt> body;                 // block statements; if: then[, else]; case: one per item
  std::vector<std::vector<Expr>> labels;  // case labels per item; empty = default
  bool operator==(const Stmt&) const = default;
};

struct Range {
  Expr msb;
  Expr lsb;
  bool operator==(const Range&) const = default;
};

enum class Direction { In, Out, InOut };

struct PortDecl {
  std::string name;
  Direction direction = Direction::In;
  uint32_t width = 1;  // evaluated with default parameters
  bool is_signed = false;
  std::string net_type;  // "wire", "reg", or empty
  std::optional<Range> range;
  bool operator==(const PortDecl&) const = default;
};

struct Param {
  std::string name;
  int64_t default_value = 0;
  Expr value;
  std::optional<Range> range;
  bool is_signed = false;
  bool local = false;
  bool operator==(const Param&) const = default;
};

struct Declarator {
  std::string name;
  std::optional<Expr> init;
  bool is_array = false;
  bool operator==(const Declarator&) const = default;
};

struct NetDecl {
  std::string type;  // wire, reg, logic, integer, ...
  bool is_signed = false;
  std::optional<Range> range;
  std::vector<Declarator> names;
  bool operator==(const NetDecl&) const = default;
};

struct ParamDecl {
  std::vector<Param> params;
  bool operator==(const ParamDecl&) const = default;
};

// Non-ANSI port direction declaration in a module body.
struct PortItem {
  Direction direction = Direction::In;
  std::string net_type;
  bool is_signed = false;
  std::optional<Range> range;
  std::vector<std::string> names;
  bool operator==(const PortItem&) const = default;
};

struct ContAssign {
  std::vector<std::pair<Expr, Expr>> assigns;
  bool operator==(const ContAssign&) const = default;
};

enum class Edge { None, Pos, Neg };

struct SensItem {
  Edge edge = Edge::None;
  std::string signal;
  bool operator==(const SensItem&) const = default;
};

struct Always {
  std::string keyword;  // always, always_ff, always_comb
  bool star = false;
  std::vector<SensItem> sens;
  Stmt body;
  bool operator==(const Always&) const = default;
};

struct Connection {
  std::string port;  // empty for positional
  std::optional<Expr> expr;
  bool operator==(const Connection&) const = default;
};

struct Instance {
  std::string module;
  std::vector<Connection> params;
  std::string name;
  std::vector<Connection> ports;
  bool operator==(const Instance&) const = default;
};

struct Opaque {
  std::string keyword;  // construct that introduced it, e.g. "generate"
  std::string text;
  bool operator==(const Opaque&) const = default;
};

struct Item {
  uint32_t start = 0;
  uint32_t end = 0;
  std::variant<NetDecl, ParamDecl, PortItem, ContAssign, Always, Instance, Opaque> data;
  bool operator==(const Item&) const = default;
};

struct Span {
  size_t start = 0;
  size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct ModuleDecl {
  std::string name;
  std::vector<PortDecl> ports;
  std::vector<Param> params;  // overridable parameters (header and body), in order
  std::vector<Item> items;
  Span span;                  // absolute, into the parsed text
  uint32_t header_end = 0;    // relative offset just past the header's ';'
  bool ansi = true;

  // Structural equality, ignoring where the module sits in its text.
  bool same_structure(const ModuleDecl& o) const {
    return name == o.name && ports == o.ports && params == o.params && items == o.items &&
           header_end == o.header_end && ansi == o.ansi;
  }
};

struct SourceUnit {
  std::vector<ModuleDecl> modules;
  std::string trailing_text;  // text outside every module, concatenated

  const ModuleDecl* find(const std::string& name) const {
    for (const auto& m : modules)
      if (m.name == name) return &m;
    return nullptr;
  }
  // Instance targets inside `m` that no module of this unit defines.
  std::vector<std::string> unresolved_instances(const ModuleDecl& m) const;
};

}  // namespace modbench::ast
