#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "modbench/ast.hpp"
#include "modbench/bitvec.hpp"
#include "modbench/sema.hpp"

namespace modbench {

// Reference simulator working directly on the AST: every cycle it applies
// the inputs, re-evaluates continuous logic until nothing changes, samples
// the outputs and then fires every clocked block once. Slow but simple; used
// as an oracle for the elaborator.
class Interpreter {
 public:
  Interpreter(const ast::SourceUnit& unit, const std::string& top, const sema::ParamEnv& overrides = {});
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  // Returns registers to their initial values.
  void reset();

  // One clock cycle; returns output port values sampled before the edge.
  std::map<std::string, BitVec> step(const std::map<std::string, BitVec>& inputs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<std::map<std::string, BitVec>> interpret(const ast::SourceUnit& unit, const std::string& top,
                                                     const std::vector<std::map<std::string, BitVec>>& stimulus);

}  // namespace modbench
