#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modbench/ast.hpp"
#include "modbench/corpus.hpp"
#include "modbench/preprocess.hpp"

namespace modbench {

extern const char* const kPromptTemplateVersion;
const std::string& prompt_template();

inline constexpr std::string_view kMaskMarker = "// <<< IMPLEMENT THIS MODULE >>>";

struct TaskParam {
  std::string name;
  int64_t value = 0;
};

struct Task {
  std::string task_id;  // shuttle/project/module
  ShuttleId shuttle;
  std::string project_id;
  std::string target_module;
  std::vector<ast::PortDecl> ports;
  std::vector<TaskParam> params;  // overridable parameters with defaults
  std::string context_source;
  std::string golden_source;
  size_t mask_begin = 0;  // masked module inside context_source
  size_t mask_end = 0;
  std::string prompt;
};

// Header of `m` followed by the marker and endmodule. For non-ANSI modules
// the body's port direction and parameter declarations are kept too.
std::string masked_module(const ast::ModuleDecl& m, std::string_view source);

// One task per module, in source order.
std::vector<Task> build_tasks(const MergedDesign& design, const ast::SourceUnit& unit);

std::string render_prompt(const Task& t);

// Task context with the masked module replaced by `module_source`.
std::string reconstruct(const Task& t, std::string_view module_source);

// Candidate file name for a task id ('/' becomes "__").
std::string candidate_file_name(const std::string& task_id);

}  // namespace modbench
