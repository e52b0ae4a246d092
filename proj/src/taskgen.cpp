#include "modbench/taskgen.hpp"

#include <variant>

namespace modbench {

std::string masked_module(const ast::ModuleDecl& m, std::string_view source) {
  std::string out(source.substr(m.span.start, m.header_end));
  for (const auto& it : m.items) {
    if (!std::holds_alternative<ast::PortItem>(it.data) && !std::holds_alternative<ast::ParamDecl>(it.data)) continue;
    out += "\n  ";
    out += source.substr(m.span.start + it.start, it.end - it.start);
  }
  out += "\n  ";
  out += kMaskMarker;
  out += "\nendmodule";
  return out;
}

std::vector<Task> build_tasks(const MergedDesign& design, const ast::SourceUnit& unit) {
  std::vector<Task> tasks;
  const std::string& src = design.source;
  for (const auto& m : unit.modules) {
    Task t;
    t.task_id = design.shuttle.name + "/" + design.project_id + "/" + m.name;
    t.shuttle = design.shuttle;
    t.project_id = design.project_id;
    t.target_module = m.name;
    t.ports = m.ports;
    for (const auto& p : m.params)
      if (!p.local) t.params.push_back({p.name, p.default_value});
    std::string masked = masked_module(m, src);
    t.context_source = src.substr(0, m.span.start) + masked + src.substr(m.span.end);
    t.mask_begin = m.span.start;
    t.mask_end = m.span.start + masked.size();
    t.golden_source = src.substr(m.span.start, m.span.end - m.span.start);
    t.prompt = render_prompt(t);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::string render_prompt(const Task& t) {
  const std::string& tmpl = prompt_template();
  std::string out;
  size_t i = 0;
  while (i < tmpl.size()) {
    size_t open = tmpl.find("{{", i);
    if (open == std::string::npos) break;
    size_t close = tmpl.find("}}", open);
    if (close == std::string::npos) break;
    out.append(tmpl, i, open - i);
    std::string key = tmpl.substr(open + 2, close - open - 2);
    if (key == "TARGET_MODULE") out += t.target_module;
    else if (key == "CONTEXT") out += t.context_source;
    else out.append(tmpl, open, close + 2 - open);
    i = close + 2;
  }
  out.append(tmpl, i, std::string::npos);
  return out;
}

std::string reconstruct(const Task& t, std::string_view module_source) {
  std::string out = t.context_source.substr(0, t.mask_begin);
  out += module_source;
  out += t.context_source.substr(t.mask_end);
  return out;
}

std::string candidate_file_name(const std::string& task_id) {
  std::string out;
  for (char c : task_id) {
    if (c == '/') out += "__";
    else out += c;
  }
  return out + ".v";
}

}  // namespace modbench
