#include <doctest.h>

#include "helpers.hpp"
#include "modbench/parser.hpp"
#include "modbench/preprocess.hpp"
#include "modbench/taskgen.hpp"

using namespace modbench;

namespace {

std::vector<Task> tasks_of(const std::string& text) {
  MergedDesign d = preprocess_text(text, "d.v", {});
  d.project_id = "proj";
  d.shuttle = {"TT06", 0};
  return build_tasks(d, parse(d.source));
}

size_t occurrences(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

const char* kFour =
    "module a(input x, output y); assign y = ~x; endmodule\n"
    "module b(input x, output y); a u(.x(x), .y(y)); endmodule\n"
    "module c #(parameter W = 2) (input [W-1:0] x, output y); assign y = ^x; endmodule\n"
    "module d(input [1:0] x, output y); c #(.W(2)) u(.x(x), .y(y)); endmodule\n";

}  // namespace

TEST_SUITE("taskgen") {
  TEST_CASE("four modules give four tasks") {
    auto tasks = tasks_of(kFour);
    REQUIRE(tasks.size() == 4);
    CHECK(tasks[0].task_id == "TT06/proj/a");
    CHECK(tasks[3].task_id == "TT06/proj/d");
    CHECK(tasks[2].params.size() == 1);
    CHECK(tasks[2].params[0].name == "W");
    CHECK(tasks[2].params[0].value == 2);
    for (const auto& t : tasks) {
      CHECK(occurrences(t.context_source, std::string(kMaskMarker)) == 1);
      CHECK(t.context_source.find(t.golden_source) == std::string::npos);
      CHECK(reconstruct(t, t.golden_source) == std::string(kFour));
    }
  }

  TEST_CASE("single module design keeps only the masked header") {
    auto tasks = tasks_of("module solo(input [3:0] a, output [3:0] y);\n  assign y = a + 1;\nendmodule\n");
    REQUIRE(tasks.size() == 1);
    const Task& t = tasks[0];
    CHECK(t.context_source ==
          "module solo(input [3:0] a, output [3:0] y);\n  // <<< IMPLEMENT THIS MODULE >>>\nendmodule\n");
    CHECK(t.ports.size() == 2);
    CHECK(t.context_source.substr(t.mask_begin, t.mask_end - t.mask_begin).find(kMaskMarker) != std::string::npos);
  }

  TEST_CASE("non-ANSI masked module keeps port declarations") {
    auto tasks = tasks_of(read_fixture("modules/nonansi.v"));
    const std::string& ctx = tasks[0].context_source;
    CHECK(ctx.find("input [N-1:0] a, b;") != std::string::npos);
    CHECK(ctx.find("parameter N = 3;") != std::string::npos);
    CHECK(ctx.find("assign y") == std::string::npos);
  }

  TEST_CASE("prompt") {
    auto tasks = tasks_of(kFour);
    const Task& t = tasks[1];
    CHECK(occurrences(t.prompt, t.context_source) == 1);
    CHECK(render_prompt(t) == render_prompt(t));
    CHECK(render_prompt(t) == t.prompt);
    CHECK(t.prompt.find("module `b`") != std::string::npos);
    CHECK(t.prompt.find("{{") == std::string::npos);
  }

  TEST_CASE("template placeholders inside the context are not re-expanded") {
    auto tasks = tasks_of("// {{TARGET_MODULE}}\nmodule q(output y);\n  assign y = 1'b0;\nendmodule\n");
    CHECK(tasks[0].prompt.find("// {{TARGET_MODULE}}") != std::string::npos);
  }

  TEST_CASE("candidate file names") {
    CHECK(candidate_file_name("TT06/proj/mod") == "TT06__proj__mod.v");
  }
}
