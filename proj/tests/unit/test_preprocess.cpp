#include <doctest.h>

#include "helpers.hpp"
#include "modbench/corpus.hpp"
#include "modbench/parser.hpp"
#include "modbench/preprocess.hpp"

using namespace modbench;

TEST_SUITE("preprocess") {
  TEST_CASE("include is inlined") {
    TempDir d;
    put(d.path / "src" / "b.vh", "wire x;\n");
    put(d.path / "src" / "a.v", "module a;\n`include \"b.vh\"\nendmodule\n");
    MergedDesign m = preprocess_files({d.path / "src" / "a.v"}, d.path, d.path / "src");
    CHECK(m.source.find("wire x;") != std::string::npos);
    CHECK(m.source.find("`include") == std::string::npos);
  }

  TEST_CASE("object-like macro expands in place") {
    MergedDesign m = preprocess_text("`define W 8\nwire [`W-1:0] d;\n", "w.v", {});
    CHECK(m.source == "\nwire [8-1:0] d;\n");
  }

  TEST_CASE("function-like macros and conditionals") {
    std::string text =
        "`define MAX(a, b) ((a) > (b) ? (a) : (b))\n"
        "`define FAST\n"
        "`ifdef FAST\n"
        "assign y = `MAX(p, q);\n"
        "`elsif SLOW\n"
        "assign y = p;\n"
        "`else\n"
        "assign y = q;\n"
        "`endif\n"
        "`ifndef UNDEFINED_THING\n"
        "wire z; // kept\n"
        "`endif\n"
        "`undef FAST\n"
        "`ifdef FAST\nwire gone;\n`endif\n";
    MergedDesign m = preprocess_text(text, "f.v", {});
    CHECK(m.source.find("assign y = ((p) > (q) ? (p) : (q));") != std::string::npos);
    CHECK(m.source.find("assign y = p;") == std::string::npos);
    CHECK(m.source.find("wire z; // kept") != std::string::npos);
    CHECK(m.source.find("gone") == std::string::npos);
    for (const char* d : {"`include", "`ifdef", "`ifndef", "`else", "`endif", "`define"})
      CHECK(m.source.find(d) == std::string::npos);
    CHECK(m.origin_map.size() == static_cast<size_t>(std::count(m.source.begin(), m.source.end(), '\n')));
  }

  TEST_CASE("idempotent on merged output") {
    MergedDesign once = preprocess_text("`define N 3\n`timescale 1ns/1ps\nwire [`N:0] a; /* `N */\n", "i.v", {});
    MergedDesign twice = preprocess_text(once.source, "i.v", {});
    CHECK(once.source == twice.source);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_WITH_AS(preprocess_text("`include \"nope.vh\"\n", "e.v", {}), doctest::Contains("missing include"),
                         PreprocessError);
    CHECK_THROWS_AS(preprocess_text("wire [`UNSET:0] a;\n", "e.v", {}), PreprocessError);
    CHECK_THROWS_WITH_AS(preprocess_text("`ifdef A\nwire a;\n", "e.v", {}), doctest::Contains("unterminated"),
                         PreprocessError);
    CHECK_THROWS_WITH_AS(preprocess_text("`define A `B\n`define B `A\nwire w = `A;\n", "e.v", {}),
                         doctest::Contains("macro expansion limit"), PreprocessError);
    TempDir d;
    put(d.path / "self.vh", "`include \"self.vh\"\n");
    CHECK_THROWS_AS(preprocess_files({d.path / "self.vh"}, d.path, d.path), PreprocessError);
  }

  TEST_CASE("origin map points back to source files") {
    TempDir d;
    put(d.path / "src" / "inc.vh", "wire inc_line;\n");
    put(d.path / "src" / "top.v", "module top;\n`include \"inc.vh\"\nwire after;\nendmodule\n");
    MergedDesign m = preprocess_files({d.path / "src" / "top.v"}, d.path, d.path / "src");
    bool found = false;
    for (const auto& e : m.origin_map)
      if (e.file.find("inc.vh") != std::string::npos && e.line == 1) found = true;
    CHECK(found);
    CHECK(origin_map_tsv(m.origin_map).find("inc.vh\t1") != std::string::npos);
  }

  TEST_CASE("fixture project merges in manifest order and parses") {
    auto rec = scan_project(kFixtures / "corpus" / "TT06" / "tt_um_pulse_counter", {"TT06", 0});
    MergedDesign m = preprocess_project(rec);
    CHECK(m.source.find("output reg  [6-1:0] count") != std::string::npos);
    CHECK(m.source.find("{(6){1'b1}}") != std::string::npos);
    CHECK(m.source.find("module tt_um_pulse_counter") < m.source.find("module edge_detect"));
    CHECK(m.source.find("assign uo_out = {2'b00, count};") != std::string::npos);
    auto unit = parse(m.source);
    CHECK(unit.modules.size() == 3);
    CHECK(preprocess_project(rec).source == m.source);
  }
}
