#include <doctest.h>

#include "helpers.hpp"
#include "modbench/bitvec.hpp"
#include "modbench/error.hpp"
#include "modbench/lexer.hpp"
#include "modbench/metrics.hpp"
#include "modbench/parser.hpp"

using namespace modbench;

TEST_SUITE("frontend") {
  TEST_CASE("bit vectors wrap at their width") {
    BitVec a(4, 0xE), b(4, 0x3);
    CHECK((a + b).to_u64() == 0x1);
    CHECK((b - a).to_u64() == 0x5);
    CHECK((a * b).to_u64() == (0xE * 3) % 16);
    CHECK(BitVec(4, 0x9).to_i64() == -7);
    CHECK(BitVec(4, 0x9).resized(8, true).to_u64() == 0xF9);
    CHECK(BitVec(4, 0x9).ashr(2).to_u64() == 0xE);
    CHECK(BitVec::concat(BitVec(2, 1), BitVec(3, 5)).to_u64() == 0xD);
    CHECK(BitVec(70, 1).shl(69).msb());
  }

  TEST_CASE("lexer keeps offsets and drops comments") {
    auto toks = lex("assign /* c */ y = a ~^ b; // tail\n");
    REQUIRE(toks.size() >= 7);
    CHECK(toks[0].is("assign"));
    CHECK(toks[1].text == "y");
    CHECK(toks[1].offset == 15);
    CHECK(toks[4].text == "~^");
  }

  TEST_CASE("lexer rejects unexpanded macros") { CHECK_THROWS_AS(lex("wire [`W-1:0] d;"), ParseError); }

  TEST_CASE("one module with two ports") {
    auto u = parse("module m(input a, output y); assign y=a; endmodule");
    REQUIRE(u.modules.size() == 1);
    CHECK(u.modules[0].name == "m");
    REQUIRE(u.modules[0].ports.size() == 2);
    CHECK(u.modules[0].ports[0].direction == ast::Direction::In);
    CHECK(u.modules[0].ports[1].direction == ast::Direction::Out);
  }

  TEST_CASE("instance chain resolves inside the unit") {
    auto u = parse(
        "module leaf(input a, output y); assign y = ~a; endmodule\n"
        "module mid(input a, output y); leaf l(.a(a), .y(y)); endmodule\n"
        "module top(input a, output y); mid m(a, y); endmodule\n");
    REQUIRE(u.modules.size() == 3);
    CHECK(u.modules[0].name == "leaf");
    CHECK(u.modules[1].name == "mid");
    CHECK(u.modules[2].name == "top");
    for (const auto& m : u.modules) CHECK(u.unresolved_instances(m).empty());
  }

  TEST_CASE("stray endmodule is a parse error at that token") {
    std::string text = "module m(input a); endmodule\nendmodule\n";
    try {
      parse(text);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.offset() == text.rfind("endmodule"));
    }
  }

  TEST_CASE("non-ANSI ports and parameters") {
    auto u = parse(read_fixture("modules/nonansi.v"));
    const auto& m = u.modules.at(0);
    CHECK_FALSE(m.ansi);
    REQUIRE(m.ports.size() == 5);
    CHECK(m.ports[1].width == 3);
    REQUIRE(m.params.size() == 1);
    CHECK(m.params[0].default_value == 3);
  }

  TEST_CASE("duplicate module names are rejected") {
    CHECK_THROWS_AS(parse("module a; endmodule module a; endmodule"), ParseError);
  }

  TEST_CASE("loc count") {
    CHECK(loc_count("") == 0);
    std::string ten =
        "module m(input a, output y);\n"
        "\n"
        "  // comment only\n"
        "  wire t;\n"
        "  assign t = a;\n"
        "\n"
        "  assign y = t; // trailing\n"
        "  /* block */\n"
        "  wire u;\n"
        "endmodule\n";
    // 10 lines: 2 blank, 2 comment-only
    CHECK(loc_count(ten) == 6);
    std::string seven = ten;
    seven.replace(seven.find("  /* block */\n"), 14, "  wire v;\n");
    CHECK(loc_count(seven) == 7);
  }

  TEST_CASE("complexity keywords") {
    CHECK(complexity_score("module m; endmodule") == 0);
    std::string src =
        "module m(input a, input b, output y, output z);\n"
        "  wire t; wire u; // assign in a comment\n"
        "  assign t = a; assign u = b;\n"
        "  assign y = t & u;\n"
        "  always @(*) begin end\n"
        "  initial $display(\"always\");\n"
        "endmodule\n";
    CHECK(complexity_score(src) == 6);
  }

  TEST_CASE("assertion counts") {
    TempDir d;
    put(d.path / "none.py", "def test():\n    pass  # assert nothing\n");
    put(d.path / "a.py", "assert x == 1\n# assert skipped\nassert y\ns = 'assert'\n");
    put(d.path / "tb.v", "initial begin\n  assert (q == 1);\n  // assert no\n  assert (r);\nend\n");
    CHECK(count_assertions({d.path / "none.py"}).total == 0);
    CHECK(count_assertions({d.path / "a.py", d.path / "tb.v"}).total == 4);
    auto missing = count_assertions({d.path / "gone.v"});
    CHECK(missing.total == 0);
    CHECK(missing.errors.size() == 1);
  }
}
