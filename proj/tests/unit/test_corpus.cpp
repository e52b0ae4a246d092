#include <doctest.h>

#include "helpers.hpp"
#include "modbench/corpus.hpp"

using namespace modbench;

namespace {

void good_project(const fs::path& dir, const std::string& top) {
  put(dir / "info.yaml", "project:\n  top_module: \"" + top + "\"\n  source_files:\n    - \"" + top + ".v\"\n");
  put(dir / "src" / (top + ".v"), "module " + top + "(input a, output y); assign y = a; endmodule\n");
  put(dir / "test" / "tb.v", "module tb; endmodule\n");
  put(dir / "test" / "Makefile", "all:\n");
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("manifest fields and extras") {
    auto m = parse_manifest(
        "project:\n  title: \"x\"\n  top_module: \"tt_um_a\"\n  source_files: [\"a.v\", \"b.v\"]\n"
        "pinout:\n  ui[0]: \"in\"\nyaml_version: 6\n");
    CHECK(m.top_module == "tt_um_a");
    CHECK(m.source_files == std::vector<std::string>{"a.v", "b.v"});
    CHECK(m.extra.at("project.title") == "x");
    CHECK(m.extra.at("pinout.ui[0]") == "in");
    CHECK(m.extra.at("yaml_version") == "6");

    auto flat = parse_manifest("top_module: t\nsource_files:\n  - t.v\n");
    CHECK(flat.top_module == "t");
    CHECK_THROWS_AS(parse_manifest("source_files: [a.v]\n"), ManifestError);
    CHECK_THROWS_AS(parse_manifest("top_module: t\nsource_files: []\n"), ManifestError);
    CHECK_THROWS_AS(parse_manifest("top_module: 9bad\nsource_files: [a.v]\n"), ManifestError);
    CHECK_THROWS_AS(parse_manifest("top_module: [unclosed\n"), ManifestError);
  }

  TEST_CASE("three project directories give three sorted records") {
    TempDir d;
    good_project(d.path / "zeta", "zeta");
    good_project(d.path / "alpha", "alpha");
    good_project(d.path / "mid", "mid");
    put(d.path / "README.md", "not a project\n");
    auto recs = scan_corpus(d.path, {"TT06", 0});
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].project_id == "alpha");
    CHECK(recs[2].project_id == "zeta");
    for (const auto& r : recs) CHECK(filter_project(r).accepted);
  }

  TEST_CASE("empty directory") {
    TempDir d;
    CHECK(scan_corpus(d.path, {"TT06", 0}).empty());
  }

  TEST_CASE("unreadable root is an I/O error") {
    CHECK_THROWS_AS(scan_corpus("/nonexistent/modbench/root", {"TT06", 0}), IoError);
  }

  TEST_CASE("missing manifest is flagged and rejected") {
    TempDir d;
    good_project(d.path / "a", "a");
    good_project(d.path / "b", "b");
    good_project(d.path / "c", "c");
    fs::remove(d.path / "b" / "info.yaml");
    auto recs = scan_corpus(d.path, {"TT06", 0});
    REQUIRE(recs.size() == 3);
    CHECK(recs[1].flag == "manifest-missing");
    auto f = filter_project(recs[1]);
    CHECK_FALSE(f.accepted);
    CHECK(f.reason == RejectReason::Manifest);
    CHECK(recs[0].flag.empty());
  }

  TEST_CASE("rejection order") {
    TempDir d;
    auto reason = [&](const std::string& name) { return filter_project(scan_project(d.path / name, {"T", 0})).reason; };

    good_project(d.path / "nosrc", "nosrc");
    fs::remove_all(d.path / "nosrc" / "src");
    fs::remove(d.path / "nosrc" / "test" / "Makefile");
    CHECK(reason("nosrc") == RejectReason::SrcDir);

    good_project(d.path / "notb", "notb");
    fs::remove(d.path / "notb" / "test" / "tb.v");
    put(d.path / "notb" / "test" / "notes.txt", "x");
    CHECK(reason("notb") == RejectReason::TestDir);

    good_project(d.path / "nomake", "nomake");
    fs::remove(d.path / "nomake" / "test" / "Makefile");
    CHECK(reason("nomake") == RejectReason::Makefile);
    put(d.path / "nomake" / "makefile", "all:\n");
    CHECK(reason("nomake") == RejectReason::None);

    good_project(d.path / "badyaml", "badyaml");
    put(d.path / "badyaml" / "info.yaml", "project: [\n");
    CHECK(reason("badyaml") == RejectReason::Manifest);

    good_project(d.path / "lost", "lost");
    put(d.path / "lost" / "info.yaml", "top_module: lost\nsource_files: [lost.v, gone.v, ../up.v]\n");
    auto rec = scan_project(d.path / "lost", {"T", 0});
    CHECK(rec.unresolved_sources == std::vector<std::string>{"gone.v", "../up.v"});
    CHECK(filter_project(rec).reason == RejectReason::UnresolvedSource);
    CHECK(std::string(reject_reason_name(RejectReason::UnresolvedSource)) == "unresolved-source");
  }

  TEST_CASE("fixture corpus") {
    auto tt07 = scan_corpus(kFixtures / "corpus" / "TT07", {"TT07", 1});
    REQUIRE(tt07.size() == 3);
    CHECK(tt07[0].project_id == "tt_um_missing_src");
    CHECK(filter_project(tt07[0]).reason == RejectReason::UnresolvedSource);
    CHECK(filter_project(tt07[1]).accepted);
    auto tt06 = scan_corpus(kFixtures / "corpus" / "TT06", {"TT06", 0});
    for (const auto& r : tt06) {
      CHECK(filter_project(r).accepted);
      for (const auto& f : r.src_files) CHECK(fs::exists(f));
    }
    CHECK(tt06[1].manifest->source_files.size() == 3);
    CHECK(tt06[1].src_files[1].filename() == "edge_detect.v");
  }

  TEST_CASE("testbench names") {
    CHECK(is_testbench_name("tb.v"));
    CHECK(is_testbench_name("test_alu.py"));
    CHECK(is_testbench_name("top.sv"));
    CHECK(is_testbench_name("testbench.txt"));
    CHECK_FALSE(is_testbench_name("Makefile"));
    CHECK_FALSE(is_testbench_name("results.xml"));
  }

  TEST_CASE("shuttle order") {
    ShuttleId a{"TT06", 0}, b{"TT07", 1};
    CHECK(a < b);
    CHECK_FALSE(b < a);
  }
}
