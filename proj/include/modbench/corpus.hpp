#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modbench/error.hpp"

namespace modbench {

struct ShuttleId {
  std::string name;
  uint32_t ordinal = 0;  // lower is older

  auto operator<=>(const ShuttleId& o) const {
    if (auto c = ordinal <=> o.ordinal; c != 0) return c;
    return name <=> o.name;
  }
  bool operator==(const ShuttleId&) const = default;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

struct ProjectManifest {
  std::string top_module;
  std::vector<std::string> source_files;
  std::map<std::string, std::string> extra;  // every other key, dotted when nested
};

// Reads an info.yaml. The two required keys may sit at the top level or
// under `project:`. Throws ManifestError.
ProjectManifest parse_manifest(std::string_view yaml_text);

enum class RejectReason { None, SrcDir, TestDir, Makefile, Manifest, UnresolvedSource };

const char* reject_reason_name(RejectReason r);

struct ProjectRecord {
  std::string project_id;
  ShuttleId shuttle;
  std::filesystem::path dir;
  std::optional<ProjectManifest> manifest;
  std::string flag;  // "", "manifest-missing", "manifest-invalid: ...", "unreadable: ..."
  // Manifest sources resolved against src/ then the project root, in
  // manifest order; without a manifest, the RTL files under src/.
  std::vector<std::filesystem::path> src_files;
  std::vector<std::string> unresolved_sources;
  std::vector<std::filesystem::path> test_files;
  bool src_dir_has_rtl = false;
  bool test_dir_has_testbench = false;
  bool makefile_present = false;
};

// One record per immediate subdirectory of `root`, sorted by name. Throws
// IoError when `root` cannot be read.
std::vector<ProjectRecord> scan_corpus(const std::filesystem::path& root, const ShuttleId& shuttle);

ProjectRecord scan_project(const std::filesystem::path& dir, const ShuttleId& shuttle);

struct FilterResult {
  bool accepted = false;
  RejectReason reason = RejectReason::None;
};

// First failing check in the order src-dir, test-dir, makefile, manifest,
// unresolved-source.
FilterResult filter_project(const ProjectRecord& record);

// True for test/ entries counted as testbenches.
bool is_testbench_name(const std::string& filename);

}  // namespace modbench
