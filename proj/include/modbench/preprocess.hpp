#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "modbench/corpus.hpp"

namespace modbench {

struct OriginEntry {
  uint32_t merged_line = 0;  // 1-based
  std::string file;          // relative to the project directory
  uint32_t line = 0;         // 1-based
  bool operator==(const OriginEntry&) const = default;
};

struct MergedDesign {
  std::string project_id;
  ShuttleId shuttle;
  std::string source;
  std::vector<OriginEntry> origin_map;
};

struct PreprocessOptions {
  unsigned max_include_depth = 16;
  unsigned max_expansions = 64;  // macro rewrites per use site
};

// Runs the listed files through one preprocessor state, in order: includes
// are inlined, macros expanded and conditionals resolved. Comments and
// unknown directives are kept. Lines consumed by directives or skipped
// branches stay as blank lines. `base` is the directory origin paths are
// reported against; includes are looked up next to the including file, then
// in `include_dir`. Throws PreprocessError.
MergedDesign preprocess_files(const std::vector<std::filesystem::path>& files, const std::filesystem::path& base,
                              const std::filesystem::path& include_dir, const PreprocessOptions& opt = {});

// Preprocesses in-memory text as if it were a single file named `name`.
MergedDesign preprocess_text(const std::string& text, const std::string& name,
                             const std::filesystem::path& include_dir = {}, const PreprocessOptions& opt = {});

// Expects an accepted record; includes resolve against the project's src/.
MergedDesign preprocess_project(const ProjectRecord& record, const PreprocessOptions& opt = {});

// Tab-separated "merged_line file line" rows.
std::string origin_map_tsv(const std::vector<OriginEntry>& map);

}  // namespace modbench
