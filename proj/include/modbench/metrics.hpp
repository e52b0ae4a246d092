#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace modbench {

// Lines that are neither blank nor made only of comments.
uint64_t loc_count(std::string_view module_source);

const std::vector<std::string>& default_complexity_keywords();

// Standalone-token occurrences of `keywords` outside comments and strings.
uint64_t complexity_score(std::string_view design_source,
                          const std::vector<std::string>& keywords = default_complexity_keywords());

enum class CommentStyle { Verilog, Python };

// Occurrences of `word` as a standalone token outside comments and strings.
uint64_t count_token(std::string_view text, std::string_view word, CommentStyle style);

struct AssertionCount {
  uint64_t total = 0;
  std::vector<std::string> errors;  // one entry per unreadable file
};

// Counts `assert` tokens across a project's test files. Python sources use
// '#' comments; everything else is scanned with Verilog comment rules.
AssertionCount count_assertions(const std::vector<std::filesystem::path>& test_files);

}  // namespace modbench
