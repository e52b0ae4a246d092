#include "modbench/metrics.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace modbench {

namespace {

bool word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

// Calls `on_word` for every identifier-like token outside comments/strings.
template <typename F>
void scan_words(std::string_view s, CommentStyle style, F&& on_word) {
  size_t i = 0, n = s.size();
  while (i < n) {
    char c = s[i];
    if (style == CommentStyle::Verilog && c == '/' && i + 1 < n && s[i + 1] == '/') {
      while (i < n && s[i] != '\n') ++i;
      continue;
    }
    if (style == CommentStyle::Verilog && c == '/' && i + 1 < n && s[i + 1] == '*') {
      size_t e = s.find("*/", i + 2);
      i = e == std::string_view::npos ? n : e + 2;
      continue;
    }
    if (style == CommentStyle::Python && c == '#') {
      while (i < n && s[i] != '\n') ++i;
      continue;
    }
    if (c == '"' || (style == CommentStyle::Python && c == '\'')) {
      if (style == CommentStyle::Python && s.substr(i, 3) == std::string(3, c)) {
        size_t e = s.find(std::string(3, c), i + 3);
        i = e == std::string_view::npos ? n : e + 3;
        continue;
      }
      size_t j = i + 1;
      while (j < n && s[j] != c && s[j] != '\n') {
        if (s[j] == '\\') ++j;
        ++j;
      }
      i = j + 1;
      continue;
    }
    if (c == '\\' && style == CommentStyle::Verilog) {  // escaped identifier
      while (i < n && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      continue;
    }
    if (c == '$' || c == '`') {  // system names and macro uses are not keywords
      ++i;
      while (i < n && word_char(s[i])) ++i;
      continue;
    }
    if (word_start(c)) {
      size_t j = i + 1;
      while (j < n && word_char(s[j])) ++j;
      on_word(s.substr(i, j - i));
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      // Numbers like 8'hFF must not leak "hFF" as a word.
      while (i < n && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '\'')) ++i;
      continue;
    }
    ++i;
  }
}

}  // namespace

uint64_t loc_count(std::string_view src) {
  uint64_t count = 0;
  bool in_block = false;
  size_t i = 0, n = src.size();
  while (i < n) {
    bool code = false;
    while (i < n && src[i] != '\n') {
      char c = src[i];
      if (in_block) {
        if (c == '*' && i + 1 < n && src[i + 1] == '/') {
          in_block = false;
          i += 2;
        } else {
          ++i;
        }
        continue;
      }
      if (c == '/' && i + 1 < n && src[i + 1] == '/') {
        while (i < n && src[i] != '\n') ++i;
        break;
      }
      if (c == '/' && i + 1 < n && src[i + 1] == '*') {
        in_block = true;
        i += 2;
        continue;
      }
      if (c == '"') {
        code = true;
        ++i;
        while (i < n && src[i] != '"' && src[i] != '\n') {
          if (src[i] == '\\') ++i;
          ++i;
        }
        if (i < n && src[i] == '"') ++i;
        continue;
      }
      if (!std::isspace(static_cast<unsigned char>(c))) code = true;
      ++i;
    }
    if (code) ++count;
    ++i;  // newline
  }
  return count;
}

const std::vector<std::string>& default_complexity_keywords() {
  static const std::vector<std::string> kw = {"always", "assign", "generate", "wire", "reg"};
  return kw;
}

uint64_t complexity_score(std::string_view src, const std::vector<std::string>& keywords) {
  uint64_t total = 0;
  scan_words(src, CommentStyle::Verilog, [&](std::string_view w) {
    for (const auto& k : keywords)
      if (w == k) {
        ++total;
        break;
      }
  });
  return total;
}

uint64_t count_token(std::string_view text, std::string_view word, CommentStyle style) {
  uint64_t total = 0;
  scan_words(text, style, [&](std::string_view w) { total += (w == word); });
  return total;
}

AssertionCount count_assertions(const std::vector<std::filesystem::path>& test_files) {
  AssertionCount result;
  for (const auto& f : test_files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) {
      result.errors.push_back(f.string() + ": cannot read");
      continue;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    CommentStyle style = f.extension() == ".py" ? CommentStyle::Python : CommentStyle::Verilog;
    result.total += count_token(ss.str(), "assert", style);
  }
  return result;
}

}  // namespace modbench
