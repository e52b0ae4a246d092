#include "modbench/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace modbench {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw PreprocessError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Index just past a string literal starting at `i` (which holds '"').
size_t skip_string(std::string_view t, size_t i) {
  ++i;
  while (i < t.size() && t[i] != '"' && t[i] != '\n') i += t[i] == '\\' ? 2 : 1;
  return std::min(t.size(), i + 1);
}

const std::set<std::string, std::less<>> kConditionals = {"ifdef", "ifndef", "elsif", "else", "endif"};
const std::set<std::string, std::less<>> kPassThrough = {
    "default_nettype", "timescale", "resetall",  "celldefine",     "endcelldefine", "unconnected_drive",
    "nounconnected_drive", "pragma", "line", "begin_keywords", "end_keywords", "__FILE__", "__LINE__"};

struct Macro {
  bool function_like = false;
  std::vector<std::string> params;
  std::string body;
};

class Preprocessor {
 public:
  Preprocessor(fs::path base, fs::path include_dir, const PreprocessOptions& opt)
      : base_(std::move(base)), include_dir_(std::move(include_dir)), opt_(opt) {}

  void run_file(const fs::path& path, unsigned depth) {
    std::string display = base_.empty() ? path.generic_string() : path.lexically_relative(base_).generic_string();
    if (display.empty()) display = path.generic_string();
    run_text(read_file(path), display, path.parent_path(), depth);
  }

  void run_text(const std::string& text, const std::string& file, const fs::path& dir, unsigned depth) {
    size_t cond_depth = conds_.size();
    std::string_view t = text;
    size_t i = 0;
    uint32_t line = 1;
    auto emit_here = [&](std::string_view s) {
      if (active()) emit(s, file, line);
    };
    while (i < t.size()) {
      char c = t[i];
      if (c == '\n') {
        emit("\n", file, line);
        ++line;
        ++i;
      } else if (t.compare(i, 2, "//") == 0) {
        size_t e = t.find('\n', i);
        if (e == std::string_view::npos) e = t.size();
        emit_here(t.substr(i, e - i));
        i = e;
      } else if (t.compare(i, 2, "/*") == 0) {
        size_t e = t.find("*/", i + 2);
        e = e == std::string_view::npos ? t.size() : e + 2;
        for (size_t j = i; j < e; ++j) {
          if (active() || t[j] == '\n') emit(t.substr(j, 1), file, line);
          if (t[j] == '\n') ++line;
        }
        i = e;
      } else if (c == '"') {
        size_t e = skip_string(t, i);
        emit_here(t.substr(i, e - i));
        i = e;
      } else if (c == '`' && i + 1 < t.size() && ident_start(t[i + 1])) {
        size_t s = i + 1;
        size_t e = s;
        while (e < t.size() && ident_char(t[e])) ++e;
        std::string name(t.substr(s, e - s));
        i = e;
        if (kConditionals.count(name)) {
          conditional(name, t, i, file, line);
        } else if (!active()) {
          continue;
        } else if (name == "include") {
          include(t, i, file, line, dir, depth);
        } else if (name == "define") {
          define(t, i, file, line);
        } else if (name == "undef") {
          macros_.erase(read_ident(t, i, file, line, "`undef"));
        } else if (kPassThrough.count(name)) {
          emit("`" + name, file, line);
        } else {
          auto it = macros_.find(name);
          if (it == macros_.end()) throw error(file, line, "undefined macro `" + name);
          unsigned budget = opt_.max_expansions;
          uint32_t start_line = line;
          std::string text_out = use_macro(name, t, i, line, budget, file);
          emit(text_out, file, start_line);
          for (uint32_t l = start_line; l < line; ++l) emit("\n", file, l);
        }
      } else {
        size_t e = i + 1;
        while (e < t.size() && t[e] != '\n' && t[e] != '/' && t[e] != '"' && t[e] != '`') ++e;
        emit_here(t.substr(i, e - i));
        i = e;
      }
    }
    if (conds_.size() != cond_depth) throw error(file, line, "unterminated `ifdef");
  }

  MergedDesign finish() {
    if (line_open_) emit("\n", last_file_, last_line_);
    MergedDesign d;
    d.source = std::move(out_);
    d.origin_map = std::move(origin_);
    return d;
  }

 private:
  struct Cond {
    bool parent_active;
    bool taken;
    bool active;
    bool seen_else;
  };

  bool active() const { return conds_.empty() || conds_.back().active; }

  PreprocessError error(const std::string& file, uint32_t line, const std::string& msg) const {
    return PreprocessError(file + ":" + std::to_string(line) + ": " + msg);
  }

  void emit(std::string_view s, const std::string& file, uint32_t line) {
    for (char c : s) {
      if (!line_open_) {
        cur_ = {static_cast<uint32_t>(origin_.size() + 1), file, line};
        line_open_ = true;
      }
      out_ += c;
      if (c == '\n') {
        origin_.push_back(cur_);
        line_open_ = false;
      }
    }
    last_file_ = file;
    last_line_ = line;
  }

  void skip_blanks(std::string_view t, size_t& i) {
    while (i < t.size() && (t[i] == ' ' || t[i] == '\t')) ++i;
  }

  std::string read_ident(std::string_view t, size_t& i, const std::string& file, uint32_t line, const char* what) {
    skip_blanks(t, i);
    size_t s = i;
    while (i < t.size() && ident_char(t[i])) ++i;
    if (s == i || !ident_start(t[s])) throw error(file, line, std::string(what) + " expects a macro name");
    return std::string(t.substr(s, i - s));
  }

  void conditional(const std::string& name, std::string_view t, size_t& i, const std::string& file, uint32_t line) {
    if (name == "ifdef" || name == "ifndef") {
      bool defined = macros_.count(read_ident(t, i, file, line, name.c_str())) > 0;
      bool cond = name == "ifdef" ? defined : !defined;
      bool parent = active();
      conds_.push_back({parent, cond, parent && cond, false});
      return;
    }
    if (conds_.empty()) throw error(file, line, "`" + name + " without `ifdef");
    Cond& top = conds_.back();
    if (name == "elsif") {
      bool defined = macros_.count(read_ident(t, i, file, line, "`elsif")) > 0;
      if (top.seen_else) throw error(file, line, "`elsif after `else");
      top.active = top.parent_active && !top.taken && defined;
      top.taken = top.taken || defined;
    } else if (name == "else") {
      if (top.seen_else) throw error(file, line, "duplicate `else");
      top.active = top.parent_active && !top.taken;
      top.taken = true;
      top.seen_else = true;
    } else {
      conds_.pop_back();
    }
  }

  void include(std::string_view t, size_t& i, const std::string& file, uint32_t line, const fs::path& dir,
               unsigned depth) {
    skip_blanks(t, i);
    char close = i < t.size() && t[i] == '"' ? '"' : (i < t.size() && t[i] == '<' ? '>' : 0);
    if (!close) throw error(file, line, "malformed `include");
    size_t e = t.find(close, i + 1);
    if (e == std::string_view::npos || t.substr(i, e - i).find('\n') != std::string_view::npos)
      throw error(file, line, "malformed `include");
    std::string target(t.substr(i + 1, e - i - 1));
    i = e + 1;
    if (depth + 1 > opt_.max_include_depth)
      throw error(file, line, "include depth exceeds " + std::to_string(opt_.max_include_depth));
    fs::path found;
    for (const fs::path& d : {dir, include_dir_}) {
      if (d.empty()) continue;
      fs::path p = d / target;
      if (fs::is_regular_file(p)) {
        found = p;
        break;
      }
    }
    if (found.empty()) throw error(file, line, "missing include '" + target + "'");
    run_file(found, depth + 1);
  }

  void define(std::string_view t, size_t& i, const std::string& file, uint32_t& line) {
    std::string name = read_ident(t, i, file, line, "`define");
    Macro m;
    if (i < t.size() && t[i] == '(') {
      m.function_like = true;
      size_t e = t.find(')', i);
      if (e == std::string_view::npos) throw error(file, line, "unterminated parameter list for `" + name);
      std::string_view plist = t.substr(i + 1, e - i - 1);
      i = e + 1;
      size_t p = 0;
      while (p <= plist.size()) {
        size_t comma = plist.find(',', p);
        if (comma == std::string_view::npos) comma = plist.size();
        std::string param = trim(plist.substr(p, comma - p));
        if (auto eq = param.find('='); eq != std::string::npos) param = trim(param.substr(0, eq));
        if (!param.empty()) m.params.push_back(param);
        p = comma + 1;
      }
    }
    std::string body;
    uint32_t extra_lines = 0;
    for (;;) {
      size_t e = t.find('\n', i);
      if (e == std::string_view::npos) e = t.size();
      std::string_view phys = t.substr(i, e - i);
      size_t cut = phys.size();
      for (size_t k = 0; k + 1 < phys.size(); ++k) {
        if (phys[k] == '"') {
          k = skip_string(phys, k) - 1;
        } else if (phys[k] == '/' && phys[k + 1] == '/') {
          cut = k;
          break;
        }
      }
      std::string_view code = phys.substr(0, cut);
      std::string piece = trim(code);
      bool cont = !piece.empty() && piece.back() == '\\' && cut == phys.size();
      if (cont) piece.pop_back();
      if (!body.empty() && !piece.empty()) body += '\n';
      body += trim(piece);
      i = e;
      if (!cont || e >= t.size()) break;
      ++i;
      ++extra_lines;
    }
    m.body = std::move(body);
    macros_[name] = std::move(m);
    for (uint32_t k = 0; k < extra_lines; ++k) {
      emit("\n", file, line);
      ++line;
    }
  }

  // Expands one use of `name` whose text continues at t[i]; advances i past
  // any argument list (counting newlines into `line`).
  std::string use_macro(const std::string& name, std::string_view t, size_t& i, uint32_t& line, unsigned& budget,
                        const std::string& file) {
    if (budget == 0) throw error(file, line, "macro expansion limit exceeded at `" + name);
    --budget;
    const Macro& m = macros_.at(name);
    std::string text = m.body;
    if (m.function_like) {
      size_t j = i;
      while (j < t.size() && std::isspace(static_cast<unsigned char>(t[j]))) ++j;
      if (j >= t.size() || t[j] != '(') throw error(file, line, "macro `" + name + " needs arguments");
      std::vector<std::string> args;
      std::string cur;
      int nest = 0;
      size_t k = j + 1;
      for (; k < t.size(); ++k) {
        char c = t[k];
        if (c == '"') {
          size_t e = skip_string(t, k);
          cur.append(t.substr(k, e - k));
          k = e - 1;
          continue;
        }
        if (c == '(' || c == '[' || c == '{') ++nest;
        if (c == ')' || c == ']' || c == '}') {
          if (nest == 0 && c == ')') break;
          --nest;
        }
        if (c == ',' && nest == 0) {
          args.push_back(trim(cur));
          cur.clear();
          continue;
        }
        cur += c;
      }
      if (k >= t.size()) throw error(file, line, "unterminated arguments to `" + name);
      args.push_back(trim(cur));
      if (m.params.empty() && args.size() == 1 && args[0].empty()) args.clear();
      if (args.size() != m.params.size())
        throw error(file, line,
                    "macro `" + name + " expects " + std::to_string(m.params.size()) + " arguments, got " +
                        std::to_string(args.size()));
      line += static_cast<uint32_t>(std::count(t.begin() + static_cast<long>(i), t.begin() + static_cast<long>(k), '\n'));
      i = k + 1;
      text = substitute(m, args);
    }
    return rescan(text, budget, file, line);
  }

  std::string substitute(const Macro& m, const std::vector<std::string>& args) const {
    std::string out;
    std::string_view b = m.body;
    for (size_t k = 0; k < b.size();) {
      if (b[k] == '"') {
        size_t e = skip_string(b, k);
        out.append(b.substr(k, e - k));
        k = e;
      } else if (ident_start(b[k]) && (k == 0 || (b[k - 1] != '`' && !ident_char(b[k - 1])))) {
        size_t e = k;
        while (e < b.size() && ident_char(b[e])) ++e;
        std::string_view word = b.substr(k, e - k);
        auto it = std::find(m.params.begin(), m.params.end(), word);
        if (it != m.params.end()) out += args[static_cast<size_t>(it - m.params.begin())];
        else out.append(word);
        k = e;
      } else {
        out += b[k++];
      }
    }
    return out;
  }

  std::string rescan(const std::string& text, unsigned& budget, const std::string& file, uint32_t line) {
    std::string out;
    std::string_view t = text;
    for (size_t k = 0; k < t.size();) {
      if (t[k] == '"') {
        size_t e = skip_string(t, k);
        out.append(t.substr(k, e - k));
        k = e;
      } else if (t[k] == '`' && k + 1 < t.size() && ident_start(t[k + 1])) {
        size_t e = k + 1;
        while (e < t.size() && ident_char(t[e])) ++e;
        std::string name(t.substr(k + 1, e - k - 1));
        if (!macros_.count(name)) {
          if (kPassThrough.count(name)) {
            out.append(t.substr(k, e - k));
            k = e;
            continue;
          }
          throw error(file, line, "undefined or unsupported `" + name + " in macro expansion");
        }
        uint32_t dummy = line;
        out += use_macro(name, t, e, dummy, budget, file);
        k = e;
      } else {
        out += t[k++];
      }
    }
    return out;
  }

  fs::path base_;
  fs::path include_dir_;
  PreprocessOptions opt_;
  std::map<std::string, Macro> macros_;
  std::vector<Cond> conds_;
  std::string out_;
  std::vector<OriginEntry> origin_;
  OriginEntry cur_;
  bool line_open_ = false;
  std::string last_file_;
  uint32_t last_line_ = 1;
};

}  // namespace

MergedDesign preprocess_files(const std::vector<fs::path>& files, const fs::path& base, const fs::path& include_dir,
                              const PreprocessOptions& opt) {
  Preprocessor pp(base, include_dir, opt);
  for (const auto& f : files) pp.run_file(f, 0);
  return pp.finish();
}

MergedDesign preprocess_text(const std::string& text, const std::string& name, const fs::path& include_dir,
                             const PreprocessOptions& opt) {
  Preprocessor pp({}, include_dir, opt);
  pp.run_text(text, name, include_dir, 0);
  return pp.finish();
}

MergedDesign preprocess_project(const ProjectRecord& record, const PreprocessOptions& opt) {
  MergedDesign d = preprocess_files(record.src_files, record.dir, record.dir / "src", opt);
  d.project_id = record.project_id;
  d.shuttle = record.shuttle;
  return d;
}

std::string origin_map_tsv(const std::vector<OriginEntry>& map) {
  std::string out;
  for (const auto& e : map) out += std::to_string(e.merged_line) + "\t" + e.file + "\t" + std::to_string(e.line) + "\n";
  return out;
}

}  // namespace modbench
