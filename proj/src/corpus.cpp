#include "modbench/corpus.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace modbench {

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; });
}

std::string flow_text(const YAML::Node& n) {
  YAML::Emitter e;
  e << YAML::Flow << n;
  return e.c_str();
}

void flatten(const YAML::Node& n, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (n.IsMap()) {
    for (const auto& kv : n) {
      std::string key = kv.first.as<std::string>();
      flatten(kv.second, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (n.IsScalar()) {
    out[prefix] = n.Scalar();
  } else if (n.IsNull()) {
    out[prefix] = "";
  } else {
    out[prefix] = flow_text(n);
  }
}

std::vector<std::string> string_list(const YAML::Node& n, const char* key) {
  std::vector<std::string> out;
  if (n.IsScalar()) {
    out.push_back(n.Scalar());
  } else if (n.IsSequence()) {
    for (const auto& item : n) {
      if (!item.IsScalar()) throw ManifestError(std::string(key) + ": list entries must be strings");
      out.push_back(item.Scalar());
    }
  } else {
    throw ManifestError(std::string(key) + ": expected a string list");
  }
  return out;
}

bool has_ext(const fs::path& p, std::initializer_list<const char*> exts) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const char* x : exts)
    if (e == x) return true;
  return false;
}

// Regular files below `dir`, as sorted paths.
std::vector<fs::path> files_below(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir, fs::directory_options::skip_permission_denied))
    if (e.is_regular_file()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ProjectManifest parse_manifest(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ManifestError(std::string("yaml: ") + e.what());
  }
  if (!root.IsMap()) throw ManifestError("manifest is not a mapping");
  bool nested = !root["top_module"] && root["project"] && root["project"].IsMap();
  YAML::Node holder = nested ? root["project"] : root;

  ProjectManifest m;
  YAML::Node top = holder["top_module"];
  if (!top || !top.IsScalar()) throw ManifestError("missing top_module");
  m.top_module = top.Scalar();
  if (!is_identifier(m.top_module)) throw ManifestError("top_module is not an identifier: '" + m.top_module + "'");
  YAML::Node srcs = holder["source_files"];
  if (!srcs) throw ManifestError("missing source_files");
  m.source_files = string_list(srcs, "source_files");
  if (m.source_files.empty()) throw ManifestError("source_files is empty");

  std::map<std::string, std::string> all;
  flatten(root, "", all);
  std::string base = nested ? "project." : "";
  all.erase(base + "top_module");
  all.erase(base + "source_files");
  m.extra = std::move(all);
  return m;
}

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "";
    case RejectReason::SrcDir: return "src-dir";
    case RejectReason::TestDir: return "test-dir";
    case RejectReason::Makefile: return "makefile";
    case RejectReason::Manifest: return "manifest";
    case RejectReason::UnresolvedSource: return "unresolved-source";
  }
  return "?";
}

bool is_testbench_name(const std::string& filename) {
  fs::path p(filename);
  std::string stem = p.filename().string();
  if (stem.rfind("tb", 0) == 0 || stem.rfind("test", 0) == 0) return true;
  return has_ext(p, {".py", ".v", ".sv"});
}

ProjectRecord scan_project(const fs::path& dir, const ShuttleId& shuttle) {
  ProjectRecord r;
  r.project_id = dir.filename().string();
  r.shuttle = shuttle;
  r.dir = dir;
  try {
    fs::path src = dir / "src", test = dir / "test";
    std::vector<fs::path> rtl;
    if (fs::is_directory(src))
      for (const auto& f : files_below(src))
        if (has_ext(f, {".v", ".sv"})) rtl.push_back(f);
    r.src_dir_has_rtl = !rtl.empty();

    if (fs::is_directory(test))
      for (const auto& f : files_below(test))
        if (is_testbench_name(f.filename().string())) r.test_files.push_back(f);
    r.test_dir_has_testbench = !r.test_files.empty();

    for (const fs::path& d : {dir, test})
      for (const char* name : {"Makefile", "makefile"})
        if (fs::is_regular_file(d / name)) r.makefile_present = true;

    fs::path yaml = dir / "info.yaml";
    if (!fs::is_regular_file(yaml)) {
      r.flag = "manifest-missing";
    } else {
      std::ifstream in(yaml, std::ios::binary);
      if (!in) throw IoError("cannot read " + yaml.string());
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        r.manifest = parse_manifest(ss.str());
      } catch (const ManifestError& e) {
        r.flag = std::string("manifest-invalid: ") + e.what();
      }
    }

    if (r.manifest) {
      for (const auto& s : r.manifest->source_files) {
        fs::path rel(s);
        if (rel.is_absolute() || s.find("..") != std::string::npos) {
          r.unresolved_sources.push_back(s);
          continue;
        }
        if (fs::is_regular_file(src / rel)) r.src_files.push_back(src / rel);
        else if (fs::is_regular_file(dir / rel)) r.src_files.push_back(dir / rel);
        else r.unresolved_sources.push_back(s);
      }
    } else {
      r.src_files = rtl;
    }
  } catch (const fs::filesystem_error& e) {
    r.flag = std::string("unreadable: ") + e.what();
  } catch (const IoError& e) {
    r.flag = std::string("unreadable: ") + e.what();
  }
  return r;
}

std::vector<ProjectRecord> scan_corpus(const fs::path& root, const ShuttleId& shuttle) {
  std::vector<fs::path> dirs;
  try {
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory()) dirs.push_back(e.path());
  } catch (const fs::filesystem_error& e) {
    throw IoError("cannot read corpus root " + root.string() + ": " + e.what());
  }
  std::sort(dirs.begin(), dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  std::vector<ProjectRecord> out;
  out.reserve(dirs.size());
  for (const auto& d : dirs) out.push_back(scan_project(d, shuttle));
  return out;
}

FilterResult filter_project(const ProjectRecord& r) {
  auto reject = [](RejectReason why) { return FilterResult{false, why}; };
  if (r.flag.rfind("unreadable", 0) == 0) return reject(RejectReason::SrcDir);
  if (!r.src_dir_has_rtl) return reject(RejectReason::SrcDir);
  if (!r.test_dir_has_testbench) return reject(RejectReason::TestDir);
  if (!r.makefile_present) return reject(RejectReason::Makefile);
  if (!r.manifest) return reject(RejectReason::Manifest);
  if (!r.unresolved_sources.empty() || r.src_files.empty()) return reject(RejectReason::UnresolvedSource);
  return {true, RejectReason::None};
}

}  // namespace modbench
