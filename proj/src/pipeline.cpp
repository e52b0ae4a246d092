#include "modbench/pipeline.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "modbench/dedup.hpp"
#include "modbench/metrics.hpp"
#include "modbench/parser.hpp"
#include "modbench/preprocess.hpp"

namespace fs = std::filesystem;

namespace modbench {

Config::Config() : keywords(default_complexity_keywords()), k_grid(default_k_grid()) {}

namespace {

template <typename T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

const char* direction_name(ast::Direction d) {
  switch (d) {
    case ast::Direction::In: return "input";
    case ast::Direction::Out: return "output";
    case ast::Direction::InOut: return "inout";
  }
  return "?";
}

ast::Direction direction_from(const std::string& s) {
  if (s == "input") return ast::Direction::In;
  if (s == "output") return ast::Direction::Out;
  if (s == "inout") return ast::Direction::InOut;
  throw Error("unknown port direction '" + s + "'");
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string design_id(const ShuttleId& s, const std::string& project) { return s.name + "/" + project; }

std::string rel_path(const fs::path& p, const fs::path& base) { return p.lexically_relative(base).generic_string(); }

struct Verified {
  std::set<std::pair<std::string, std::string>> pairs;
};

// LSH candidates over `sets`, kept when exact Jaccard reaches the threshold
// and `allowed(i, j)` holds.
Verified near_duplicates(const std::vector<ShingleSet>& sets, const Config& cfg, BandChoice bands,
                         const std::function<bool(size_t, size_t)>& allowed) {
  std::vector<MinHashSignature> sigs(sets.size());
  parallel_for(sets.size(), cfg.jobs, [&](size_t i) { sigs[i] = minhash(sets[i], cfg.num_perms, cfg.seed); });
  LshIndex index(bands);
  for (const auto& s : sigs) index.insert(s);
  Verified v;
  for (auto [i, j] : index.candidate_pairs()) {
    if (!allowed(i, j)) continue;
    double jac = exact_jaccard(sets[i], sets[j]);
    if (jac < cfg.threshold) continue;
    auto key = std::minmax(sets[i].design_id, sets[j].design_id);
    v.pairs.emplace(key.first, key.second);
  }
  return v;
}

Json component_json(const char* level, const DuplicateComponent& c, const std::map<std::string, const ShingleSet*>& sets,
                    const std::map<std::string, ShuttleId>& shuttles) {
  Json j;
  j["level"] = level;
  j["survivor"] = c.survivor;
  j["survivor_shuttle"] = shuttles.at(c.survivor).name;
  Json members = Json::array();
  for (const auto& m : c.members) {
    Json e;
    e["id"] = m;
    e["shuttle"] = shuttles.at(m).name;
    e["jaccard_to_survivor"] = exact_jaccard(*sets.at(m), *sets.at(c.survivor));
    e["kept"] = m == c.survivor;
    members.push_back(e);
  }
  j["members"] = members;
  return j;
}

}  // namespace

Config parse_config(const std::string& yaml_text) {
  Config c;
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (root.IsNull()) return c;
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  for (const auto& kv : root) {
    std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "threshold") c.threshold = scalar<double>(v, key);
    else if (key == "k") c.k = scalar<unsigned>(v, key);
    else if (key == "num_perms") c.num_perms = scalar<unsigned>(v, key);
    else if (key == "shingle_words") c.shingle_words = scalar<unsigned>(v, key);
    else if (key == "keywords") c.keywords = scalar<std::vector<std::string>>(v, key);
    else if (key == "k_grid") c.k_grid = scalar<std::vector<double>>(v, key);
    else if (key == "conflict_budget") c.conflict_budget = scalar<uint64_t>(v, key);
    else if (key == "max_tokens") c.max_tokens = scalar<uint64_t>(v, key);
    else if (key == "seed") c.seed = scalar<uint64_t>(v, key);
    else if (key == "version") c.version = scalar<std::string>(v, key);
    else if (key == "jobs") c.jobs = scalar<unsigned>(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  if (c.num_perms < 16) throw ConfigError("num_perms must be at least 16");
  if (c.k == 0) throw ConfigError("k must be at least 1");
  if (c.shingle_words == 0) throw ConfigError("shingle_words must be at least 1");
  if (c.k_grid.empty()) throw ConfigError("k_grid is empty");
  return c;
}

Config load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Json config_json(const Config& c) {
  Json j;
  j["threshold"] = c.threshold;
  j["k"] = c.k;
  j["num_perms"] = c.num_perms;
  j["shingle_words"] = c.shingle_words;
  j["keywords"] = c.keywords;
  j["k_grid"] = c.k_grid;
  j["conflict_budget"] = c.conflict_budget;
  j["max_tokens"] = c.max_tokens;
  j["seed"] = c.seed;
  j["version"] = c.version;
  return j;
}

std::vector<double> parse_k_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size() || !(v > 0.0 && v <= 100.0)) throw std::invalid_argument(item);
      grid.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("bad K grid entry '" + item + "'");
    }
  }
  if (grid.empty()) throw ConfigError("empty K grid");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("K grid must be strictly ascending");
  return grid;
}

void parallel_for(size_t n, unsigned jobs, const std::function<void(size_t)>& fn) {
  unsigned threads = jobs ? jobs : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, n));
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

Json task_to_json(const Task& t) {
  Json j;
  j["task_id"] = t.task_id;
  j["shuttle"] = t.shuttle.name;
  j["shuttle_ordinal"] = t.shuttle.ordinal;
  j["project_id"] = t.project_id;
  j["target_module"] = t.target_module;
  Json ports = Json::array();
  for (const auto& p : t.ports) {
    Json pj;
    pj["name"] = p.name;
    pj["direction"] = direction_name(p.direction);
    pj["width"] = p.width;
    pj["signed"] = p.is_signed;
    ports.push_back(pj);
  }
  Json params = Json::array();
  for (const auto& p : t.params) params.push_back(Json{{"name", p.name}, {"value", p.value}});
  j["interface"] = Json{{"ports", ports}, {"params", params}};
  j["context_source"] = t.context_source;
  j["golden_source"] = t.golden_source;
  j["mask"] = Json{{"begin", t.mask_begin}, {"end", t.mask_end}};
  j["prompt"] = t.prompt;
  j["prompt_template"] = kPromptTemplateVersion;
  return j;
}

Task task_from_json(const Json& j) {
  try {
    Task t;
    t.task_id = j.at("task_id").get<std::string>();
    t.shuttle.name = j.at("shuttle").get<std::string>();
    t.shuttle.ordinal = j.at("shuttle_ordinal").get<uint32_t>();
    t.project_id = j.at("project_id").get<std::string>();
    t.target_module = j.at("target_module").get<std::string>();
    for (const auto& pj : j.at("interface").at("ports")) {
      ast::PortDecl p;
      p.name = pj.at("name").get<std::string>();
      p.direction = direction_from(pj.at("direction").get<std::string>());
      p.width = pj.at("width").get<uint32_t>();
      p.is_signed = pj.at("signed").get<bool>();
      t.ports.push_back(std::move(p));
    }
    for (const auto& pj : j.at("interface").at("params"))
      t.params.push_back({pj.at("name").get<std::string>(), pj.at("value").get<int64_t>()});
    t.context_source = j.at("context_source").get<std::string>();
    t.golden_source = j.at("golden_source").get<std::string>();
    t.mask_begin = j.at("mask").at("begin").get<size_t>();
    t.mask_end = j.at("mask").at("end").get<size_t>();
    t.prompt = j.at("prompt").get<std::string>();
    if (t.mask_begin > t.mask_end || t.mask_end > t.context_source.size()) throw Error("mask outside context");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed task: ") + e.what());
  }
}

Json record_to_json(const ProjectRecord& r, const FilterResult& f) {
  Json j;
  j["project_id"] = r.project_id;
  j["shuttle"] = r.shuttle.name;
  j["accepted"] = f.accepted;
  j["reject_reason"] = f.accepted ? Json(nullptr) : Json(reject_reason_name(f.reason));
  Json src = Json::array(), test = Json::array();
  for (const auto& p : r.src_files) src.push_back(rel_path(p, r.dir));
  for (const auto& p : r.test_files) test.push_back(rel_path(p, r.dir));
  j["src_files"] = src;
  j["test_files"] = test;
  if (!r.flag.empty()) j["flag"] = r.flag;
  if (!r.unresolved_sources.empty()) j["unresolved_sources"] = r.unresolved_sources;
  if (r.manifest) j["top_module"] = r.manifest->top_module;
  return j;
}

Json eval_to_json(const EvalResult& r, const ShuttleId& shuttle) {
  Json j;
  j["task_id"] = r.task_id;
  j["shuttle"] = shuttle.name;
  j["shuttle_ordinal"] = shuttle.ordinal;
  j["stx"] = r.stx ? "pass" : "fail";
  if (!r.stx) j["stx_reason"] = r.stx_reason;
  j["eqv"] = eqv_name(r.eqv);
  if (!r.eqv_reason.empty()) j["eqv_reason"] = r.eqv_reason;
  j["coverage"] = r.coverage;
  j["coverage_unweighted"] = r.coverage_unweighted;
  Json parts = Json::array();
  for (const auto& p : r.partitions)
    parts.push_back(Json{{"output", p.output}, {"weight", p.weight}, {"verdict", verdict_name(p.verdict)}});
  j["partitions"] = parts;
  if (r.eqv == EqvStatus::NotEquivalent) j["counterexample"] = r.counterexample;
  j["method"] = r.method;
  j["runtime_ms"] = std::round(r.runtime_ms * 1000.0) / 1000.0;
  j["solver"] = Json{{"queries", r.queries},
                     {"conflicts", r.stats.conflicts},
                     {"decisions", r.stats.decisions},
                     {"propagations", r.stats.propagations}};
  return j;
}

Json logprob_to_json(const LogprobRecord& r) {
  return Json{{"task_id", r.task_id}, {"model_id", r.model_id}, {"tokens", r.tokens}, {"logprobs", r.logprobs}};
}

LogprobRecord logprob_from_json(const Json& j) {
  try {
    LogprobRecord r;
    r.task_id = j.at("task_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    if (j.contains("tokens")) r.tokens = j.at("tokens").get<std::vector<std::string>>();
    r.logprobs = j.at("logprobs").get<std::vector<double>>();
    if (r.tokens.empty()) r.tokens.assign(r.logprobs.size(), "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ContaminationError(std::string("malformed log-probability record: ") + e.what());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<Json> read_jsonl(const fs::path& path) {
  std::string text = read_text(path);
  std::vector<Json> rows;
  std::stringstream ss(text);
  std::string line;
  size_t n = 0;
  while (std::getline(ss, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const fs::path& path, const std::vector<Json>& rows) {
  std::string text;
  for (const auto& r : rows) text += r.dump() + "\n";
  write_text(path, text);
}

std::vector<Task> read_tasks(const fs::path& path) {
  std::vector<Task> tasks;
  for (const auto& j : read_jsonl(path)) tasks.push_back(task_from_json(j));
  return tasks;
}

int run_build(const Config& cfg, const std::vector<ShuttleRoot>& shuttles_in, const fs::path& out_dir,
              std::ostream& log) {
  std::vector<ShuttleRoot> shuttles = shuttles_in;
  std::sort(shuttles.begin(), shuttles.end(),
            [](const ShuttleRoot& a, const ShuttleRoot& b) { return a.shuttle < b.shuttle; });
  for (size_t i = 1; i < shuttles.size(); ++i) {
    if (shuttles[i].shuttle.ordinal == shuttles[i - 1].shuttle.ordinal)
      throw ConfigError("shuttle ordinal " + std::to_string(shuttles[i].shuttle.ordinal) + " used twice");
  }
  std::set<std::string> names;
  for (const auto& s : shuttles)
    if (!names.insert(s.shuttle.name).second) throw ConfigError("shuttle '" + s.shuttle.name + "' given twice");

  struct Project {
    ProjectRecord rec;
    FilterResult filter;
    AssertionCount assertions;
    MergedDesign merged;
    std::string error;
    bool merged_ok = false;
    bool parsed_ok = false;
    std::vector<Task> tasks;
  };
  std::vector<Project> projects;
  for (const auto& s : shuttles)
    for (auto& rec : scan_corpus(s.root, s.shuttle)) projects.push_back(Project{std::move(rec), {}, {}, {}, {}, false, false, {}});
  for (auto& p : projects) p.filter = filter_project(p.rec);

  parallel_for(projects.size(), cfg.jobs, [&](size_t i) {
    Project& p = projects[i];
    if (!p.filter.accepted) return;
    p.assertions = count_assertions(p.rec.test_files);
    try {
      p.merged = preprocess_project(p.rec);
      p.merged_ok = true;
      ast::SourceUnit unit = parse(p.merged.source);
      p.parsed_ok = true;
      p.tasks = build_tasks(p.merged, unit);
    } catch (const ParseError& e) {
      p.error = "parse: " + std::string(e.what());
      size_t line = 1 + static_cast<size_t>(std::count(p.merged.source.begin(),
                                                        p.merged.source.begin() + static_cast<long>(std::min(e.offset(), p.merged.source.size())), '\n'));
      if (line <= p.merged.origin_map.size()) {
        const auto& o = p.merged.origin_map[line - 1];
        p.error += " (" + o.file + ":" + std::to_string(o.line) + ")";
      }
    } catch (const Error& e) {
      p.error = e.what();
    }
  });

  bool partial = false;
  std::vector<Json> project_rows;
  for (const auto& p : projects) {
    Json j = record_to_json(p.rec, p.filter);
    if (p.filter.accepted) {
      j["assertions"] = p.assertions.total;
      if (!p.error.empty()) j["error"] = p.error;
    }
    project_rows.push_back(j);
    if (!p.error.empty()) {
      partial = true;
      log << "error: " << design_id(p.rec.shuttle, p.rec.project_id) << ": " << p.error << "\n";
    }
  }
  write_jsonl(out_dir / "projects.jsonl", project_rows);
  for (const auto& p : projects) {
    if (!p.merged_ok) continue;
    std::string stem = p.rec.shuttle.name + "__" + p.rec.project_id;
    write_text(out_dir / "merged" / (stem + ".merged.v"), p.merged.source);
    write_text(out_dir / "merged" / (stem + ".origin.tsv"), origin_map_tsv(p.merged.origin_map));
  }

  // Design-level near-duplicates.
  BandChoice bands = choose_bands(cfg.num_perms, cfg.threshold);
  std::vector<size_t> design_idx;
  std::vector<ShingleSet> design_sets;
  std::map<std::string, ShuttleId> shuttle_of;
  std::vector<DedupDesign> design_list;
  for (size_t i = 0; i < projects.size(); ++i) {
    if (!projects[i].parsed_ok) continue;
    std::string id = design_id(projects[i].rec.shuttle, projects[i].rec.project_id);
    ShingleSet s = shingle(projects[i].merged.source, cfg.shingle_words, id);
    if (s.hashes.empty()) continue;
    design_idx.push_back(i);
    design_sets.push_back(std::move(s));
    shuttle_of[id] = projects[i].rec.shuttle;
    design_list.push_back({id, projects[i].rec.shuttle});
  }
  Verified dpairs = near_duplicates(design_sets, cfg, bands, [](size_t, size_t) { return true; });
  std::set<std::string> kept_designs = temporal_dedup(design_list, dpairs.pairs);
  std::map<std::string, const ShingleSet*> design_set_of;
  for (const auto& s : design_sets) design_set_of[s.design_id] = &s;
  std::vector<Json> report;
  for (const auto& c : duplicate_components(design_list, dpairs.pairs))
    report.push_back(component_json("design", c, design_set_of, shuttle_of));

  // Task-level near-duplicates among the surviving designs.
  std::vector<const Task*> tasks;
  for (size_t i : design_idx) {
    const auto& p = projects[i];
    if (!kept_designs.count(design_id(p.rec.shuttle, p.rec.project_id))) continue;
    for (const auto& t : p.tasks) tasks.push_back(&t);
  }
  std::vector<ShingleSet> task_sets;
  std::vector<DedupDesign> task_list;
  std::map<std::string, const ShingleSet*> task_set_of;
  std::map<std::string, ShuttleId> task_shuttle;
  task_sets.reserve(tasks.size());
  for (const Task* t : tasks) {
    task_sets.push_back(shingle(t->golden_source, cfg.shingle_words, t->task_id));
    task_list.push_back({t->task_id, t->shuttle});
    task_shuttle[t->task_id] = t->shuttle;
  }
  for (const auto& s : task_sets) task_set_of[s.design_id] = &s;
  Verified tpairs = near_duplicates(task_sets, cfg, bands, [&](size_t i, size_t j) {
    return tasks[i]->shuttle != tasks[j]->shuttle || tasks[i]->project_id != tasks[j]->project_id;
  });
  std::set<std::string> kept_tasks = temporal_dedup(task_list, tpairs.pairs);
  for (const auto& c : duplicate_components(task_list, tpairs.pairs))
    report.push_back(component_json("task", c, task_set_of, task_shuttle));
  write_jsonl(out_dir / "dedup_report.jsonl", report);

  std::vector<const Task*> unique;
  for (const Task* t : tasks)
    if (kept_tasks.count(t->task_id)) unique.push_back(t);

  EquivOptions eopt{cfg.k, cfg.conflict_budget};
  std::vector<SelfCheck> checks(unique.size());
  parallel_for(unique.size(), cfg.jobs, [&](size_t i) { checks[i] = self_verify(*unique[i], eopt); });

  std::vector<Json> task_rows, verify_rows;
  Json retained = Json::array();
  std::map<std::string, std::map<std::string, size_t>> per_shuttle;
  for (const auto& s : shuttles) per_shuttle[s.shuttle.name] = {};
  for (const auto& p : projects) {
    auto& row = per_shuttle[p.rec.shuttle.name];
    ++row["scanned"];
    row["accepted"] += p.filter.accepted;
    row["merged"] += p.merged_ok;
    row["parsed"] += p.parsed_ok;
    row["tasks"] += p.tasks.size();
  }
  for (size_t i = 0; i < unique.size(); ++i) {
    const Task& t = *unique[i];
    ++per_shuttle[t.shuttle.name]["deduplicated"];
    Json v{{"task_id", t.task_id}, {"pass", checks[i].pass}};
    if (!checks[i].pass) v["reason"] = checks[i].reason;
    if (!checks[i].async_resets.empty()) v["reset_normalized"] = checks[i].async_resets;
    verify_rows.push_back(v);
    if (!checks[i].pass) continue;
    ++per_shuttle[t.shuttle.name]["verified"];
    task_rows.push_back(task_to_json(t));
    retained.push_back(t.task_id);
  }
  write_jsonl(out_dir / "tasks.jsonl", task_rows);
  write_jsonl(out_dir / "verification.jsonl", verify_rows);

  auto total = [&](const char* key) {
    size_t n = 0;
    for (auto& [name, row] : per_shuttle) n += row[key];
    return n;
  };
  const char* stage_keys[] = {"scanned", "accepted", "merged", "parsed", "tasks", "deduplicated", "verified"};
  Json stages, shuttle_json = Json::array(), counts;
  for (const char* k : stage_keys) stages[k] = total(k);
  for (const auto& s : shuttles) {
    shuttle_json.push_back(Json{{"name", s.shuttle.name}, {"ordinal", s.shuttle.ordinal}, {"root", s.root.generic_string()}});
    Json row;
    for (const char* k : stage_keys) row[k] = per_shuttle[s.shuttle.name][k];
    counts[s.shuttle.name] = row;
  }
  Json release;
  release["version"] = cfg.version;
  release["prompt_template"] = kPromptTemplateVersion;
  release["config"] = config_json(cfg);
  release["bands"] = Json{{"bands", bands.bands}, {"rows", bands.rows}};
  release["shuttles"] = shuttle_json;
  release["stages"] = stages;
  release["per_shuttle"] = counts;
  release["tasks"] = retained;
  write_text(out_dir / "release.json", release.dump(2) + "\n");

  log << "stages:";
  for (const char* k : stage_keys) log << " " << k << "=" << stages[k].get<size_t>();
  log << "\n";
  return partial ? kExitPartial : kExitOk;
}

std::vector<MetricRow> summarize_results(const std::vector<Json>& results) {
  struct Acc {
    uint32_t ordinal = 0;
    size_t n = 0, stx = 0, eqv = 0;
    double cov = 0.0;
  };
  std::map<std::string, Acc> by;
  Acc all;
  for (const auto& r : results) {
    std::string shuttle = r.value("shuttle", "");
    Acc& a = by[shuttle];
    a.ordinal = r.value("shuttle_ordinal", 0u);
    for (Acc* x : {&a, &all}) {
      ++x->n;
      x->stx += r.at("stx") == "pass";
      x->eqv += r.at("eqv") == "equivalent";
      x->cov += r.at("coverage").get<double>();
    }
  }
  std::vector<std::pair<std::string, Acc>> ordered(by.begin(), by.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) {
    return x.second.ordinal != y.second.ordinal ? x.second.ordinal < y.second.ordinal : x.first < y.first;
  });
  auto row = [](const std::string& name, const Acc& a) {
    MetricRow m;
    m.shuttle = name;
    m.tasks = a.n;
    if (a.n) {
      double n = static_cast<double>(a.n);
      m.stx = 100.0 * static_cast<double>(a.stx) / n;
      m.eqv = 100.0 * static_cast<double>(a.eqv) / n;
      m.cov = a.cov / n;
    }
    return m;
  };
  std::vector<MetricRow> out;
  for (const auto& [name, a] : ordered) out.push_back(row(name, a));
  out.push_back(row("Overall", all));
  return out;
}

std::string format_metrics(const std::vector<MetricRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "Shuttle" << std::right << std::setw(8) << "Tasks" << std::setw(9) << "STX"
     << std::setw(9) << "EQV" << std::setw(9) << "Cov_mu" << "\n";
  for (const auto& r : rows)
    os << std::left << std::setw(12) << r.shuttle << std::right << std::setw(8) << r.tasks << std::setw(9)
       << fixed(r.stx) << std::setw(9) << fixed(r.eqv) << std::setw(9) << fixed(r.cov) << "\n";
  return os.str();
}

int run_eval(const Config& cfg, const fs::path& tasks_path, const fs::path& candidates_dir,
             const fs::path& results_path, std::ostream& out, std::ostream& log) {
  std::vector<Task> tasks = read_tasks(tasks_path);
  EquivOptions eopt{cfg.k, cfg.conflict_budget};
  std::vector<EvalResult> results(tasks.size());
  std::vector<uint8_t> missing(tasks.size(), 0);
  parallel_for(tasks.size(), cfg.jobs, [&](size_t i) {
    const Task& t = tasks[i];
    fs::path file = candidates_dir / candidate_file_name(t.task_id);
    std::string text;
    try {
      text = read_text(file);
    } catch (const IoError&) {
      missing[i] = 1;
      results[i].task_id = t.task_id;
      results[i].stx_reason = "missing candidate file " + candidate_file_name(t.task_id);
      results[i].eqv_reason = "syntax check failed";
      return;
    }
    results[i] = evaluate_candidate(t, text, eopt);
  });
  std::vector<Json> rows;
  size_t n_missing = 0;
  for (size_t i = 0; i < tasks.size(); ++i) {
    rows.push_back(eval_to_json(results[i], tasks[i].shuttle));
    n_missing += missing[i];
  }
  write_jsonl(results_path, rows);
  out << format_metrics(summarize_results(rows));
  if (n_missing) log << "warning: " << n_missing << " candidate file(s) missing\n";
  return n_missing ? kExitPartial : kExitOk;
}

std::vector<StatsRow> compute_stats(const std::vector<Task>& tasks, const std::vector<std::string>& keywords) {
  if (tasks.empty()) throw Error("no samples");
  struct Acc {
    uint32_t ordinal = 0;
    size_t n = 0;
    double loc = 0.0, cx = 0.0;
  };
  std::map<std::string, Acc> by;
  Acc all;
  for (const auto& t : tasks) {
    Acc& a = by[t.shuttle.name];
    a.ordinal = t.shuttle.ordinal;
    double loc = static_cast<double>(loc_count(t.golden_source));
    double cx = static_cast<double>(complexity_score(t.golden_source, keywords));
    for (Acc* x : {&a, &all}) {
      ++x->n;
      x->loc += loc;
      x->cx += cx;
    }
  }
  std::vector<std::pair<std::string, Acc>> ordered(by.begin(), by.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) {
    return x.second.ordinal != y.second.ordinal ? x.second.ordinal < y.second.ordinal : x.first < y.first;
  });
  auto row = [](const std::string& name, const Acc& a) {
    double n = static_cast<double>(a.n);
    return StatsRow{name, a.n, a.loc / n, a.cx / n};
  };
  std::vector<StatsRow> out;
  for (const auto& [name, a] : ordered) out.push_back(row(name, a));
  out.push_back(row("Total", all));
  return out;
}

std::string format_stats(const std::vector<StatsRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "Shuttle" << std::right << std::setw(9) << "Samples" << std::setw(10) << "LOCs"
     << std::setw(12) << "Complexity" << "\n";
  for (const auto& r : rows)
    os << std::left << std::setw(12) << r.shuttle << std::right << std::setw(9) << r.samples << std::setw(10)
       << fixed(r.loc) << std::setw(12) << fixed(r.complexity) << "\n";
  return os.str();
}

int run_stats(const Config& cfg, const fs::path& tasks_path, std::ostream& out, std::ostream&) {
  out << format_stats(compute_stats(read_tasks(tasks_path), cfg.keywords));
  return kExitOk;
}

Json audit_report(const Config& cfg, const std::vector<Task>& tasks, const std::vector<LogprobRecord>& records,
                  std::vector<std::string>& warnings) {
  std::map<std::string, const Task*> by_id;
  for (const auto& t : tasks) by_id[t.task_id] = &t;
  std::set<std::string> covered;
  // model -> subset -> records
  std::map<std::string, std::map<std::string, std::vector<LogprobRecord>>> groups;
  std::map<std::string, uint32_t> ordinal;
  Json skipped = Json::array();
  for (const auto& r : records) {
    auto it = by_id.find(r.task_id);
    std::string why;
    if (it == by_id.end()) {
      why = "unknown task";
    } else {
      try {
        validate_record(r);
        if (r.logprobs.empty()) why = "no tokens";
      } catch (const ContaminationError& e) {
        why = e.what();
      }
    }
    if (why.empty()) {
      uint64_t n = r.tokens.empty() ? word_count(it->second->golden_source) : r.tokens.size();
      if (filter_by_length({{r.task_id, n}}, cfg.max_tokens).empty()) why = "longer than max_tokens";
    }
    if (!why.empty()) {
      skipped.push_back(Json{{"task_id", r.task_id}, {"model", r.model_id}, {"reason", why}});
      continue;
    }
    covered.insert(r.task_id);
    const ShuttleId& s = it->second->shuttle;
    ordinal[s.name] = s.ordinal;
    groups[r.model_id][s.name].push_back(r);
    groups[r.model_id]["all"].push_back(r);
  }
  for (const auto& t : tasks)
    if (!covered.count(t.task_id)) warnings.push_back("no usable log-probabilities for " + t.task_id);
  for (const auto& s : skipped)
    warnings.push_back("skipped " + s["task_id"].get<std::string>() + " (" + s["model"].get<std::string>() +
                       "): " + s["reason"].get<std::string>());

  Json curves = Json::array();
  for (const auto& [model, subsets] : groups) {
    std::vector<std::string> names;
    for (const auto& [name, recs] : subsets)
      if (name != "all") names.push_back(name);
    std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
      return ordinal[a] != ordinal[b] ? ordinal[a] < ordinal[b] : a < b;
    });
    names.push_back("all");
    for (const auto& name : names) {
      const auto& recs = subsets.at(name);
      MinKCurve c = min_k_curve(recs, cfg.k_grid);
      curves.push_back(Json{{"model", model},
                            {"subset", name},
                            {"records", recs.size()},
                            {"mean_exp_min_k", c.mean_exp},
                            {"auc", c.auc}});
    }
  }
  Json report;
  report["k_grid"] = cfg.k_grid;
  report["max_tokens"] = cfg.max_tokens;
  report["curves"] = curves;
  report["skipped"] = skipped;
  return report;
}

int run_audit(const Config& cfg, const fs::path& tasks_path, const fs::path& logprobs_path,
              const fs::path& report_path, std::ostream& out, std::ostream& log) {
  std::vector<Task> tasks = read_tasks(tasks_path);
  std::vector<LogprobRecord> records;
  bool malformed = false;
  for (const auto& j : read_jsonl(logprobs_path)) {
    try {
      records.push_back(logprob_from_json(j));
    } catch (const ContaminationError& e) {
      log << "warning: " << e.what() << "\n";
      malformed = true;
    }
  }
  std::vector<std::string> warnings;
  Json report = audit_report(cfg, tasks, records, warnings);
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  if (report["curves"].empty()) throw ContaminationError("no usable log-probability records");
  write_text(report_path, report.dump(2) + "\n");
  out << std::left << std::setw(24) << "Model" << std::setw(12) << "Subset" << std::right << std::setw(9) << "Records"
      << std::setw(12) << "AUC" << "\n";
  for (const auto& c : report["curves"])
    out << std::left << std::setw(24) << c["model"].get<std::string>() << std::setw(12)
        << c["subset"].get<std::string>() << std::right << std::setw(9) << c["records"].get<size_t>() << std::setw(12)
        << fixed(c["auc"].get<double>(), 6) << "\n";
  return malformed || !report["skipped"].empty() ? kExitPartial : kExitOk;
}

}  // namespace modbench
