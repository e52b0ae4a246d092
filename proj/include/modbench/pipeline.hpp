#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "modbench/contamination.hpp"
#include "modbench/corpus.hpp"
#include "modbench/error.hpp"
#include "modbench/evaluate.hpp"
#include "modbench/taskgen.hpp"

namespace modbench {

using Json = nlohmann::ordered_json;

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum ExitCode { kExitOk = 0, kExitFatal = 1, kExitPartial = 2 };

struct Config {
  double threshold = 0.70;
  unsigned k = 30;
  unsigned num_perms = 128;
  unsigned shingle_words = 5;
  std::vector<std::string> keywords;
  std::vector<double> k_grid;
  uint64_t conflict_budget = sat::kDefaultConflictBudget;
  uint64_t max_tokens = 2000;
  uint64_t seed = 1;
  std::string version = "dev";
  unsigned jobs = 1;  // 0 = one per hardware thread

  Config();
};

// YAML mapping with any of the Config field names. Unknown keys are an
// error. Throws ConfigError.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& yaml_text);
Json config_json(const Config& c);

// Parses "10,15,20". Throws ConfigError.
std::vector<double> parse_k_grid(const std::string& text);

// Runs fn(0..n-1) on up to `jobs` threads.
void parallel_for(size_t n, unsigned jobs, const std::function<void(size_t)>& fn);

Json task_to_json(const Task& t);
Task task_from_json(const Json& j);
Json record_to_json(const ProjectRecord& r, const FilterResult& f);
Json eval_to_json(const EvalResult& r, const ShuttleId& shuttle);
Json logprob_to_json(const LogprobRecord& r);
LogprobRecord logprob_from_json(const Json& j);

// One JSON value per non-blank line. Throws IoError.
std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

std::vector<Task> read_tasks(const std::filesystem::path& path);

struct ShuttleRoot {
  ShuttleId shuttle;
  std::filesystem::path root;
};

// corpus -> preprocess -> parse -> tasks -> dedup -> self-verification.
// Writes projects.jsonl, merged/, tasks.jsonl, dedup_report.jsonl,
// verification.jsonl and release.json into `out_dir`.
int run_build(const Config& cfg, const std::vector<ShuttleRoot>& shuttles, const std::filesystem::path& out_dir,
              std::ostream& log);

struct MetricRow {
  std::string shuttle;
  size_t tasks = 0;
  double stx = 0.0;
  double eqv = 0.0;
  double cov = 0.0;
};

// Per-shuttle rows (oldest first) followed by an "Overall" row.
std::vector<MetricRow> summarize_results(const std::vector<Json>& results);
std::string format_metrics(const std::vector<MetricRow>& rows);

int run_eval(const Config& cfg, const std::filesystem::path& tasks_path, const std::filesystem::path& candidates_dir,
             const std::filesystem::path& results_path, std::ostream& out, std::ostream& log);

struct StatsRow {
  std::string shuttle;
  size_t samples = 0;
  double loc = 0.0;
  double complexity = 0.0;
};

// Throws Error("no samples") on an empty task list.
std::vector<StatsRow> compute_stats(const std::vector<Task>& tasks, const std::vector<std::string>& keywords);
std::string format_stats(const std::vector<StatsRow>& rows);

int run_stats(const Config& cfg, const std::filesystem::path& tasks_path, std::ostream& out, std::ostream& log);

// Min-K curves per (model, shuttle) and per (model, "all").
Json audit_report(const Config& cfg, const std::vector<Task>& tasks, const std::vector<LogprobRecord>& records,
                  std::vector<std::string>& warnings);

int run_audit(const Config& cfg, const std::filesystem::path& tasks_path, const std::filesystem::path& logprobs_path,
              const std::filesystem::path& report_path, std::ostream& out, std::ostream& log);

}  // namespace modbench
