#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "modbench/pipeline.hpp"

namespace fs = std::filesystem;
using namespace modbench;

namespace {

struct Common {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<unsigned> jobs;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "YAML configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Seed for every randomized step");
  cmd->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)");
}

Config resolve(const Common& c) {
  Config cfg = c.config.empty() ? Config{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.jobs) cfg.jobs = *c.jobs;
  return cfg;
}

std::vector<ShuttleRoot> parse_corpora(const std::vector<std::string>& specs) {
  std::vector<ShuttleRoot> out;
  for (size_t i = 0; i < specs.size(); ++i) {
    size_t eq = specs[i].find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == specs[i].size())
      throw ConfigError("--corpus expects NAME=PATH, got '" + specs[i] + "'");
    out.push_back({{specs[i].substr(0, eq), static_cast<uint32_t>(i)}, fs::path(specs[i].substr(eq + 1))});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Module-completion benchmark builder and formal evaluator"};
  app.require_subcommand(1);

  Common build_c, eval_c, stats_c, audit_c;

  auto* build = app.add_subcommand("build", "Build tasks from one or more shuttle corpora");
  std::vector<std::string> corpora;
  std::string out_dir = "out";
  std::optional<std::string> version;
  std::optional<double> threshold;
  std::optional<unsigned> num_perms;
  build->add_option("--corpus", corpora, "NAME=PATH, oldest shuttle first")->required();
  build->add_option("--out", out_dir, "Output directory");
  build->add_option("--version", version, "Release version tag");
  build->add_option("--threshold", threshold, "Jaccard threshold for near-duplicates");
  build->add_option("--num-perms", num_perms, "MinHash permutations");
  add_common(build, build_c);

  auto* eval = app.add_subcommand("eval", "Check candidate modules against their golden references");
  std::string tasks_path = "tasks.jsonl", candidates, results = "results.jsonl";
  std::optional<unsigned> k;
  std::optional<uint64_t> budget;
  eval->add_option("--tasks", tasks_path, "tasks.jsonl from build");
  eval->add_option("--candidates", candidates, "Directory of <task_id with / as __>.v files")->required();
  eval->add_option("--out", results, "Per-task results file");
  eval->add_option("--k", k, "Induction depth");
  eval->add_option("--budget", budget, "SAT conflict budget per query");
  add_common(eval, eval_c);

  auto* stats = app.add_subcommand("stats", "Sample counts, mean LOC and mean complexity per shuttle");
  stats->add_option("--tasks", tasks_path, "tasks.jsonl from build");
  add_common(stats, stats_c);

  auto* audit = app.add_subcommand("audit", "Min-K contamination curves from log-probability dumps");
  std::string logprobs, report = "contamination_report.json", k_grid;
  std::optional<uint64_t> max_tokens;
  audit->add_option("--tasks", tasks_path, "tasks.jsonl from build");
  audit->add_option("--logprobs", logprobs, "logprobs.jsonl")->required();
  audit->add_option("--out", report, "Report file");
  audit->add_option("--k-grid", k_grid, "Comma-separated K percentages, e.g. 10,15,20,25,30");
  audit->add_option("--max-tokens", max_tokens, "Skip golden modules longer than this");
  add_common(audit, audit_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (*build) {
      Config cfg = resolve(build_c);
      if (version) cfg.version = *version;
      if (threshold) cfg.threshold = *threshold;
      if (num_perms) cfg.num_perms = *num_perms;
      if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
      if (cfg.num_perms < 16) throw ConfigError("num_perms must be at least 16");
      return run_build(cfg, parse_corpora(corpora), out_dir, std::cerr);
    }
    if (*eval) {
      Config cfg = resolve(eval_c);
      if (k) cfg.k = *k;
      if (budget) cfg.conflict_budget = *budget;
      return run_eval(cfg, tasks_path, candidates, results, std::cout, std::cerr);
    }
    if (*stats) return run_stats(resolve(stats_c), tasks_path, std::cout, std::cerr);
    if (*audit) {
      Config cfg = resolve(audit_c);
      if (!k_grid.empty()) cfg.k_grid = parse_k_grid(k_grid);
      if (max_tokens) cfg.max_tokens = *max_tokens;
      return run_audit(cfg, tasks_path, logprobs, report, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
