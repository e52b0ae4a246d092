// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "modbench/contamination.hpp"
#include "modbench/dedup.hpp"
#include "modbench/elaborate.hpp"
#include "modbench/equiv.hpp"
#include "modbench/evaluate.hpp"
#include "modbench/interp.hpp"
#include "modbench/parser.hpp"
#include "modbench/pipeline.hpp"
#include "modbench/preprocess.hpp"
#include "modbench/taskgen.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace modbench;

namespace {

const fs::path kFixtures = MODBENCH_FIXTURES;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail, double secs) {
  std::printf("%s %2d %s: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<fs::path> fixture_modules() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kFixtures / "modules"))
    if (e.path().extension() == ".v") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<Task> fixture_tasks() {
  std::vector<Task> tasks;
  for (const auto& f : fixture_modules()) {
    MergedDesign d = preprocess_text(read_text(f), f.filename().string(), {});
    d.project_id = f.stem().string();
    d.shuttle = {"FX", 0};
    auto more = build_tasks(d, parse(d.source));
    tasks.insert(tasks.end(), more.begin(), more.end());
  }
  return tasks;
}

oracle::Stimulus random_stimulus(const Netlist& n, oracle::Rng& rng, size_t cycles) {
  oracle::Stimulus s(cycles);
  for (auto& c : s)
    for (const auto& p : n.ports)
      if (p.direction == ast::Direction::In) c[p.name] = BitVec(p.width, rng());
  return s;
}

// ---------------------------------------------------------------------------

void criterion1() {
  Timer t;
  oracle::Rng rng(101);
  int pairs = 0, disagree = 0, equal = 0;
  for (int i = 0; i < 240; ++i) {
    unsigned ni = 2 + rng() % 9;
    Netlist g = oracle::random_comb(rng, ni, 5 + rng() % 36, 1 + rng() % 4);
    Netlist c = oracle::rewrite_equivalent(g, rng);
    bool same = true;
    // Mutants in dead logic change nothing; retry a few times for one that does.
    for (int tries = 0; i % 2 && same && tries < 10; ++tries) {
      c = oracle::mutate_gate(g, rng);
      same = oracle::truth_table(g) == oracle::truth_table(c);
    }
    if (i % 2 == 0) same = oracle::truth_table(g) == oracle::truth_table(c);
    CheckResult r = check_combinational(build_miter(g, c));
    bool ok = same ? r.verdict == Verdict::Equivalent : r.verdict == Verdict::NotEquivalent;
    if (ok && r.verdict == Verdict::NotEquivalent) {
      ok = r.stimulus && oracle::run_trace(g, *r.stimulus) != oracle::run_trace(c, *r.stimulus);
    }
    disagree += !ok;
    equal += same;
    ++pairs;
  }
  double s = t.secs();
  report(1, disagree == 0 && pairs >= 200 && s < 120, "combinational equivalence vs truth tables",
         fmt("%d pairs (%d equal by table), %d disagreements", pairs, equal, disagree), s);
}

void criterion2() {
  Timer t;
  oracle::Rng rng(202);
  int pairs = 0, unsound = 0, bad_trace = 0, distinguishable = 0;
  std::map<Verdict, int> counts;
  for (int i = 0; i < 40; ++i) {
    unsigned ni = 1 + rng() % 3, sb = 2 + rng() % 5, no = 1 + rng() % 2;
    Netlist g = oracle::random_fsm(rng, ni, sb, no, 3 + rng() % 6);
    Netlist c;
    switch (i % 4) {
      case 0: c = oracle::reencode(g, rng); break;
      case 1: c = oracle::rewrite_equivalent(g, rng); break;
      case 2: c = oracle::mutate_gate(g, rng); break;
      default: {
        c = oracle::random_fsm(rng, ni, 2 + rng() % 5, no, 3 + rng() % 6);
      }
    }
    auto diff = oracle::distinguishing_trace(g, c);
    distinguishable += diff.has_value();
    CheckResult r = check_inductive(build_miter(g, c));
    ++counts[r.verdict];
    if (r.verdict == Verdict::Equivalent && diff) ++unsound;
    if (r.verdict == Verdict::NotEquivalent) {
      bool genuine = r.stimulus && oracle::run_trace(g, *r.stimulus) != oracle::run_trace(c, *r.stimulus) &&
                     replay(g, c, *r.stimulus).mismatch;
      bad_trace += !genuine;
    }
    ++pairs;
  }
  double s = t.secs();
  report(2, unsound == 0 && bad_trace == 0 && pairs >= 20 && s < 180, "sequential soundness vs product BFS",
         fmt("%d pairs (%d distinguishable); eq=%d neq=%d unknown=%d; unsound=%d, bad traces=%d", pairs,
             distinguishable, counts[Verdict::Equivalent], counts[Verdict::NotEquivalent], counts[Verdict::Unknown],
             unsound, bad_trace),
         s);
}

std::vector<Task> corpus_tasks(const fs::path& out) {
  Config cfg;
  std::ostringstream log;
  run_build(cfg, {{{"TT06", 0}, kFixtures / "corpus" / "TT06"}, {{"TT07", 1}, kFixtures / "corpus" / "TT07"}}, out,
            log);
  return read_tasks(out / "tasks.jsonl");
}

void criterion3(const std::vector<Task>& module_tasks, const std::vector<Task>& built) {
  Timer t;
  int verified = 0, rejected = 0, bad = 0;
  std::vector<Task> all = module_tasks;
  all.insert(all.end(), built.begin(), built.end());
  for (const auto& task : all) {
    if (!self_verify(task).pass) {
      ++rejected;
      continue;
    }
    ++verified;
    EvalResult r = evaluate_candidate(task, task.golden_source);
    if (!(r.stx && r.eqv == EqvStatus::Equivalent && r.coverage == 100.0)) ++bad;
  }
  report(3, bad == 0 && verified > 0, "self-verification reflexivity",
         fmt("%d tasks pass self-verify (%d rejected), %d not equivalent at 100%% coverage", verified, rejected, bad),
         t.secs());
}

// True when the interpreter separates the two sources on the stimulus.
bool interp_differs(const std::string& a, const std::string& b, const std::string& top, const oracle::Stimulus& s) {
  ast::SourceUnit ua = parse(a), ub = parse(b);
  return interpret(ua, top, s) != interpret(ub, top, s);
}

void criterion4(const std::vector<Task>& tasks) {
  Timer t;
  oracle::Rng rng(404);
  int changing = 0, caught = 0, tried = 0, invalid = 0;
  for (const auto& task : tasks) {
    std::string golden = reconstruct(task, task.golden_source);
    ast::SourceUnit gu = parse(golden);
    const ast::ModuleDecl* m = gu.find(task.target_module);
    Netlist gn = elaborate(gu, task.target_module);
    auto muts = oracle::operator_mutations(task.golden_source, m->header_end);
    std::shuffle(muts.begin(), muts.end(), rng);
    if (muts.size() > 12) muts.resize(12);

    uint32_t in_bits = 0;
    for (const auto& p : gn.ports)
      if (p.direction == ast::Direction::In) in_bits += p.width;
    oracle::Stimulus stim;
    for (int trace = 0; trace < 16; ++trace) {
      auto part = random_stimulus(gn, rng, 40);
      stim.insert(stim.end(), part.begin(), part.end());
    }
    if (in_bits <= 10) {
      for (uint64_t a = 0; a < (uint64_t{1} << in_bits); ++a) {
        std::map<std::string, BitVec> c;
        uint32_t shift = 0;
        for (const auto& p : gn.ports) {
          if (p.direction != ast::Direction::In) continue;
          c[p.name] = BitVec(p.width, a >> shift);
          shift += p.width;
        }
        stim.push_back(c);
      }
    }
    for (const auto& mu : muts) {
      std::string mutant = oracle::apply(task.golden_source, mu);
      ++tried;
      bool differs;
      try {
        differs = interp_differs(golden, reconstruct(task, mutant), task.target_module, stim);
      } catch (const Error&) {
        ++invalid;
        continue;
      }
      if (!differs) continue;
      ++changing;
      EvalResult r = evaluate_candidate(task, mutant);
      caught += r.eqv == EqvStatus::NotEquivalent;
    }
  }
  double rate = changing ? static_cast<double>(caught) / changing : 0.0;
  report(4, changing > 0 && rate >= 0.95, "mutation sensitivity",
         fmt("%d/%d behaviour-changing mutants not_equivalent (%.1f%%); %d tried, %d outside the subset", caught,
             changing, 100 * rate, tried, invalid),
         t.secs());
}

ShingleSet random_set(oracle::Rng& rng, const std::vector<uint64_t>& shared, size_t own) {
  ShingleSet s;
  s.hashes = shared;
  for (size_t i = 0; i < own; ++i) s.hashes.push_back(rng());
  std::sort(s.hashes.begin(), s.hashes.end());
  s.hashes.erase(std::unique(s.hashes.begin(), s.hashes.end()), s.hashes.end());
  return s;
}

// Two sets over a union of `u` hashes with `i` in common.
std::pair<ShingleSet, ShingleSet> pair_with(oracle::Rng& rng, size_t u, size_t i) {
  std::vector<uint64_t> shared(i);
  for (auto& h : shared) h = rng();
  size_t a_own = (u - i) / 2;
  return {random_set(rng, shared, a_own), random_set(rng, shared, u - i - a_own)};
}

void criterion5() {
  Timer t;
  oracle::Rng rng(505);
  double abs_err = 0;
  for (int k = 0; k < 1000; ++k) {
    size_t u = 50 + rng() % 400;
    size_t i = rng() % (u + 1);
    auto [a, b] = pair_with(rng, u, i);
    double est = estimate_jaccard(minhash(a, 128, k + 1), minhash(b, 128, k + 1));
    abs_err += std::abs(est - exact_jaccard(a, b));
  }
  double mae = abs_err / 1000;
  bool ok = mae <= 1.2 / std::sqrt(128.0);
  std::string detail = fmt("MAE %.4f (limit %.4f)", mae, 1.2 / std::sqrt(128.0));
  for (double j : {0.3, 0.5, 0.7, 0.9}) {
    const int trials = 300;
    std::vector<double> est;
    double exact = 0;
    for (int k = 0; k < trials; ++k) {
      auto [a, b] = pair_with(rng, 200, static_cast<size_t>(std::lround(j * 200)));
      exact = exact_jaccard(a, b);
      est.push_back(estimate_jaccard(minhash(a, 128, 9000 + k), minhash(b, 128, 9000 + k)));
    }
    double mean = std::accumulate(est.begin(), est.end(), 0.0) / trials;
    double var = 0;
    for (double e : est) var += (e - mean) * (e - mean);
    double se = std::sqrt(var / (trials - 1)) / std::sqrt(static_cast<double>(trials));
    bool within = std::abs(mean - exact) <= 3 * se;
    ok = ok && within;
    detail += fmt("; J=%.1f mean %.4f (%.1f SE)", exact, mean, std::abs(mean - exact) / se);
  }
  report(5, ok, "MinHash calibration", detail, t.secs());
}

void criterion6() {
  Timer t;
  BandChoice bc = choose_bands(128, 0.70);
  oracle::Rng rng(606);
  int hits = 0, total = 0;
  double expected = 0, variance = 0;
  for (int run = 0; run < 100; ++run) {
    std::vector<std::pair<ShingleSet, ShingleSet>> pairs;
    for (int p = 0; p < 40; ++p) {
      double j = 0.85 + 0.15 * std::uniform_real_distribution<double>(0, 1)(rng);
      pairs.push_back(pair_with(rng, 300, static_cast<size_t>(std::ceil(j * 300))));
    }
    LshIndex idx(bc);
    for (auto& [a, b] : pairs) {
      idx.insert(minhash(a, 128, run + 1));
      idx.insert(minhash(b, 128, run + 1));
    }
    auto cands = idx.candidate_pairs();
    for (size_t p = 0; p < pairs.size(); ++p) {
      double s = exact_jaccard(pairs[p].first, pairs[p].second);
      double prob = collision_probability(s, bc);
      expected += prob;
      variance += prob * (1 - prob);
      hits += cands.count({2 * p, 2 * p + 1});
      ++total;
    }
  }
  double recall = static_cast<double>(hits) / total;
  bool consistent = std::abs(hits - expected) <= 4 * std::sqrt(variance);

  // Same check for pairs sitting exactly at J = 0.85.
  int edge_hits = 0;
  const int edge_trials = 2000;
  double edge_j = 0;
  for (int k = 0; k < edge_trials; ++k) {
    auto [a, b] = pair_with(rng, 300, 255);
    edge_j = exact_jaccard(a, b);
    LshIndex idx(bc);
    idx.insert(minhash(a, 128, 20000 + k));
    idx.insert(minhash(b, 128, 20000 + k));
    edge_hits += !idx.candidate_pairs().empty();
  }
  double edge_p = collision_probability(edge_j, bc);
  double edge_rate = static_cast<double>(edge_hits) / edge_trials;
  bool edge_consistent = std::abs(edge_rate - edge_p) <= 4 * std::sqrt(edge_p * (1 - edge_p) / edge_trials);

  report(6, recall >= 0.99 && consistent && edge_consistent, "LSH recall at T=0.70",
         fmt("(b,r)=(%u,%u); recall %.4f over %d pairs with J in [0.85,1] x 100 runs (formula %.4f); "
             "at J=%.2f observed %.4f vs formula %.4f",
             bc.bands, bc.rows, recall, total / 100, expected / total, edge_j, edge_rate, edge_p),
         t.secs());
}

void criterion7() {
  Timer t;
  oracle::Rng rng(707);
  std::vector<std::string> vocab;
  for (int w = 0; w < 500; ++w) vocab.push_back("w" + std::to_string(w));
  auto text = [&](size_t n) {
    std::vector<std::string> words;
    for (size_t i = 0; i < n; ++i) words.push_back(vocab[rng() % vocab.size()]);
    return words;
  };
  auto join = [](const std::vector<std::string>& w) {
    std::string s;
    for (const auto& x : w) s += x + " ";
    return s;
  };

  std::vector<DedupDesign> designs;
  std::map<std::string, std::string> texts;
  for (int f = 0; f < 30; ++f) {
    auto base = text(150);
    int members = 1 + rng() % 4;
    for (int m = 0; m < members; ++m) {
      auto w = base;
      for (int e = 0; e < (m ? 2 : 0); ++e) w[rng() % w.size()] = vocab[rng() % vocab.size()];
      uint32_t ord = rng() % 4;
      std::string id = "S" + std::to_string(ord) + "/f" + std::to_string(f) + "_" + std::to_string(m);
      designs.push_back({id, {"S" + std::to_string(ord), ord}});
      texts[id] = join(w);
    }
  }
  auto duplicate_pairs = [&](const std::vector<DedupDesign>& ds) {
    LshIndex idx(choose_bands(128, 0.70));
    std::vector<MinHashSignature> sigs;
    std::map<std::string, ShingleSet> sets;
    for (const auto& d : ds) {
      sets[d.id] = shingle(texts[d.id], 5, d.id);
      sigs.push_back(minhash(sets[d.id], 128, 1));
      idx.insert(sigs.back());
    }
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& [a, b] : candidate_pairs(idx, sigs))
      if (exact_jaccard(sets[a], sets[b]) >= 0.70) out.insert({a, b});
    return out;
  };

  auto pairs = duplicate_pairs(designs);
  std::set<std::string> kept = temporal_dedup(designs, pairs);

  // Components by flood fill over the pair graph.
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [a, b] : pairs) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::map<std::string, ShuttleId> shuttle_of;
  for (const auto& d : designs) shuttle_of[d.id] = d.shuttle;
  std::set<std::string> seen;
  int components = 0, spanning = 0, wrong = 0;
  for (const auto& d : designs) {
    if (seen.count(d.id) || !adj.count(d.id)) continue;
    std::vector<std::string> comp, stack{d.id};
    seen.insert(d.id);
    while (!stack.empty()) {
      std::string x = stack.back();
      stack.pop_back();
      comp.push_back(x);
      for (const auto& y : adj[x])
        if (seen.insert(y).second) stack.push_back(y);
    }
    ++components;
    std::set<uint32_t> ords;
    for (const auto& x : comp) ords.insert(shuttle_of[x].ordinal);
    spanning += ords.size() > 1;
    auto oldest = *std::min_element(comp.begin(), comp.end(), [&](const auto& a, const auto& b) {
      return std::pair(shuttle_of[a].ordinal, a) < std::pair(shuttle_of[b].ordinal, b);
    });
    int survivors = 0;
    for (const auto& x : comp) survivors += kept.count(x);
    if (survivors != 1 || !kept.count(oldest)) ++wrong;
  }

  std::vector<DedupDesign> rest;
  for (const auto& d : designs)
    if (kept.count(d.id)) rest.push_back(d);
  bool idempotent = temporal_dedup(rest, duplicate_pairs(rest)) == kept;

  int order_mismatch = 0;
  for (int p = 0; p < 20; ++p) {
    auto shuffled = designs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (temporal_dedup(shuffled, duplicate_pairs(shuffled)) != kept) ++order_mismatch;
  }
  report(7, wrong == 0 && spanning > 0 && idempotent && order_mismatch == 0, "temporal keep-oldest policy",
         fmt("%zu designs, %d components (%d span shuttles), %d wrong survivors, idempotent=%s, "
             "%d/20 shuffles differ",
             designs.size(), components, spanning, wrong, idempotent ? "yes" : "no", order_mismatch),
         t.secs());
}

void criterion8() {
  Timer t;
  oracle::Rng rng(808);
  int designs = 0, mismatched = 0;
  size_t total = 0;
  for (int d = 0; d < 50; ++d) {
    unsigned n = 1 + rng() % 8;
    std::string src = oracle::random_design(rng, n, "d" + std::to_string(d));
    MergedDesign md = preprocess_text(src, "d" + std::to_string(d) + ".v", {});
    md.project_id = "p" + std::to_string(d);
    md.shuttle = {"FX", 0};
    auto tasks = build_tasks(md, parse(md.source));
    std::set<std::string> ids;
    for (const auto& task : tasks) ids.insert(task.task_id);
    if (tasks.size() != n || ids.size() != n) ++mismatched;
    total += tasks.size();
    ++designs;
  }
  report(8, mismatched == 0 && designs == 50, "one task per module",
         fmt("%d designs, %zu tasks, %d with |tasks| != |modules|", designs, total, mismatched), t.secs());
}

void criterion9() {
  Timer t;
  using V = Verdict;
  double equal = partition_coverage({V::Equivalent, V::Equivalent, V::NotEquivalent}, {1, 1, 1});
  double weighted = partition_coverage({V::Equivalent, V::NotEquivalent, V::Unknown}, {5, 3, 2});
  report(9, std::abs(equal - 66.67) <= 0.01 && weighted == 50.0, "partition coverage arithmetic",
         fmt("equal weights %.4f, weights {5,3,2} %.4f", equal, weighted), t.secs());
}

void criterion10() {
  Timer t;
  double hand = min_k({"t", "m", {"a", "b", "c", "d"}, {-5, -3, -1, -1}}, 50);
  oracle::Rng rng(1010);
  std::uniform_real_distribution<double> lp(-12.0, 0.0);
  int violations = 0;
  std::vector<double> ks;
  for (int k = 1; k <= 100; ++k) ks.push_back(k);
  for (int r = 0; r < 1000; ++r) {
    LogprobRecord rec{"t", "m", {}, {}};
    size_t n = 1 + rng() % 200;
    for (size_t i = 0; i < n; ++i) {
      rec.tokens.push_back("x");
      rec.logprobs.push_back(lp(rng));
    }
    double prev = -INFINITY;
    for (double k : ks) {
      double v = min_k(rec, k);
      if (v < prev - 1e-12) ++violations;
      prev = v;
    }
  }
  // 6 tokens over {10,20,30}: bottom 1, 2 and 2 tokens.
  LogprobRecord six{"t", "m", {"a", "b", "c", "d", "e", "f"}, {-1, -2, -3, -4, -5, -6}};
  MinKCurve curve = min_k_curve({six}, {10, 20, 30});
  double e1 = std::exp(-6.0), e2 = std::exp(-5.5);
  double auc = (10 * (e1 + e2) / 2 + 10 * (e2 + e2) / 2) / 20;
  double curve_err = std::max({std::abs(curve.mean_exp[0] - e1), std::abs(curve.mean_exp[1] - e2),
                               std::abs(curve.mean_exp[2] - e2), std::abs(curve.auc - auc)});
  report(10, hand == -4.0 && violations == 0 && curve_err <= 1e-9, "Min-K metric",
         fmt("K=50 example %.6f, %d monotonicity violations over 1000 records, curve/AUC error %.2e", hand,
             violations, curve_err),
         t.secs());
}

void criterion11() {
  Timer t;
  int modules = 0, mismatched = 0;
  std::string which;
  for (const auto& f : fixture_modules()) {
    std::string top = f.stem().string();
    ast::SourceUnit u = parse(read_text(f));
    Netlist n = elaborate(u, top);
    oracle::Rng rng(std::hash<std::string>{}(top));
    auto stim = random_stimulus(n, rng, 1000);
    if (simulate(n, stim) != interpret(u, top, stim)) {
      ++mismatched;
      which += " " + top;
    }
    ++modules;
  }
  report(11, modules >= 30 && mismatched == 0, "elaboration vs AST interpreter",
         fmt("%d modules x 1000 cycles, %d disagree%s", modules, mismatched, which.c_str()), t.secs());
}

void criterion12(const fs::path& first) {
  Timer t;
  fs::path second = first.parent_path() / "second";
  corpus_tasks(second);
  int differ = 0;
  std::string which;
  for (const char* name : {"tasks.jsonl", "dedup_report.jsonl", "release.json"}) {
    if (read_text(first / name) != read_text(second / name)) {
      ++differ;
      which += std::string(" ") + name;
    }
  }
  report(12, differ == 0, "deterministic build",
         fmt("tasks.jsonl, dedup_report.jsonl, release.json: %d differ%s", differ, which.c_str()), t.secs());
}

}  // namespace

int main() {
  fs::path scratch = fs::temp_directory_path() / ("modbench_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  criterion1();
  criterion2();
  std::vector<Task> module_tasks = fixture_tasks();
  std::vector<Task> built = corpus_tasks(scratch / "first");
  criterion3(module_tasks, built);
  std::vector<Task> goldens = module_tasks;
  goldens.insert(goldens.end(), built.begin(), built.end());
  criterion4(goldens);
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  criterion12(scratch / "first");

  fs::remove_all(scratch);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
