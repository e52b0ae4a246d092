#include "modbench/evaluate.hpp"

#include <chrono>

#include "modbench/elaborate.hpp"
#include "modbench/parser.hpp"

namespace modbench {

namespace {

struct Built {
  Netlist net;
  std::string error;
};

Built build(const std::string& text, const std::string& top) {
  Built b;
  try {
    ast::SourceUnit unit = parse(text);
    if (!unit.find(top)) {
      b.error = "module '" + top + "' not found";
      return b;
    }
    b.net = elaborate(unit, top);
  } catch (const ParseError& e) {
    b.error = std::string("parse: ") + e.what();
  } catch (const ElabError& e) {
    b.error = std::string("elaboration: ") + e.what();
  } catch (const Error& e) {
    b.error = e.what();
  }
  return b;
}

}  // namespace

const char* eqv_name(EqvStatus s) {
  switch (s) {
    case EqvStatus::Equivalent: return "equivalent";
    case EqvStatus::NotEquivalent: return "not_equivalent";
    case EqvStatus::Unknown: return "unknown";
    case EqvStatus::Error: return "error";
  }
  return "?";
}

std::string extract_candidate(std::string_view raw) {
  size_t open = raw.find("```");
  if (open == std::string_view::npos) return std::string(raw);
  size_t body = raw.find('\n', open);
  if (body == std::string_view::npos) return std::string(raw);
  size_t close = raw.find("```", body);
  if (close == std::string_view::npos) close = raw.size();
  return std::string(raw.substr(body + 1, close - body - 1));
}

EvalResult evaluate_candidate(const Task& task, std::string_view candidate_source, const EquivOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  EvalResult r;
  r.task_id = task.task_id;
  auto finish = [&]() -> EvalResult {
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };

  Built cand = build(reconstruct(task, extract_candidate(candidate_source)), task.target_module);
  if (!cand.error.empty()) {
    r.stx_reason = cand.error;
    r.eqv_reason = "syntax check failed";
    return finish();
  }
  Built gold = build(reconstruct(task, task.golden_source), task.target_module);
  if (!gold.error.empty()) {
    r.stx = true;
    r.eqv_reason = "golden: " + gold.error;
    return finish();
  }
  r.golden_async_resets = gold.net.async_reset_registers;
  Miter m;
  try {
    m = build_miter(gold.net, cand.net);
  } catch (const InterfaceError& e) {
    r.stx_reason = e.what();
    r.eqv_reason = "syntax check failed";
    return finish();
  }
  r.stx = true;

  CheckResult c;
  try {
    c = check_equivalence(m, opt);
  } catch (const Error& e) {
    r.eqv_reason = e.what();
    return finish();
  }
  r.method = c.method;
  r.queries = c.queries;
  r.stats = c.stats;

  std::vector<uint64_t> weights = partition_weights(gold.net);
  for (size_t i = 0; i < c.bits.size(); ++i) r.partitions.push_back({m.out_names[i], weights[i], c.bits[i]});
  size_t eq_count = 0;
  for (Verdict v : c.bits) eq_count += v == Verdict::Equivalent;

  switch (c.verdict) {
    case Verdict::Equivalent: r.eqv = EqvStatus::Equivalent; break;
    case Verdict::Unknown:
      r.eqv = EqvStatus::Unknown;
      r.eqv_reason = c.note;
      break;
    case Verdict::NotEquivalent: {
      Replay rp;
      try {
        rp = replay(gold.net, cand.net, *c.stimulus);
      } catch (const Error& e) {
        r.eqv_reason = std::string("counterexample replay failed: ") + e.what();
        return finish();
      }
      if (!rp.mismatch) {
        r.eqv_reason = "counterexample did not reproduce in simulation";
        return finish();
      }
      r.eqv = EqvStatus::NotEquivalent;
      r.counterexample = format_counterexample(rp);
      break;
    }
  }
  if (!c.bits.empty()) {
    r.coverage = partition_coverage(c.bits, weights);
    r.coverage_unweighted = 100.0 * static_cast<double>(eq_count) / static_cast<double>(c.bits.size());
  } else if (r.eqv == EqvStatus::Equivalent) {
    r.coverage = r.coverage_unweighted = 100.0;
  }
  return finish();
}

SelfCheck self_verify(const Task& task, const EquivOptions& opt) {
  EvalResult r = evaluate_candidate(task, task.golden_source, opt);
  if (!r.stx) return {false, r.stx_reason, {}};
  if (r.eqv != EqvStatus::Equivalent)
    return {false, std::string(eqv_name(r.eqv)) + (r.eqv_reason.empty() ? "" : ": " + r.eqv_reason), {}};
  return {true, "", r.golden_async_resets};
}

}  // namespace modbench
