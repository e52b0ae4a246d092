#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "modbench/equiv.hpp"
#include "modbench/taskgen.hpp"

namespace modbench {

enum class EqvStatus { Equivalent, NotEquivalent, Unknown, Error };

const char* eqv_name(EqvStatus s);

struct PartitionResult {
  std::string output;  // output bit name
  uint64_t weight = 1;
  Verdict verdict = Verdict::Unknown;
};

struct EvalResult {
  std::string task_id;
  bool stx = false;
  std::string stx_reason;
  EqvStatus eqv = EqvStatus::Error;
  std::string eqv_reason;
  std::string counterexample;  // replayed trace table, set iff not_equivalent
  std::vector<PartitionResult> partitions;
  double coverage = 0.0;
  double coverage_unweighted = 0.0;
  std::string method;
  uint64_t queries = 0;
  sat::Stats stats;
  double runtime_ms = 0.0;
  std::vector<std::string> golden_async_resets;
};

// Strips a surrounding markdown code fence, if any.
std::string extract_candidate(std::string_view raw);

// Places the candidate in the task context, elaborates the target module on
// both sides and compares them.
EvalResult evaluate_candidate(const Task& task, std::string_view candidate_source, const EquivOptions& opt = {});

struct SelfCheck {
  bool pass = false;
  std::string reason;
  std::vector<std::string> async_resets;  // folded into synchronous resets
};

// Evaluates the golden module against itself.
SelfCheck self_verify(const Task& task, const EquivOptions& opt = {});

}  // namespace modbench
