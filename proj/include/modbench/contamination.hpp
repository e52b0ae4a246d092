#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modbench/error.hpp"

namespace modbench {

class ContaminationError : public Error {
 public:
  using Error::Error;
};

struct LogprobRecord {
  std::string task_id;
  std::string model_id;
  std::vector<std::string> tokens;
  std::vector<double> logprobs;
};

// Throws ContaminationError when lengths differ or a value is not finite
// or positive.
void validate_record(const LogprobRecord& rec);

// Mean of the ceil(K/100 * N) smallest log-probabilities.
double min_k(const LogprobRecord& rec, double k_percent);

const std::vector<double>& default_k_grid();

struct MinKCurve {
  std::vector<double> k_grid;
  std::vector<double> mean_exp;  // mean over records of exp(min_k), per K
  double auc = 0.0;              // trapezoid area divided by the grid span
};

MinKCurve min_k_curve(const std::vector<LogprobRecord>& records, const std::vector<double>& k_grid);

// Whitespace word count.
uint64_t word_count(const std::string& text);

struct LengthItem {
  std::string id;
  uint64_t tokens = 0;
};

// Items with at most `max_tokens` tokens, in input order.
std::vector<LengthItem> filter_by_length(const std::vector<LengthItem>& items, uint64_t max_tokens = 2000);

}  // namespace modbench
