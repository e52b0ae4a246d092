#include "modbench/contamination.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace modbench {

void validate_record(const LogprobRecord& rec) {
  if (rec.tokens.size() != rec.logprobs.size())
    throw ContaminationError("record '" + rec.task_id + "': tokens and logprobs differ in length");
  for (double v : rec.logprobs)
    if (!std::isfinite(v) || v > 0.0) throw ContaminationError("record '" + rec.task_id + "': bad log-probability");
}

double min_k(const LogprobRecord& rec, double k_percent) {
  if (rec.logprobs.empty()) throw ContaminationError("record '" + rec.task_id + "' has no tokens");
  if (!(k_percent > 0.0 && k_percent <= 100.0)) throw ContaminationError("K must lie in (0, 100]");
  std::vector<double> v = rec.logprobs;
  std::sort(v.begin(), v.end());
  double want = std::ceil(k_percent / 100.0 * static_cast<double>(v.size()) - 1e-9);
  size_t n = std::clamp<size_t>(static_cast<size_t>(want), 1, v.size());
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += v[i];
  return sum / static_cast<double>(n);
}

const std::vector<double>& default_k_grid() {
  static const std::vector<double> grid = {10, 15, 20, 25, 30};
  return grid;
}

MinKCurve min_k_curve(const std::vector<LogprobRecord>& records, const std::vector<double>& k_grid) {
  if (records.empty()) throw ContaminationError("no records");
  if (k_grid.empty()) throw ContaminationError("empty K grid");
  for (size_t i = 1; i < k_grid.size(); ++i)
    if (!(k_grid[i] > k_grid[i - 1])) throw ContaminationError("K grid must be strictly ascending");
  MinKCurve c;
  c.k_grid = k_grid;
  for (double k : k_grid) {
    double sum = 0.0;
    for (const auto& r : records) sum += std::exp(min_k(r, k));
    c.mean_exp.push_back(sum / static_cast<double>(records.size()));
  }
  if (k_grid.size() == 1) {
    c.auc = c.mean_exp[0];
  } else {
    double area = 0.0;
    for (size_t i = 1; i < k_grid.size(); ++i)
      area += (k_grid[i] - k_grid[i - 1]) * (c.mean_exp[i] + c.mean_exp[i - 1]) / 2.0;
    c.auc = area / (k_grid.back() - k_grid.front());
  }
  return c;
}

uint64_t word_count(const std::string& text) {
  uint64_t n = 0;
  bool in_word = false;
  for (char ch : text) {
    bool space = std::isspace(static_cast<unsigned char>(ch));
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

std::vector<LengthItem> filter_by_length(const std::vector<LengthItem>& items, uint64_t max_tokens) {
  std::vector<LengthItem> out;
  for (const auto& it : items)
    if (it.tokens <= max_tokens) out.push_back(it);
  return out;
}

}  // namespace modbench
