#include <doctest.h>

#include <cmath>

#include "modbench/contamination.hpp"

using namespace modbench;

namespace {

LogprobRecord rec(std::vector<double> lp) {
  LogprobRecord r{"t", "m", {}, std::move(lp)};
  r.tokens.assign(r.logprobs.size(), "tok");
  return r;
}

}  // namespace

TEST_SUITE("contamination") {
  TEST_CASE("min-k examples") {
    for (double k : {1.0, 20.0, 50.0, 100.0}) CHECK(min_k(rec({-2, -2, -2, -2, -2}), k) == -2.0);
    CHECK(min_k(rec({-5, -3, -1, -1}), 50) == -4.0);
    CHECK(min_k(rec({-1, -5, -1, -3}), 50) == -4.0);
    CHECK(min_k(rec({-5, -3, -1, -1}), 100) == -2.5);
    CHECK(min_k(rec({-5, -3, -1, -1}), 10) == -5.0);
  }

  TEST_CASE("record validation") {
    CHECK_THROWS_AS(validate_record({"t", "m", {"a"}, {-1, -2}}), ContaminationError);
    CHECK_THROWS_AS(validate_record(rec({0.5})), ContaminationError);
    CHECK_THROWS_AS(validate_record(rec({NAN})), ContaminationError);
    CHECK_NOTHROW(validate_record(rec({0.0, -3.0})));
  }

  TEST_CASE("constant curve") {
    MinKCurve c = min_k_curve({rec({-0.5, -0.5, -0.5})}, default_k_grid());
    for (double v : c.mean_exp) CHECK(v == doctest::Approx(std::exp(-0.5)));
    CHECK(c.auc == doctest::Approx(std::exp(-0.5)));
    CHECK(min_k_curve({rec({-1})}, {20}).auc == doctest::Approx(std::exp(-1.0)));
  }

  TEST_CASE("two records average pointwise") {
    auto a = rec({-1, -2, -3, -4}), b = rec({-0.5, -6, -0.1, -0.2, -9});
    std::vector<double> grid = {10, 25, 50};
    MinKCurve ca = min_k_curve({a}, grid), cb = min_k_curve({b}, grid), both = min_k_curve({a, b}, grid);
    for (size_t i = 0; i < grid.size(); ++i)
      CHECK(both.mean_exp[i] == doctest::Approx((ca.mean_exp[i] + cb.mean_exp[i]) / 2));
  }

  TEST_CASE("six-token record over 10/20/30") {
    MinKCurve c = min_k_curve({rec({-1, -2, -3, -4, -5, -6})}, {10, 20, 30});
    double y10 = std::exp(-6.0), y20 = std::exp(-5.5), y30 = std::exp(-5.5);
    CHECK(c.auc == doctest::Approx((5 * (y10 + y20) + 5 * (y20 + y30)) / 20).epsilon(1e-12));
  }

  TEST_CASE("curve errors") {
    CHECK_THROWS_AS(min_k_curve({}, {10}), ContaminationError);
    CHECK_THROWS_AS(min_k_curve({rec({-1})}, {20, 10}), ContaminationError);
    CHECK_THROWS_AS(min_k_curve({rec({-1})}, {}), ContaminationError);
  }

  TEST_CASE("length filter") {
    CHECK(filter_by_length({{"a", 50}}).size() == 1);
    CHECK(filter_by_length({{"a", 5000}}).empty());
    std::vector<LengthItem> items;
    for (int i = 0; i < 10; ++i) items.push_back({std::to_string(i), i % 3 == 0 && i ? 2001u : 100u + i});
    auto kept = filter_by_length(items);
    CHECK(kept.size() == 7);
    CHECK(kept[1].id == "1");
    CHECK(word_count("module  m;\n\tendmodule ") == 3);
  }
}
