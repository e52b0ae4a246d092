#include <doctest.h>

#include <random>

#include "modbench/sat.hpp"
#include "oracles.hpp"

using namespace modbench;

TEST_SUITE("sat") {
  TEST_CASE("x and not x") {
    sat::Cnf f{1, {{1}, {-1}}};
    CHECK(sat::sat_solve(f).verdict == sat::Verdict::Unsat);
  }

  TEST_CASE("(x or y) and not x") {
    sat::Cnf f{2, {{1, 2}, {-1}}};
    auto r = sat::sat_solve(f);
    REQUIRE(r.verdict == sat::Verdict::Sat);
    CHECK_FALSE(r.model[1]);
    CHECK(r.model[2]);
  }

  TEST_CASE("random 3-CNF over 12 variables against enumeration") {
    for (uint64_t seed = 1; seed <= 200; ++seed) {
      std::mt19937_64 rng(seed);
      sat::Cnf f;
      f.num_vars = 12;
      size_t m = 40 + rng() % 25;
      for (size_t c = 0; c < m; ++c) {
        std::vector<int> cl;
        for (int k = 0; k < 3; ++k) {
          int v = 1 + static_cast<int>(rng() % 12);
          cl.push_back((rng() & 1) ? v : -v);
        }
        f.clauses.push_back(cl);
      }
      auto r = sat::sat_solve(f);
      bool expect = oracle::brute_force_sat(12, f.clauses);
      REQUIRE(r.verdict != sat::Verdict::Unknown);
      CHECK((r.verdict == sat::Verdict::Sat) == expect);
      if (r.verdict == sat::Verdict::Sat) {
        for (const auto& cl : f.clauses) {
          bool ok = false;
          for (int l : cl) ok |= r.model[std::abs(l)] == (l > 0);
          CHECK(ok);
        }
      }
    }
  }

  TEST_CASE("assumptions restrict without persisting") {
    sat::Solver s;
    int x = s.new_var(), y = s.new_var();
    s.add_clause({x, y});
    CHECK(s.solve({-x, -y}) == sat::Verdict::Unsat);
    CHECK(s.solve({-x}) == sat::Verdict::Sat);
    CHECK(s.model_value(y));
  }

  TEST_CASE("conflict budget gives unknown") {
    // pigeonhole 8 into 7
    sat::Cnf f;
    const int p = 8, h = 7;
    auto var = [&](int i, int j) { return i * h + j + 1; };
    f.num_vars = p * h;
    for (int i = 0; i < p; ++i) {
      std::vector<int> c;
      for (int j = 0; j < h; ++j) c.push_back(var(i, j));
      f.clauses.push_back(c);
    }
    for (int j = 0; j < h; ++j)
      for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) f.clauses.push_back({-var(a, j), -var(b, j)});
    CHECK(sat::sat_solve(f, {}, 50).verdict == sat::Verdict::Unknown);
  }
}
