#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "modbench/dedup.hpp"
#include "modbench/preprocess.hpp"
#include "modbench/corpus.hpp"

using namespace modbench;

namespace {

ShingleSet of(std::initializer_list<uint64_t> h) { return {"", std::vector<uint64_t>(h)}; }

ShingleSet random_set(std::mt19937_64& rng, size_t n) {
  ShingleSet s;
  for (size_t i = 0; i < n; ++i) s.hashes.push_back(rng());
  std::sort(s.hashes.begin(), s.hashes.end());
  return s;
}

}  // namespace

TEST_SUITE("dedup") {
  TEST_CASE("shingles") {
    auto s = shingle("a b c d e f", 5);
    CHECK(s.hashes.size() == 2);
    std::vector<uint64_t> want = {hash_bytes("a b c d e"), hash_bytes("b c d e f")};
    std::sort(want.begin(), want.end());
    CHECK(s.hashes == want);
    CHECK(shingle("a  b\tc\nd e f", 5).hashes == s.hashes);
    CHECK(shingle("x y", 5).hashes.size() == 1);
    CHECK(shingle("", 5).hashes.empty());
    CHECK(shingle("module m; endmodule", 5).hashes == shingle("module m; endmodule", 5).hashes);
  }

  TEST_CASE("exact Jaccard") {
    auto s = of({1, 2, 3});
    CHECK(exact_jaccard(s, s) == 1.0);
    CHECK(exact_jaccard(of({1, 2, 3}), of({2, 3, 4})) == 0.5);
    // six lines, three shared: 3 / 9 distinct shingles of one word per line
    auto a = shingle("l1\nl2\nl3\nl4\nl5\nl6", 1), b = shingle("l1\nl2\nl3\nm4\nm5\nm6", 1);
    CHECK(exact_jaccard(a, b) == doctest::Approx(3.0 / 9.0));
  }

  TEST_CASE("signatures") {
    std::mt19937_64 rng(5);
    auto s = random_set(rng, 100);
    CHECK(minhash(s, 128, 1).values == minhash(s, 128, 1).values);
    CHECK(estimate_jaccard(minhash(s), minhash(s)) == 1.0);
    CHECK(estimate_jaccard(minhash(random_set(rng, 100)), minhash(random_set(rng, 100))) <= 0.1);
    CHECK_THROWS_AS(minhash(of({})), DedupError);
    CHECK_THROWS_AS(minhash(s, 8), DedupError);
    CHECK_THROWS_AS(estimate_jaccard(minhash(s, 128, 1), minhash(s, 128, 2)), DedupError);
    CHECK_THROWS_AS(estimate_jaccard(minhash(s, 64), minhash(s, 128)), DedupError);
  }

  TEST_CASE("estimate at J=0.5 within 0.15 in at least 95% of trials") {
    std::mt19937_64 rng(11);
    int good = 0;
    for (int t = 0; t < 1000; ++t) {
      auto shared = random_set(rng, 100);
      ShingleSet a = shared, b = shared;
      for (int i = 0; i < 50; ++i) {
        a.hashes.push_back(rng());
        b.hashes.push_back(rng());
      }
      std::sort(a.hashes.begin(), a.hashes.end());
      std::sort(b.hashes.begin(), b.hashes.end());
      REQUIRE(exact_jaccard(a, b) == 0.5);
      good += std::abs(estimate_jaccard(minhash(a, 128, t + 1), minhash(b, 128, t + 1)) - 0.5) <= 0.15;
    }
    CHECK(good >= 950);
  }

  TEST_CASE("band choice") {
    BandChoice c = choose_bands(128, 0.70);
    CHECK(c.bands * c.rows <= 128);
    // the S-curve crosses one half close to the threshold
    double lo = 0, hi = 1;
    for (int i = 0; i < 60; ++i) {
      double m = (lo + hi) / 2;
      (collision_probability(m, c) < 0.5 ? lo : hi) = m;
    }
    CHECK(std::abs(lo - 0.70) <= 0.05);
    CHECK(choose_bands(128, 0.01).rows == 1);
    CHECK(collision_probability(1.0, c) == 1.0);
    CHECK(collision_probability(0.0, c) == 0.0);
  }

  TEST_CASE("LSH candidates") {
    std::mt19937_64 rng(21);
    auto a = random_set(rng, 200);
    LshIndex idx(choose_bands(128, 0.70));
    std::vector<MinHashSignature> sigs = {minhash(a), minhash(a), minhash(random_set(rng, 200))};
    sigs[0].design_id = "x";
    sigs[1].design_id = "y";
    sigs[2].design_id = "z";
    for (auto& s : sigs) idx.insert(s);
    auto pairs = candidate_pairs(idx, sigs);
    CHECK(pairs.count({"x", "y"}) == 1);
    CHECK(pairs.count({"x", "z"}) == 0);
  }

  TEST_CASE("J=0.9 pairs retrieved at least as often as the banding formula") {
    BandChoice c = choose_bands(128, 0.70);
    std::mt19937_64 rng(31);
    int hits = 0;
    const int runs = 400;
    for (int r = 0; r < runs; ++r) {
      auto shared = random_set(rng, 180);
      ShingleSet a = shared, b = shared;
      for (int i = 0; i < 10; ++i) {
        a.hashes.push_back(rng());
        b.hashes.push_back(rng());
      }
      std::sort(a.hashes.begin(), a.hashes.end());
      std::sort(b.hashes.begin(), b.hashes.end());
      LshIndex idx(c);
      idx.insert(minhash(a, 128, r + 1));
      idx.insert(minhash(b, 128, r + 1));
      hits += !idx.candidate_pairs().empty();
    }
    CHECK(static_cast<double>(hits) / runs >= 0.99);
  }

  TEST_CASE("keep the oldest") {
    std::vector<DedupDesign> ds = {{"TT08/p", {"TT08", 2}}, {"TT06/p", {"TT06", 0}}, {"TT07/q", {"TT07", 1}}};
    auto kept = temporal_dedup(ds, {{"TT06/p", "TT08/p"}});
    CHECK(kept == std::set<std::string>{"TT06/p", "TT07/q"});
  }

  TEST_CASE("chain across three shuttles leaves one survivor") {
    std::vector<DedupDesign> ds = {{"A", {"S2", 2}}, {"B", {"S0", 0}}, {"C", {"S1", 1}}};
    auto comps = duplicate_components(ds, {{"A", "B"}, {"B", "C"}});
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].survivor == "B");
    CHECK(comps[0].members == std::vector<std::string>{"A", "B", "C"});
    CHECK(temporal_dedup(ds, {{"A", "B"}, {"B", "C"}}) == std::set<std::string>{"B"});
  }

  TEST_CASE("fixture near-duplicates exceed the threshold") {
    auto rec = [](const char* sh, uint32_t ord, const char* p) {
      return preprocess_project(scan_project(kFixtures / "corpus" / sh / p, {sh, ord}));
    };
    auto a = rec("TT06", 0, "tt_um_pulse_counter"), b = rec("TT07", 1, "tt_um_pulse_counter_v2");
    auto c = rec("TT06", 0, "tt_um_tiny_alu");
    CHECK(exact_jaccard(shingle(a.source), shingle(b.source)) > 0.70);
    CHECK(exact_jaccard(shingle(a.source), shingle(c.source)) < 0.70);
  }
}
