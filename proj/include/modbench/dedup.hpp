#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "modbench/corpus.hpp"
#include "modbench/error.hpp"

namespace modbench {

class DedupError : public Error {
 public:
  using Error::Error;
};

struct ShingleSet {
  std::string design_id;
  std::vector<uint64_t> hashes;  // sorted, unique
};

// 64-bit hash of a byte string (multiply-shift over 8-byte words, then a
// final avalanche).
uint64_t hash_bytes(std::string_view bytes);

// Hashes of every k-word window after whitespace tokenization. Texts with
// fewer than k words give one hash of the whole token sequence; texts with
// no words give an empty set.
ShingleSet shingle(std::string_view source, unsigned k = 5, std::string design_id = {});

double exact_jaccard(const ShingleSet& a, const ShingleSet& b);

struct MinHashSignature {
  std::string design_id;
  std::vector<uint64_t> values;
  uint64_t seed = 0;
};

// Permutation i maps x to (a_i * x + b_i) mod (2^61 - 1), with (a_i, b_i)
// drawn from a generator seeded with `seed`. Throws DedupError on an empty
// set or num_perms < 16.
MinHashSignature minhash(const ShingleSet& s, unsigned num_perms = 128, uint64_t seed = 1);

// Fraction of agreeing positions. Throws DedupError on mismatched length or
// seed.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

struct BandChoice {
  unsigned bands = 0;
  unsigned rows = 0;
};

// Probability that a pair with similarity s shares at least one band.
double collision_probability(double s, const BandChoice& c);

// (b, r) with b*r <= num_perms minimizing false-positive plus false-negative
// area of the collision curve around `threshold`.
BandChoice choose_bands(unsigned num_perms, double threshold = 0.70);

class LshIndex {
 public:
  explicit LshIndex(BandChoice c) : choice_(c), buckets_(c.bands) {}

  const BandChoice& choice() const { return choice_; }

  // Returns the position of the signature in insertion order.
  size_t insert(const MinHashSignature& sig);

  // Unordered pairs of inserted positions sharing a band bucket, (i < j).
  std::set<std::pair<size_t, size_t>> candidate_pairs() const;

 private:
  BandChoice choice_;
  std::vector<std::unordered_map<uint64_t, std::vector<size_t>>> buckets_;
  size_t size_ = 0;
};

// Pairs of design ids that collide in some band, ordered (smaller id first).
std::set<std::pair<std::string, std::string>> candidate_pairs(const LshIndex& index,
                                                              const std::vector<MinHashSignature>& signatures);

struct DedupDesign {
  std::string id;
  ShuttleId shuttle;
};

struct DuplicateComponent {
  std::string survivor;
  std::vector<std::string> members;  // sorted, survivor included
};

// Connected components of the duplicate relation that have at least two
// members, ordered by survivor. Survivor: lowest shuttle ordinal, then
// smallest id.
std::vector<DuplicateComponent> duplicate_components(const std::vector<DedupDesign>& designs,
                                                     const std::set<std::pair<std::string, std::string>>& pairs);

// Every design except the non-surviving members of duplicate components.
std::set<std::string> temporal_dedup(const std::vector<DedupDesign>& designs,
                                     const std::set<std::pair<std::string, std::string>>& pairs);

}  // namespace modbench
