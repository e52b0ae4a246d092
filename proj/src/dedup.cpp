#include "modbench/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <random>

namespace modbench {

namespace {

constexpr uint64_t kPrime = (uint64_t{1} << 61) - 1;
constexpr uint64_t kMulA = 0x9E3779B97F4A7C15ull;
constexpr uint64_t kMulB = 0xC2B2AE3D27D4EB4Full;

uint64_t avalanche(uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

uint64_t mod_prime(unsigned __int128 v) {
  uint64_t lo = static_cast<uint64_t>(v & kPrime);
  unsigned __int128 hi = v >> 61;
  while (hi != 0) {
    unsigned __int128 s = static_cast<unsigned __int128>(lo) + (hi & kPrime);
    hi >>= 61;
    lo = static_cast<uint64_t>(s & kPrime);
    hi += s >> 61;
  }
  return lo >= kPrime ? lo - kPrime : lo;
}

}  // namespace

uint64_t hash_bytes(std::string_view bytes) {
  uint64_t h = (bytes.size() + 1) * kMulA;
  size_t i = 0;
  for (; i + 8 <= bytes.size(); i += 8) {
    uint64_t w;
    std::memcpy(&w, bytes.data() + i, 8);
    h = (h ^ w) * kMulB;
    h ^= h >> 32;
  }
  if (i < bytes.size()) {
    uint64_t w = 0;
    std::memcpy(&w, bytes.data() + i, bytes.size() - i);
    h = (h ^ w) * kMulB;
    h ^= h >> 32;
  }
  return avalanche(h);
}

ShingleSet shingle(std::string_view source, unsigned k, std::string design_id) {
  if (k == 0) throw DedupError("shingle size must be at least 1");
  std::vector<std::string_view> words;
  size_t i = 0;
  while (i < source.size()) {
    while (i < source.size() && std::isspace(static_cast<unsigned char>(source[i]))) ++i;
    size_t s = i;
    while (i < source.size() && !std::isspace(static_cast<unsigned char>(source[i]))) ++i;
    if (i > s) words.push_back(source.substr(s, i - s));
  }
  ShingleSet out;
  out.design_id = std::move(design_id);
  auto window = [&](size_t from, size_t n) {
    std::string joined;
    for (size_t j = 0; j < n; ++j) {
      if (j) joined += ' ';
      joined.append(words[from + j]);
    }
    out.hashes.push_back(hash_bytes(joined));
  };
  if (words.empty()) return out;
  if (words.size() < k) {
    window(0, words.size());
  } else {
    for (size_t s = 0; s + k <= words.size(); ++s) window(s, k);
  }
  std::sort(out.hashes.begin(), out.hashes.end());
  out.hashes.erase(std::unique(out.hashes.begin(), out.hashes.end()), out.hashes.end());
  return out;
}

double exact_jaccard(const ShingleSet& a, const ShingleSet& b) {
  size_t i = 0, j = 0, inter = 0;
  while (i < a.hashes.size() && j < b.hashes.size()) {
    if (a.hashes[i] == b.hashes[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a.hashes[i] < b.hashes[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  size_t uni = a.hashes.size() + b.hashes.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

MinHashSignature minhash(const ShingleSet& s, unsigned num_perms, uint64_t seed) {
  if (num_perms < 16) throw DedupError("num_perms must be at least 16");
  if (s.hashes.empty()) throw DedupError("empty design '" + s.design_id + "'");
  std::mt19937_64 gen(seed);
  std::vector<uint64_t> a(num_perms), b(num_perms);
  for (unsigned p = 0; p < num_perms; ++p) {
    a[p] = gen() % (kPrime - 1) + 1;
    b[p] = gen() % kPrime;
  }
  MinHashSignature sig;
  sig.design_id = s.design_id;
  sig.seed = seed;
  sig.values.assign(num_perms, std::numeric_limits<uint64_t>::max());
  for (uint64_t h : s.hashes) {
    uint64_t x = mod_prime(h);
    for (unsigned p = 0; p < num_perms; ++p) {
      uint64_t v = mod_prime(static_cast<unsigned __int128>(a[p]) * x + b[p]);
      if (v < sig.values[p]) sig.values[p] = v;
    }
  }
  return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.values.size() != b.values.size()) throw DedupError("signatures differ in length");
  if (a.seed != b.seed) throw DedupError("signatures use different seeds");
  if (a.values.empty()) throw DedupError("empty signature");
  size_t same = 0;
  for (size_t i = 0; i < a.values.size(); ++i) same += a.values[i] == b.values[i];
  return static_cast<double>(same) / static_cast<double>(a.values.size());
}

double collision_probability(double s, const BandChoice& c) {
  return 1.0 - std::pow(1.0 - std::pow(s, c.rows), c.bands);
}

BandChoice choose_bands(unsigned num_perms, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw DedupError("threshold must lie in (0, 1)");
  // Composite Simpson rule.
  auto integrate = [](auto f, double lo, double hi) {
    const int n = 1000;
    double h = (hi - lo) / n, sum = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 ? 4 : 2);
    return sum * h / 3.0;
  };
  BandChoice best;
  double best_err = std::numeric_limits<double>::infinity();
  for (unsigned b = 1; b <= num_perms; ++b) {
    for (unsigned r = 1; b * r <= num_perms; ++r) {
      BandChoice c{b, r};
      double fp = integrate([&](double s) { return collision_probability(s, c); }, 0.0, threshold);
      double fn = integrate([&](double s) { return 1.0 - collision_probability(s, c); }, threshold, 1.0);
      if (fp + fn < best_err) {
        best_err = fp + fn;
        best = c;
      }
    }
  }
  return best;
}

size_t LshIndex::insert(const MinHashSignature& sig) {
  if (sig.values.size() < static_cast<size_t>(choice_.bands) * choice_.rows)
    throw DedupError("signature shorter than bands * rows");
  size_t pos = size_++;
  for (unsigned band = 0; band < choice_.bands; ++band) {
    uint64_t h = kMulA;
    for (unsigned r = 0; r < choice_.rows; ++r) h = avalanche(h ^ sig.values[band * choice_.rows + r]) * kMulB;
    buckets_[band][h].push_back(pos);
  }
  return pos;
}

std::set<std::pair<size_t, size_t>> LshIndex::candidate_pairs() const {
  std::set<std::pair<size_t, size_t>> out;
  for (const auto& band : buckets_)
    for (const auto& [h, members] : band)
      for (size_t i = 0; i < members.size(); ++i)
        for (size_t j = i + 1; j < members.size(); ++j)
          out.emplace(std::min(members[i], members[j]), std::max(members[i], members[j]));
  return out;
}

std::set<std::pair<std::string, std::string>> candidate_pairs(const LshIndex& index,
                                                              const std::vector<MinHashSignature>& signatures) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto [i, j] : index.candidate_pairs()) {
    if (i >= signatures.size() || j >= signatures.size()) throw DedupError("index holds unknown signatures");
    const std::string& a = signatures[i].design_id;
    const std::string& b = signatures[j].design_id;
    if (a == b) continue;
    out.emplace(std::min(a, b), std::max(a, b));
  }
  return out;
}

std::vector<DuplicateComponent> duplicate_components(const std::vector<DedupDesign>& designs,
                                                     const std::set<std::pair<std::string, std::string>>& pairs) {
  std::map<std::string, size_t> index;
  for (const auto& d : designs) index.emplace(d.id, index.size());
  std::vector<size_t> parent(index.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : pairs) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end()) throw DedupError("duplicate pair names an unknown design");
    size_t ra = find(ia->second), rb = find(ib->second);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::map<std::string, ShuttleId> shuttle;
  for (const auto& d : designs) shuttle.emplace(d.id, d.shuttle);
  std::map<size_t, std::vector<std::string>> groups;
  for (const auto& [id, i] : index) groups[find(i)].push_back(id);
  std::vector<DuplicateComponent> out;
  for (auto& [root, members] : groups) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    DuplicateComponent c;
    c.survivor = *std::min_element(members.begin(), members.end(), [&](const std::string& x, const std::string& y) {
      uint32_t ox = shuttle[x].ordinal, oy = shuttle[y].ordinal;
      return ox != oy ? ox < oy : x < y;
    });
    c.members = std::move(members);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.survivor < y.survivor; });
  return out;
}

std::set<std::string> temporal_dedup(const std::vector<DedupDesign>& designs,
                                     const std::set<std::pair<std::string, std::string>>& pairs) {
  std::set<std::string> keep;
  for (const auto& d : designs) keep.insert(d.id);
  for (const auto& c : duplicate_components(designs, pairs))
    for (const auto& m : c.members)
      if (m != c.survivor) keep.erase(m);
  return keep;
}

}  // namespace modbench
