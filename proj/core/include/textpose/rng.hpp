#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace textpose {

// splitmix64 step; used to mix seeds and derive named substreams.
std::uint64_t mix64(std::uint64_t x);

// Stable 64-bit hash of a label (FNV-1a), for deriving per-purpose seeds.
std::uint64_t hash_label(std::string_view label);

// Deterministic RNG. Gaussians come from our own Box-Muller so the stream
// does not depend on the standard library's distribution internals. Child
// streams are derived from the seed by label, which keeps unrelated
// consumers (init draws, batch order, noise) from perturbing each other.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng child(std::string_view label) const;
  Rng child(std::uint64_t salt) const;

  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  int uniform_int(int lo, int hi);       // inclusive bounds
  double gaussian();                     // N(0, 1)
  double gaussian(double mean, double stddev);
  std::uint64_t next_u64();

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_int(0, static_cast<int>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace textpose
