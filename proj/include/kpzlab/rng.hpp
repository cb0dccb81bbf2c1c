/*
 * Random streams.
 *
 * Xoshiro256** (Blackman & Vigna) seeded through SplitMix64.  One stream per
 * replica; replica seeds come from derive_replica_seed.
 */
#ifndef KPZLAB_RNG_HPP
#define KPZLAB_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace kpzlab {

// splitmix64 finalizer, a bijection on 64-bit words
std::uint64_t splitmix64_mix(std::uint64_t z);

// seed_i = mix(master + (i + 1) * 0x9E3779B97F4A7C15)
std::uint64_t derive_replica_seed(std::uint64_t master, std::uint64_t replica_index);

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // (0,1), never returns 0
  double uniform();
  // [0, n)
  std::uint64_t below(std::uint64_t n);
  double exponential(double rate);
  double normal();
  // chi variable with k degrees of freedom
  double chi(double k);
  // binomial(n, p) by summing bernoullis, fine for the desk sizes used here
  int binomial(int n, double p);

  template <class It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::uint64_t j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

  std::string serialize() const;
  static Rng deserialize(const std::string& s);

  const std::array<std::uint64_t, 4>& state() const { return s_; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace kpzlab

#endif
