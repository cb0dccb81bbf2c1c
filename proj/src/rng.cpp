#include "kpzlab/rng.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace kpzlab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_replica_seed(std::uint64_t master, std::uint64_t replica_index) {
  return splitmix64_mix(master + (replica_index + 1) * kGolden);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : s_) {
    x += kGolden;
    w = splitmix64_mix(x);
  }
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  // Lemire's multiply-shift with rejection
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    std::uint64_t thresh = (0 - n) % n;
    while (lo < thresh) {
      m = static_cast<unsigned __int128>((*this)()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

double Rng::normal() {
  boost::random::normal_distribution<double> nd(0.0, 1.0);
  return nd(*this);
}

double Rng::chi(double k) {
  boost::random::gamma_distribution<double> gd(k / 2.0, 2.0);
  return std::sqrt(gd(*this));
}

int Rng::binomial(int n, double p) {
  int c = 0;
  for (int i = 0; i < n; ++i) c += uniform() < p;
  return c;
}

std::string Rng::serialize() const {
  char buf[4 * 17 + 1];
  std::snprintf(buf, sizeof buf, "%016llx:%016llx:%016llx:%016llx",
                static_cast<unsigned long long>(s_[0]), static_cast<unsigned long long>(s_[1]),
                static_cast<unsigned long long>(s_[2]), static_cast<unsigned long long>(s_[3]));
  return buf;
}

Rng Rng::deserialize(const std::string& s) {
  Rng r;
  std::istringstream in(s);
  std::string tok;
  for (int i = 0; i < 4; ++i) {
    if (!std::getline(in, tok, ':') || tok.size() != 16)
      throw std::invalid_argument("Rng::deserialize: malformed state '" + s + "'");
    r.s_[i] = std::stoull(tok, nullptr, 16);
  }
  if ((r.s_[0] | r.s_[1] | r.s_[2] | r.s_[3]) == 0)
    throw std::invalid_argument("Rng::deserialize: all-zero state");
  return r;
}

}  // namespace kpzlab
