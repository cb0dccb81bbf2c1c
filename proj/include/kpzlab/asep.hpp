/*
 * Continuous-time ASEP on Z with step initial data x_m(0) = -(m-1), right
 * rate R = 1 and left rate L = t.  The infinite system is truncated to the
 * first M0 particles.
 */
#ifndef KPZLAB_ASEP_HPP
#define KPZLAB_ASEP_HPP

#include <string>
#include <utility>
#include <vector>

#include "kpzlab/rng.hpp"

namespace kpzlab {

struct TruncationPolicy {
  long M0 = 1;
  std::string log;  // derivation, echoed into run manifests

  // M0 = ceil(2T) + ceil(10 sqrt T) + 10
  static TruncationPolicy for_time(double T);
  static TruncationPolicy custom(long M0);
};

struct AsepState {
  std::vector<long> x;  // x_1 > x_2 > ... > x_{M0}
  double time = 0;
  double t = 0;  // L / R
  long events = 0;
  long last_max = 0;  // largest position ever held by particle M0
  TruncationPolicy policy;

  // heights are trusted on [-time/2, inf) provided particle M0 stayed left of
  // it; before any jump, everywhere right of particle M0
  double reliable_left() const { return events == 0 ? static_cast<double>(last_max) + 1 : -time / 2; }
  bool truncation_ok() const { return static_cast<double>(last_max) < reliable_left(); }
  bool ordered() const;
};

AsepState step_initial(const TruncationPolicy& policy, double t);
AsepState simulate_asep(Rng& rng, double t, double T, const TruncationPolicy& policy);

// #{m : x_m >= x}, interpolated for real x.  Throws std::domain_error left of
// the reliable window or when the truncated particle reached it.
double height(const AsepState& s, double x);
long height_at(const AsepState& s, long x);

// {h(n) >= m} == {x_m >= n} for all n in [n_lo, n_hi], m in [1, M0]
bool check_event_identity(const AsepState& s, long n_lo, long n_hi);

// c1 = 1 - 2 sqrt(sigma), c2 = sigma^{-1/6} (1 - sqrt(sigma))^{2/3}
std::pair<double, double> tw_centering(double sigma);

std::string height_to_csv(const AsepState& s, long x_lo, long x_hi);  // "x,h"

}  // namespace kpzlab

#endif
