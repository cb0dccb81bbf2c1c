/*
 * Dyadic quantile coupling of a Brownian bridge of variance p(1-p) with the
 * Bernoulli walk conditioned on S_n = z, the statistic Delta(n,z) and a
 * local CLT check for the conditioned midpoint.
 */
#ifndef KPZLAB_COUPLING_HPP
#define KPZLAB_COUPLING_HPP

#include <string>
#include <utility>
#include <vector>

#include "kpzlab/paths.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

struct WalkBridgeLaw {
  long n = 1, z = 0;
  double p = 0.5;
  void validate() const;
};

struct CouplingSample {
  std::vector<double> bridge;  // B(k/n), k = 0..n
  UpRightPath walk;            // S_0 = 0, ..., S_n = z
  double delta = 0;
};

// P(S_m = w | S_n = z) = C(m,w) C(n-m,z-w) / C(n,z), w = 0..m (zeros off support)
std::vector<double> conditional_midpoint_pmf(long n, long m, long z);

struct MidpointCoupling {
  double Z = 0;
  long W = 0;
};
// Z = (m/n) z + sqrt(p(1-p) m (1 - m/n)) N, W = G^{-1}(Phi(N)).
// |2m - n| <= 1 unless general_m is set.
MidpointCoupling quantile_couple_midpoint(double normal_draw, long n, long m, long z, double p,
                                          bool general_m = false);

// n a power of two, 0 <= z <= n
CouplingSample kmt_couple(Rng& rng, long n, long z, double p);
// max_t |sqrt(n) B(t/n) + (t/n) z - S_t|
double coupling_delta(const std::vector<double>& bridge, const UpRightPath& walk);

struct DeltaRow {
  long n = 0, z = 0;
  double median = 0, q99 = 0;
  std::vector<double> samples;  // sorted
};
struct DeltaGrowth {
  std::vector<DeltaRow> rows;
  // least squares median = a + b (log n)^2
  double intercept = 0, slope = 0, residual_rms = 0;
  std::string to_csv() const;  // "n,z,median_delta,q99_delta"
};
// z = floor(p n) + z_offset (clamped to [0, n])
DeltaGrowth delta_growth_experiment(Rng& rng, double p, const std::vector<long>& n_list, long replicas,
                                    long z_offset = 0);

// max over |w| <= w_range of |exact / gauss - 1| at m = floor(n/2), where
// exact = P(S_m = w + (m/n) z | S_n = z) and
// gauss = (2 pi s2)^{-1/2} exp(-w^2 / (2 s2)), s2 = (n/4)(z/n)(1 - z/n)
double local_clt_check(long n, long z, double w_range);

}  // namespace kpzlab

#endif
