/*
 * Model samplers wired to the scaling maps, shared by the command line tool
 * and the acceptance runner.
 */
#ifndef KPZLAB_EXPERIMENTS_HPP
#define KPZLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "json.hpp"
#include "kpzlab/analysis.hpp"
#include "kpzlab/asep.hpp"
#include "kpzlab/hallittlewood.hpp"
#include "kpzlab/sixvertex.hpp"

namespace kpzlab {

// spatial reach needed around the origin, in scaled units
struct Reach {
  double left = 1;         // s >= -left at exponent 2/3
  double right = 1;        // s <= right at exponent 2/3
  double right_5_6 = 1;    // s <= right_5_6 at exponent 5/6
};

// six-vertex parameters matched to (zeta, q): xi u = 1/(zeta sqrt q), u = 1
S6VParams sv_params(double zeta, double q);

// h(., N) on row N as a raw curve over x = 1, ..., X + 1
RawCurve sample_sv_raw(Rng& rng, const ScalingSpec& spec, long N, const Reach& reach);

struct AsepRaw {
  RawCurve curve;
  bool identity_ok = true;
  bool truncation_ok = true;
};
// height at time N/(1-L) on the integer window needed by reach
AsepRaw sample_asep_raw(Rng& rng, const ScalingSpec& spec, long N, const Reach& reach);

// one raw curve per replica, replica-indexed seeds
std::vector<RawCurve> sample_raw_curves(const ScalingSpec& spec, long N, long replicas, std::uint64_t seed,
                                        int workers, const Reach& reach, long* identity_failures = nullptr,
                                        long* truncation_failures = nullptr);

struct OnePointRow {
  long N = 0;
  double ks = 0, mean = 0, variance = 0;
  std::vector<double> f0;
};
OnePointRow onepoint_row(const ScalingSpec& spec, long N, const std::vector<RawCurve>& raws, const TWReference& tw);

// Joint law comparison at fixed (M, N): (N - lambda'_1(x))_{x=0..M} against (h(x+1, N))_{x=0..M}
struct IdentityReport {
  std::vector<double> marginal_tv;  // x = 0..M
  double max_marginal_tv = 0;
  ChiSquare joint;
  long restarts = 0;
  nlohmann::json to_json() const;
};
IdentityReport identity_svhl(int M, int N, double t, double zeta, long replicas, std::uint64_t seed, int workers,
                             int size_cap = -1);

// MCMC on an M x N box, top two lines lambda'_1, lambda'_2 of the ascending part
struct McmcPairs {
  std::vector<std::pair<UpRightPath, UpRightPath>> pairs;  // shifted to [-s1, s1]
  double acceptance_rate = 0;
};
McmcPairs mcmc_top_pairs(int M, int N, int H, double t, double zeta, long burn_in, long thin, long samples,
                         long s1, std::uint64_t seed);

// S6V increments: g-curves on [-r, r] at one N
std::vector<ScaledCurve> sv_g_curves(const ScalingSpec& spec, long N, double r, long replicas, std::uint64_t seed,
                                     int workers, int half_points = 32);
// uniform Bernoulli bridges on 2 r N^{2/3} steps, scaled like g: N^{-1/3}(S(x N^{2/3}) - p x N^{2/3})
std::vector<ScaledCurve> bernoulli_g_curves(double p, long N, double r, long replicas, std::uint64_t seed);

}  // namespace kpzlab

#endif
