#include "kpzlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace kpzlab {

void WalkBridgeLaw::validate() const {
  if (n < 1) throw std::invalid_argument("WalkBridgeLaw: n must be >= 1");
  if (z < 0 || z > n) throw std::invalid_argument("WalkBridgeLaw: need 0 <= z <= n");
  if (!(p > 0 && p < 1)) throw std::invalid_argument("WalkBridgeLaw: p must lie in (0,1)");
}

std::vector<double> conditional_midpoint_pmf(long n, long m, long z) {
  if (n < 0 || m < 0 || m > n || z < 0 || z > n)
    throw std::invalid_argument("conditional_midpoint_pmf: need 0 <= m, z <= n");
  std::vector<double> pmf(static_cast<std::size_t>(m) + 1, 0.0);
  const long lo = std::max(0L, z - (n - m)), hi = std::min(m, z);
  const double lz = log_binomial(static_cast<double>(n), static_cast<double>(z));
  double s = 0;
  for (long w = lo; w <= hi; ++w) {
    pmf[w] = std::exp(log_binomial(static_cast<double>(m), static_cast<double>(w)) +
                      log_binomial(static_cast<double>(n - m), static_cast<double>(z - w)) - lz);
    s += pmf[w];
  }
  for (auto& v : pmf) v /= s;
  return pmf;
}

MidpointCoupling quantile_couple_midpoint(double N, long n, long m, long z, double p, bool general_m) {
  WalkBridgeLaw{n, z, p}.validate();
  if (m < 0 || m > n) throw std::invalid_argument("quantile_couple_midpoint: need 0 <= m <= n");
  if (!general_m && std::abs(2 * m - n) > 1)
    throw std::invalid_argument("quantile_couple_midpoint: |2m - n| > 1 (set general_m)");
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  MidpointCoupling r;
  r.Z = dm / dn * static_cast<double>(z) + std::sqrt(p * (1 - p) * dm * (1 - dm / dn)) * N;
  auto pmf = conditional_midpoint_pmf(n, m, z);
  const long lo = std::max(0L, z - (n - m)), hi = std::min(m, z);
  if (N > 0) {
    // smallest w with P(W > w) <= Phi^c(N), summed from the right
    const double tail = 0.5 * std::erfc(N / std::numbers::sqrt2);
    double above = 0;
    long w = hi;
    while (w > lo && above + pmf[w] <= tail) {
      above += pmf[w];
      --w;
    }
    r.W = w;
  } else {
    const double u = 0.5 * std::erfc(-N / std::numbers::sqrt2);
    double cdf = 0;
    long w = lo;
    for (; w < hi; ++w) {
      cdf += pmf[w];
      if (cdf >= u) break;
    }
    r.W = w;
  }
  return r;
}

namespace {

struct Built {
  std::vector<double> B;
  std::vector<long> S;
};

Built build(Rng& rng, long n, long z, double p) {
  const double sigma = std::sqrt(p * (1 - p));
  Built out;
  out.B.assign(static_cast<std::size_t>(n) + 1, 0.0);
  if (n <= 2) {
    // independent base case
    auto path = sample_uniform_bridge(rng, BridgeSpec{0, n, 0, z});
    out.S = path.values();
    if (n == 2) out.B[1] = sigma * rng.normal() / 2;
    return out;
  }
  const long k = n / 2;
  const double N = rng.normal();
  const long W = quantile_couple_midpoint(N, n, k, z, p).W;
  Built a = build(rng, k, W, p), b = build(rng, k, z - W, p);
  out.S.resize(static_cast<std::size_t>(n) + 1);
  const double dn = static_cast<double>(n);
  for (long i = 0; i <= k; ++i) {
    out.B[i] = a.B[i] / std::numbers::sqrt2 + static_cast<double>(i) / dn * sigma * N;
    out.S[i] = a.S[i];
  }
  for (long i = 0; i <= k; ++i) {
    out.B[k + i] = b.B[i] / std::numbers::sqrt2 + (1 - static_cast<double>(k + i) / dn) * sigma * N;
    out.S[k + i] = W + b.S[i];
  }
  return out;
}

}  // namespace

double coupling_delta(const std::vector<double>& bridge, const UpRightPath& walk) {
  const long n = walk.t1() - walk.t0();
  if (static_cast<long>(bridge.size()) != n + 1) throw std::invalid_argument("coupling_delta: size mismatch");
  const double z = static_cast<double>(walk.values().back() - walk.values().front());
  const double rn = std::sqrt(static_cast<double>(n));
  double d = 0;
  for (long t = 0; t <= n; ++t) {
    double lin = static_cast<double>(t) / static_cast<double>(n) * z;
    d = std::max(d, std::abs(rn * bridge[t] + lin - static_cast<double>(walk.values()[t] - walk.values()[0])));
  }
  return d;
}

CouplingSample kmt_couple(Rng& rng, long n, long z, double p) {
  if (n < 1 || (n & (n - 1)) != 0) throw std::invalid_argument("kmt_couple: n must be a power of two");
  WalkBridgeLaw{n, z, p}.validate();
  Built b = build(rng, n, z, p);
  CouplingSample s;
  s.bridge = std::move(b.B);
  s.walk = UpRightPath(0, std::move(b.S));
  s.delta = coupling_delta(s.bridge, s.walk);
  return s;
}

namespace {
double quantile_sorted(const std::vector<double>& v, double q) {
  // type 7
  double h = (static_cast<double>(v.size()) - 1) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}
}  // namespace

std::string DeltaGrowth::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "n,z,median_delta,q99_delta\n";
  for (const auto& r : rows) os << r.n << ',' << r.z << ',' << r.median << ',' << r.q99 << '\n';
  return os.str();
}

DeltaGrowth delta_growth_experiment(Rng& rng, double p, const std::vector<long>& n_list, long replicas,
                                    long z_offset) {
  if (replicas < 1) throw std::invalid_argument("delta_growth_experiment: replicas must be >= 1");
  DeltaGrowth g;
  for (long n : n_list) {
    DeltaRow row;
    row.n = n;
    row.z = std::clamp(static_cast<long>(std::floor(p * static_cast<double>(n))) + z_offset, 0L, n);
    for (long r = 0; r < replicas; ++r) row.samples.push_back(kmt_couple(rng, n, row.z, p).delta);
    std::sort(row.samples.begin(), row.samples.end());
    row.median = quantile_sorted(row.samples, 0.5);
    row.q99 = quantile_sorted(row.samples, 0.99);
    g.rows.push_back(std::move(row));
  }
  // least squares on (log n)^2
  const double k = static_cast<double>(g.rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : g.rows) {
    double x = std::pow(std::log(static_cast<double>(r.n)), 2);
    sx += x, sy += r.median, sxx += x * x, sxy += x * r.median;
  }
  double den = k * sxx - sx * sx;
  if (g.rows.size() >= 2 && den > 0) {
    g.slope = (k * sxy - sx * sy) / den;
    g.intercept = (sy - g.slope * sx) / k;
    double ss = 0;
    for (const auto& r : g.rows) {
      double e = r.median - g.intercept - g.slope * std::pow(std::log(static_cast<double>(r.n)), 2);
      ss += e * e;
    }
    g.residual_rms = std::sqrt(ss / k);
  }
  return g;
}

double local_clt_check(long n, long z, double w_range) {
  WalkBridgeLaw{n, z, 0.5}.validate();
  if (z == 0 || z == n) throw std::invalid_argument("local_clt_check: degenerate endpoint (variance 0)");
  const long m = n / 2;
  const double dn = static_cast<double>(n), dz = static_cast<double>(z);
  const double s2 = dn / 4 * (dz / dn) * (1 - dz / dn);
  const double center = static_cast<double>(m) / dn * dz;
  auto pmf = conditional_midpoint_pmf(n, m, z);
  double worst = 0;
  long lo = static_cast<long>(std::ceil(center - w_range)), hi = static_cast<long>(std::floor(center + w_range));
  for (long v = std::max(0L, lo); v <= std::min(m, hi); ++v) {
    double w = static_cast<double>(v) - center;
    double gauss = std::exp(-w * w / (2 * s2)) / std::sqrt(2 * std::numbers::pi * s2);
    worst = std::max(worst, std::abs(pmf[v] / gauss - 1));
  }
  return worst;
}

}  // namespace kpzlab
