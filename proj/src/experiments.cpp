#include "kpzlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kpzlab/parallel.hpp"

namespace kpzlab {

S6VParams sv_params(double zeta, double q) {
  if (!(zeta > 0 && zeta < 1)) throw std::invalid_argument("sv_params: zeta must lie in (0,1)");
  return S6VParams::homogeneous(q, 1 / (zeta * std::sqrt(q)), 1.0);
}

namespace {
std::pair<double, double> reach_window(const ScalingSpec& spec, long N, const Reach& reach) {
  const double n = static_cast<double>(N);
  const double o = spec.origin(N);
  double lo = o - reach.left * std::pow(n, 2.0 / 3);
  double hi = o + std::max(reach.right * std::pow(n, 2.0 / 3), reach.right_5_6 * std::pow(n, 5.0 / 6));
  return {lo, hi};
}
}  // namespace

RawCurve sample_sv_raw(Rng& rng, const ScalingSpec& spec, long N, const Reach& reach) {
  if (spec.model != Model::SV) throw std::invalid_argument("sample_sv_raw: spec must be SV");
  auto [lo, hi] = reach_window(spec, N, reach);
  if (lo < 1) throw std::out_of_range("sample_sv_raw: window reaches left of x = 1");
  const int X = std::max(1, static_cast<int>(std::ceil(hi)));
  auto field = sample_s6v(rng, sv_params(spec.zeta, spec.t), X, static_cast<int>(N));
  auto row = field.height_row(static_cast<int>(N));
  RawCurve c;
  c.x0 = 1;
  c.v.assign(row.begin(), row.end());
  return c;
}

AsepRaw sample_asep_raw(Rng& rng, const ScalingSpec& spec, long N, const Reach& reach) {
  if (spec.model != Model::ASEP) throw std::invalid_argument("sample_asep_raw: spec must be ASEP");
  const double T = spec.asep_time(N);
  auto [lo, hi] = reach_window(spec, N, reach);
  long xl = static_cast<long>(std::floor(lo)), xh = static_cast<long>(std::ceil(hi));
  if (static_cast<double>(xl) < -T / 2) throw std::out_of_range("sample_asep_raw: window left of -T/2");
  AsepState s = simulate_asep(rng, spec.L, T, TruncationPolicy::for_time(T));
  AsepRaw out;
  out.truncation_ok = s.truncation_ok();
  if (!out.truncation_ok) throw std::runtime_error("sample_asep_raw: truncated particle reached the window; " + s.policy.log);
  out.identity_ok = check_event_identity(s, xl, xh);
  out.curve.x0 = static_cast<double>(xl);
  for (long x = xl; x <= xh; ++x) out.curve.v.push_back(static_cast<double>(height_at(s, x)));
  return out;
}

std::vector<RawCurve> sample_raw_curves(const ScalingSpec& spec, long N, long replicas, std::uint64_t seed,
                                        int workers, const Reach& reach, long* identity_failures,
                                        long* truncation_failures) {
  std::vector<char> id_ok(static_cast<std::size_t>(replicas), 1), tr_ok(static_cast<std::size_t>(replicas), 1);
  auto curves = parallel_map<RawCurve>(replicas, workers, [&](long i) {
    Rng rng(derive_replica_seed(seed, static_cast<std::uint64_t>(i)));
    if (spec.model == Model::SV) return sample_sv_raw(rng, spec, N, reach);
    if (spec.model == Model::ASEP) {
      AsepRaw a = sample_asep_raw(rng, spec, N, reach);
      id_ok[i] = a.identity_ok;
      tr_ok[i] = a.truncation_ok;
      return a.curve;
    }
    throw std::invalid_argument("sample_raw_curves: HL curves come from the HAHP sampler");
  });
  if (identity_failures) *identity_failures = static_cast<long>(std::count(id_ok.begin(), id_ok.end(), 0));
  if (truncation_failures) *truncation_failures = static_cast<long>(std::count(tr_ok.begin(), tr_ok.end(), 0));
  return curves;
}

OnePointRow onepoint_row(const ScalingSpec& spec, long N, const std::vector<RawCurve>& raws, const TWReference& tw) {
  OnePointRow row;
  row.N = N;
  for (const auto& r : raws) row.f0.push_back(scale_point(spec, N, r, 0));
  Ecdf e(row.f0);
  row.ks = ks_distance(e, [&](double y) { return tw(y); });
  row.mean = e.mean();
  row.variance = e.variance();
  return row;
}

nlohmann::json IdentityReport::to_json() const {
  return {{"marginal_tv", marginal_tv}, {"max_marginal_tv", max_marginal_tv}, {"joint_chi2", joint.stat},
          {"joint_dof", joint.dof}, {"joint_p", joint.p_value}, {"restarts", restarts}};
}

IdentityReport identity_svhl(int M, int N, double t, double zeta, long replicas, std::uint64_t seed, int workers,
                             int size_cap) {
  HahpParams hp{M, N, t, zeta};
  hp.validate();
  if (size_cap < 0) {
    // smallest cap with truncated mass below 1e-9
    size_cap = 1;
    while (hp.normalization() * hahp_size_tail_bound(hp, size_cap) > 1e-9) ++size_cap;
  }
  // HAHP draws are sequential (shared row cache)
  HahpSampler sampler(hp, size_cap);
  Rng hl_rng(derive_replica_seed(seed, 0));
  std::map<std::vector<int>, std::pair<double, double>> joint;
  std::vector<std::vector<double>> mh(static_cast<std::size_t>(M) + 1, std::vector<double>(N + 1, 0.0));
  auto ms = mh;
  for (long r = 0; r < replicas; ++r) {
    auto seq = sampler.sample(hl_rng);
    std::vector<int> v{N};
    for (const auto& l : seq) v.push_back(N - static_cast<int>(l.size()));
    for (int x = 0; x <= M; ++x) mh[x][v[x]] += 1;
    joint[v].first += 1;
  }
  auto sv = sv_params(zeta, t);
  auto rows = parallel_map<std::vector<int>>(replicas, workers, [&](long i) {
    Rng rng(derive_replica_seed(seed ^ 0x5356ULL, static_cast<std::uint64_t>(i)));
    auto f = sample_s6v(rng, sv, M, N);
    auto h = f.height_row(N);
    return std::vector<int>(h.begin(), h.end());
  });
  for (const auto& v : rows) {
    for (int x = 0; x <= M; ++x) ms[x][v[x]] += 1;
    joint[v].second += 1;
  }
  IdentityReport rep;
  rep.restarts = sampler.restarts();
  for (int x = 0; x <= M; ++x) {
    rep.marginal_tv.push_back(total_variation(mh[x], ms[x]));
    rep.max_marginal_tv = std::max(rep.max_marginal_tv, rep.marginal_tv.back());
  }
  std::vector<double> a, b;
  for (const auto& [k, c] : joint) a.push_back(c.first), b.push_back(c.second);
  rep.joint = chi_square_two_sample(a, b);
  return rep;
}

McmcPairs mcmc_top_pairs(int M, int N, int H, double t, double zeta, long burn_in, long thin, long samples, long s1,
                         std::uint64_t seed) {
  if (2 * s1 > M) throw std::invalid_argument("mcmc_top_pairs: window 2 s1 exceeds M");
  PlanePartitionChain chain(M, N, H, t, zeta);
  Rng rng(seed);
  const long sweep = static_cast<long>(M) * N;
  for (long k = 0; k < burn_in * sweep; ++k) chain.step(rng);
  McmcPairs out;
  const long c = M / 2;
  for (long s = 0; s < samples; ++s) {
    for (long k = 0; k < thin * sweep; ++k) chain.step(rng);
    auto ens = line_ensemble_from_sequence(ascending_part(chain.state()), 2);
    auto cut = [&](const UpRightPath& p) {
      std::vector<long> v;
      for (long x = c - s1; x <= c + s1; ++x) v.push_back(p.at(x));
      return UpRightPath(-s1, v);
    };
    out.pairs.emplace_back(cut(ens.curves[0]), cut(ens.curves[1]));
  }
  out.acceptance_rate = chain.proposed() ? static_cast<double>(chain.accepted()) / static_cast<double>(chain.proposed()) : 0;
  return out;
}

std::vector<ScaledCurve> sv_g_curves(const ScalingSpec& spec, long N, double r, long replicas, std::uint64_t seed,
                                     int workers, int half_points) {
  Reach reach{r, r, 0};
  return parallel_map<ScaledCurve>(replicas, workers, [&](long i) {
    Rng rng(derive_replica_seed(seed, static_cast<std::uint64_t>(i)));
    auto raw = sample_sv_raw(rng, spec, N, reach);
    return remove_parabola(spec, scale_curve(spec, N, raw, r, half_points));
  });
}

std::vector<ScaledCurve> bernoulli_g_curves(double p, long N, double r, long replicas, std::uint64_t seed) {
  const double n = static_cast<double>(N);
  const double unit = std::pow(n, 2.0 / 3);
  const long L = std::lround(2 * r * unit);
  const long z = std::lround(p * static_cast<double>(L));
  std::vector<ScaledCurve> out;
  for (long i = 0; i < replicas; ++i) {
    Rng rng(derive_replica_seed(seed, static_cast<std::uint64_t>(i)));
    auto path = sample_uniform_bridge(rng, BridgeSpec{0, L, 0, z});
    ScaledCurve c;
    c.r = r;
    const int hp = 32;
    for (int k = -hp; k <= hp; ++k) {
      double s = r * k / hp;
      double pos = std::clamp((s + r) * unit, 0.0, static_cast<double>(L));
      c.s.push_back(s);
      c.f.push_back((path.eval(pos) - p * pos) / std::cbrt(n));
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace kpzlab
