#include "kpzlab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kpzlab {

void GibbsContext::validate() const {
  if (!(t > 0 && t < 1)) throw std::invalid_argument("GibbsContext: t must lie in (0,1)");
  if (T0 >= T1) throw std::invalid_argument("GibbsContext: need T0 < T1");
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (S[i] < T0 + 1 || S[i] > T1) throw std::invalid_argument("GibbsContext: S not inside [T0+1,T1]");
    if (i && S[i] <= S[i - 1]) throw std::invalid_argument("GibbsContext: S must be strictly increasing");
  }
  for (const Boundary* b : {&top, &bottom}) {
    if (!b->is_infinite() && (b->path->t0() > T0 || b->path->t1() < T1))
      throw std::invalid_argument("GibbsContext: boundary curve does not cover [T0,T1]");
  }
}

std::vector<long> full_S(long T0, long T1) {
  std::vector<long> s;
  for (long i = T0 + 1; i <= T1; ++i) s.push_back(i);
  return s;
}

GibbsContext make_context(double t, long T0, long T1, Boundary top, Boundary bottom) {
  GibbsContext c{t, T0, T1, full_S(T0, T1), std::move(top), std::move(bottom)};
  c.validate();
  return c;
}

bool LineEnsemble::ordered() const {
  for (std::size_t j = 1; j < curves.size(); ++j) {
    const auto& a = curves[j - 1];
    const auto& b = curves[j];
    long lo = std::max(a.t0(), b.t0()), hi = std::min(a.t1(), b.t1());
    for (long x = lo; x <= hi; ++x)
      if (a.at(x) < b.at(x)) return false;
  }
  return true;
}

double t_power(double t, long d) {
  if (d <= 64) return std::pow(t, static_cast<double>(d));
  return std::exp(static_cast<double>(d) * std::log(t));
}

namespace {

// Product of factors, moved to log space if it heads toward subnormals.
struct WeightAccumulator {
  double prod = 1;
  bool in_log = false;
  double log_sum = 0, comp = 0;  // Kahan

  void add_log(double x) {
    double y = x - comp;
    double s = log_sum + y;
    comp = (s - log_sum) - y;
    log_sum = s;
  }
  void mul(double f) {
    if (!in_log) {
      prod *= f;
      if (prod < 1e-280) {
        in_log = true;
        add_log(std::log(prod));
      }
    } else {
      add_log(std::log(f));
    }
  }
  double value() const { return in_log ? std::exp(log_sum) : prod; }
};

}  // namespace

double weight_W(const GibbsContext& ctx, const UpRightPath& ell) {
  if (ell.t0() > ctx.T0 || ell.t1() < ctx.T1)
    throw std::invalid_argument("weight_W: path does not cover [T0,T1]");
  const UpRightPath* f = ctx.top.is_infinite() ? nullptr : &*ctx.top.path;
  const UpRightPath* g = ctx.bottom.is_infinite() ? nullptr : &*ctx.bottom.path;
  WeightAccumulator acc;
  for (long i : ctx.S) {
    long li = ell.at(i), lp = ell.at(i - 1);
    if (f) {
      long dp = f->at(i - 1) - lp, di = f->at(i) - li;
      if (di < 0) return 0.0;
      if (dp - di == 1) acc.mul(1 - t_power(ctx.t, dp));
    }
    if (g) {
      long dp = lp - g->at(i - 1), di = li - g->at(i);
      if (di < 0) return 0.0;
      if (dp - di == 1) acc.mul(1 - t_power(ctx.t, dp));
    }
  }
  return acc.value();
}

double acceptance_Z_exact(const GibbsContext& ctx, long a, long b, double guard) {
  BridgeSpec spec{ctx.T0, ctx.T1, a, b};
  if (bridge_count(spec) > guard) {
    std::ostringstream os;
    os << "acceptance_Z_exact: |Omega| = " << bridge_count(spec) << " exceeds guard " << guard
       << "; use acceptance_Z_mc";
    throw EnumerationGuardError(os.str());
  }
  double sum = 0;
  auto paths = enumerate_bridges(spec);
  for (const auto& p : paths) sum += weight_W(ctx, p);
  return sum / static_cast<double>(paths.size());
}

McEstimate acceptance_Z_mc(Rng& rng, const GibbsContext& ctx, long a, long b, long n_samples) {
  if (n_samples < 1) throw std::invalid_argument("acceptance_Z_mc: n_samples must be >= 1");
  BridgeSpec spec{ctx.T0, ctx.T1, a, b};
  double mean = 0, m2 = 0;
  for (long k = 1; k <= n_samples; ++k) {
    double w = weight_W(ctx, sample_uniform_bridge(rng, spec));
    double d = w - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (w - mean);
  }
  double var = n_samples > 1 ? m2 / static_cast<double>(n_samples - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n_samples))};
}

ResampleReport gibbs_resample(Rng& rng, const GibbsContext& ctx, long a, long b, long max_trials) {
  BridgeSpec spec{ctx.T0, ctx.T1, a, b};
  double wsum = 0;
  for (long k = 1; k <= max_trials; ++k) {
    UpRightPath cand = sample_uniform_bridge(rng, spec);
    double w = weight_W(ctx, cand);
    wsum += w;
    double u = rng.uniform();
    if (w > u) return {std::move(cand), k, wsum / static_cast<double>(k)};
  }
  std::ostringstream os;
  os << "gibbs_resample: no acceptance in " << max_trials << " trials (running Z estimate "
     << wsum / static_cast<double>(max_trials) << ")";
  throw MaxTrialsError(os.str(), wsum / static_cast<double>(max_trials));
}

std::map<UpRightPath, double> conditional_law_exact(const GibbsContext& ctx, long a, long b,
                                                    double guard) {
  BridgeSpec spec{ctx.T0, ctx.T1, a, b};
  if (bridge_count(spec) > guard) throw EnumerationGuardError("conditional_law_exact: state space above guard");
  std::map<UpRightPath, double> law;
  double z = 0;
  for (auto& p : enumerate_bridges(spec)) {
    double w = weight_W(ctx, p);
    z += w;
    law.emplace(std::move(p), w);
  }
  if (z <= 0) throw std::domain_error("conditional_law_exact: Z = 0, conditional law undefined");
  for (auto& [p, w] : law) w /= z;
  return law;
}

double euler_c(double t, double tol) {
  if (!(t > 0 && t < 1)) throw std::invalid_argument("euler_c: t must lie in (0,1)");
  if (!(tol > 0)) throw std::invalid_argument("euler_c: tol must be positive");
  double c = 1, ti = 1;
  for (int i = 1; i < 100000; ++i) {
    ti *= t;
    c *= 1 - ti;
    // prod_{j>i}(1-t^j) >= 1 - sum_{j>i} t^j = 1 - t^{i+1}/(1-t)
    if (ti * t / (1 - t) < tol) break;
  }
  return c;
}

std::string MonotoneReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "T,k1,k2,lhs,rhs,pass\n";
  for (const auto& r : lemma_rows)
    os << r.T << ',' << r.k1 << ',' << r.k2 << ',' << r.lhs << ',' << r.rhs << ',' << (r.pass ? 1 : 0) << '\n';
  return os.str();
}

MonotoneReport verify_monotone_lemma(double t, const BridgeSpec& spec, const UpRightPath& bottom,
                                     const std::vector<long>& S, double tol) {
  spec.validate();
  GibbsContext ctx{t, spec.t0, spec.t1, S, Boundary::infinite(), Boundary::of(bottom)};
  ctx.validate();
  if (bridge_count(spec) > kEnumerationGuard) throw EnumerationGuardError("verify_monotone_lemma: instance too large");

  MonotoneReport rep;
  rep.c = euler_c(t);
  const double c = rep.c;
  auto paths = enumerate_bridges(spec);
  std::vector<double> w(paths.size());
  double z = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) z += (w[i] = weight_W(ctx, paths[i]));

  for (long T = spec.t0 + 1; T <= spec.t1 - 1; ++T) {
    auto [m, M] = bridge_range_at(spec, T);
    const long K = M - m + 1;
    std::vector<double> wsum(K, 0.0), cnt(K, 0.0);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      long k = paths[i].at(T) - m;
      wsum[k] += w[i];
      cnt[k] += 1;
    }
    auto cond = [&](long k) { return wsum[k] / cnt[k]; };
    for (long k1 = 0; k1 < K; ++k1)
      for (long k2 = k1; k2 < K; ++k2) {
        double lhs = c * cond(k1), rhs = cond(k2);
        bool ok = lhs <= rhs + tol;
        rep.lemma_rows.push_back({T, k1 + m, k2 + m, lhs, rhs, ok});
        rep.lemma_failures += !ok;
      }

    // set version over nonempty subsets of size <= 3 with min A >= max B
    std::vector<std::vector<long>> subsets;
    for (long mask = 1; mask < (1L << K); ++mask)
      if (__builtin_popcountl(mask) <= 3) {
        std::vector<long> s;
        for (long k = 0; k < K; ++k)
          if (mask >> k & 1) s.push_back(k);
        subsets.push_back(std::move(s));
      }
    auto cond_set = [&](const std::vector<long>& s) {
      double a = 0, b = 0;
      for (long k : s) a += wsum[k], b += cnt[k];
      return a / b;
    };
    for (const auto& A : subsets)
      for (const auto& B : subsets) {
        if (A.front() < B.back()) continue;
        ++rep.set_checks;
        if (c * cond_set(B) > cond_set(A) + tol) ++rep.set_failures;
      }

    // tail version under the Gibbs law; undefined when Z = 0
    if (z > 0) {
      double total = static_cast<double>(paths.size());
      for (long alpha = m - 1; alpha <= M; ++alpha) {
        double pg = 0, pf = 0;
        for (long k = std::max(alpha, m) - m; k < K; ++k) pg += wsum[k], pf += cnt[k];
        ++rep.tail_checks;
        if (pg / z + tol < c * pf / total) ++rep.tail_failures;
      }
    }
  }
  return rep;
}

CounterexampleInstance slope_counterexample(long n) {
  if (n < 1) throw std::invalid_argument("slope_counterexample: n must be >= 1");
  std::vector<long> low(2 * n + 1), high(2 * n + 1);
  for (long i = 0; i <= 2 * n; ++i) {
    low[i] = std::max(0L, i - n);
    high[i] = std::min(i, n);
  }
  UpRightPath lo(0, low), hi(0, high);
  return {BridgeSpec{0, 2 * n, 0, n}, lo, lo, hi};
}

MonotoneSuiteReport verify_monotone_suite(double t, int n_max, int box, double tol) {
  MonotoneSuiteReport rep;
  rep.worst_margin = INFINITY;
  for (long n = 2; n <= n_max; ++n) {
    for (long z0 = 0; z0 <= box; ++z0)
      for (long steps = 0; steps < (1L << n); ++steps) {
        std::vector<long> v{z0};
        for (long i = 0; i < n; ++i) v.push_back(v.back() + (steps >> i & 1));
        if (v.back() > box) continue;
        UpRightPath bottom(0, v);
        for (long a = z0; a <= box; ++a)
          for (long b = std::max(a, v.back()); b <= std::min(a + n, static_cast<long>(box)); ++b)
            for (long mask = 0; mask < (1L << n); ++mask) {
              std::vector<long> S;
              for (long i = 0; i < n; ++i)
                if (mask >> i & 1) S.push_back(i + 1);
              auto r = verify_monotone_lemma(t, BridgeSpec{0, n, a, b}, bottom, S, tol);
              ++rep.instances;
              rep.lemma_checks += static_cast<long>(r.lemma_rows.size());
              rep.set_checks += r.set_checks;
              rep.tail_checks += r.tail_checks;
              rep.failures += r.failures();
              for (const auto& row : r.lemma_rows) rep.worst_margin = std::min(rep.worst_margin, row.rhs - row.lhs);
            }
      }
  }
  return rep;
}

}  // namespace kpzlab
