#include "kpzlab/analysis.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kpzlab/parallel.hpp"

namespace kpzlab {

std::string model_name(Model m) {
  switch (m) {
    case Model::HL: return "HL";
    case Model::SV: return "SV";
    case Model::ASEP: return "ASEP";
  }
  return "?";
}

double hl_sigma(double mu, double zeta) {
  double a = std::sqrt(zeta * mu), b = std::sqrt(zeta / mu);
  return std::pow(zeta * mu, 1.0 / 6) * std::pow(1 - a, 2.0 / 3) * std::pow(1 - b, 2.0 / 3) / (1 - zeta);
}
double hl_f1(double mu, double zeta) { return 1 - std::pow(1 - std::sqrt(zeta * mu), 2) / (1 - zeta); }
double hl_df1(double mu, double zeta) {
  return std::sqrt(zeta) * (1 - std::sqrt(zeta * mu)) / (std::sqrt(mu) * (1 - zeta));
}
double hl_d2f1(double mu, double zeta) { return -std::sqrt(zeta) / (2 * std::pow(mu, 1.5) * (1 - zeta)); }

namespace {
void check_hl(double mu, double zeta, double t) {
  if (!(zeta > 0 && zeta < 1)) throw std::invalid_argument("ScalingSpec: zeta must lie in (0,1)");
  if (!(t > 0 && t < 1)) throw std::invalid_argument("ScalingSpec: t must lie in (0,1)");
  if (!(mu > zeta && mu < 1 / zeta)) throw std::invalid_argument("ScalingSpec: need zeta < mu < 1/zeta");
}
}  // namespace

ScalingSpec ScalingSpec::hl(double mu, double zeta, double t) {
  check_hl(mu, zeta, t);
  ScalingSpec s;
  s.model = Model::HL;
  s.mu = mu, s.zeta = zeta, s.t = t;
  s.sigma = hl_sigma(mu, zeta);
  s.f = hl_f1(mu, zeta), s.df = hl_df1(mu, zeta), s.d2f = hl_d2f1(mu, zeta);
  return s;
}

ScalingSpec ScalingSpec::sv(double mu, double zeta, double q) {
  ScalingSpec s = hl(mu, zeta, q);
  s.model = Model::SV;
  s.f = 1 - s.f, s.df = -s.df, s.d2f = -s.d2f;
  return s;
}

ScalingSpec ScalingSpec::asep(double alpha, double L) {
  if (!(alpha > -1 && alpha < 1)) throw std::invalid_argument("ScalingSpec: alpha must lie in (-1,1)");
  if (!(L >= 0 && L < 1)) throw std::invalid_argument("ScalingSpec: L must lie in [0,1)");
  ScalingSpec s;
  s.model = Model::ASEP;
  s.alpha = alpha, s.L = L;
  s.sigma = std::pow(2.0, -4.0 / 3) * std::pow(1 - alpha * alpha, 2.0 / 3);
  s.f = (1 - alpha) * (1 - alpha) / 4, s.df = -(1 - alpha) / 2, s.d2f = 0.5;
  return s;
}

double ScalingSpec::origin(long N) const {
  double n = static_cast<double>(N);
  switch (model) {
    case Model::HL: return mu * n;
    case Model::SV: return 1 + mu * n;
    case Model::ASEP: return alpha * n;
  }
  return 0;
}

double ScalingSpec::bridge_slope() const { return model == Model::HL ? df : -df; }

double ScalingSpec::asep_time(long N) const { return static_cast<double>(N) / (1 - L); }

double RawCurve::eval(double x) const {
  if (v.empty() || !(x >= lo() - 1e-9 && x <= hi() + 1e-9)) {
    std::ostringstream os;
    os << "RawCurve: position " << x << " outside window [" << lo() << ", " << hi() << "]";
    throw std::out_of_range(os.str());
  }
  double u = std::clamp(x - x0, 0.0, static_cast<double>(v.size() - 1));
  auto i = static_cast<std::size_t>(std::floor(u));
  if (i + 1 >= v.size()) return v.back();
  double w = u - static_cast<double>(i);
  return v[i] + w * (v[i + 1] - v[i]);
}

double ScaledCurve::eval(double x) const {
  if (s.size() < 2) throw std::logic_error("ScaledCurve: empty grid");
  if (!(x >= s.front() - 1e-12 && x <= s.back() + 1e-12)) throw std::out_of_range("ScaledCurve: outside [-r,r]");
  double h = s[1] - s[0];
  double u = std::clamp((x - s.front()) / h, 0.0, static_cast<double>(s.size() - 1));
  auto i = static_cast<std::size_t>(std::floor(u));
  if (i + 1 >= s.size()) return f.back();
  double w = u - static_cast<double>(i);
  return f[i] + w * (f[i + 1] - f[i]);
}

double scale_point(const ScalingSpec& spec, long N, const RawCurve& raw, double s, double e) {
  const double n = static_cast<double>(N);
  const double pos = spec.origin(N) + s * std::pow(n, e);
  const double det = spec.f * n + spec.df * s * std::pow(n, e) + 0.5 * s * s * spec.d2f * std::pow(n, 2 * e - 1);
  const double val = raw.eval(pos);
  const double centered = spec.model == Model::HL ? val - det : det - val;
  return centered / (spec.sigma * std::cbrt(n));
}

ScaledCurve scale_curve(const ScalingSpec& spec, long N, const RawCurve& raw, double r, int half_points,
                        double e) {
  if (!(r > 0) || half_points < 1) throw std::invalid_argument("scale_curve: need r > 0 and half_points >= 1");
  const double n = static_cast<double>(N);
  if (spec.origin(N) - r * std::pow(n, e) < raw.lo() - 1e-9 || spec.origin(N) + r * std::pow(n, e) > raw.hi() + 1e-9)
    throw std::out_of_range("scale_curve: window overflow, [-r,r] does not fit the simulated window");
  ScaledCurve c;
  c.r = r;
  for (int k = -half_points; k <= half_points; ++k) {
    double s = r * k / half_points;
    c.s.push_back(s);
    c.f.push_back(scale_point(spec, N, raw, s, e));
  }
  return c;
}

ScaledCurve remove_parabola(const ScalingSpec& spec, const ScaledCurve& c) {
  ScaledCurve g = c;
  const double sign = spec.model == Model::HL ? 1 : -1;
  for (std::size_t i = 0; i < g.s.size(); ++i) g.f[i] = spec.sigma * c.f[i] + sign * g.s[i] * g.s[i] * spec.d2f / 2;
  return g;
}

// ---- empirical distributions ----

Ecdf::Ecdf(std::vector<double> samples) : x_(std::move(samples)) {
  if (x_.empty()) throw std::invalid_argument("Ecdf: no samples");
  std::sort(x_.begin(), x_.end());
}

double Ecdf::operator()(double x) const {
  return static_cast<double>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) / static_cast<double>(x_.size());
}

double Ecdf::left_limit(double x) const {
  return static_cast<double>(std::lower_bound(x_.begin(), x_.end(), x) - x_.begin()) / static_cast<double>(x_.size());
}

double Ecdf::mean() const {
  double s = 0;
  for (double v : x_) s += v;
  return s / static_cast<double>(x_.size());
}

double Ecdf::variance() const {
  if (x_.size() < 2) return 0;
  double m = mean(), s = 0;
  for (double v : x_) s += (v - m) * (v - m);
  return s / static_cast<double>(x_.size() - 1);
}

double Ecdf::quantile(double q) const {
  double h = (static_cast<double>(x_.size()) - 1) * std::clamp(q, 0.0, 1.0);
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, x_.size() - 1);
  return x_[lo] + (h - static_cast<double>(lo)) * (x_[hi] - x_[lo]);
}

double ks_distance(const Ecdf& e, const std::function<double(double)>& F) {
  if (e.size() < 2) throw std::invalid_argument("ks_distance: need at least 2 samples");
  const auto& x = e.sorted();
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = F(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_distance(const Ecdf& a, const Ecdf& b) {
  double d = 0;
  for (const auto* e : {&a, &b})
    for (double x : e->sorted()) d = std::max(d, std::abs(a(x) - b(x)));
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda < 0.18) return 1.0;
  double s = 0;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2 : -2) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n) {
  double en = std::sqrt(static_cast<double>(n));
  return kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
}

namespace {

double chi2_sf(double stat, long dof) {
  if (dof < 1) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// consecutive cells merged until each group reaches the threshold in key()
template <class Key>
std::vector<std::vector<std::size_t>> pool_cells(std::size_t n, double min_expected, Key key) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> cur;
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cur.push_back(i);
    acc += key(i);
    if (acc >= min_expected) {
      groups.push_back(cur);
      cur.clear();
      acc = 0;
    }
  }
  if (!cur.empty()) {
    if (groups.empty()) groups.push_back(cur);
    else groups.back().insert(groups.back().end(), cur.begin(), cur.end());
  }
  return groups;
}

}  // namespace

ChiSquare chi_square_gof(const std::vector<double>& counts, const std::vector<double>& probs, double min_expected) {
  if (counts.size() != probs.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
  double total = 0, ptot = 0;
  for (double c : counts) total += c;
  for (double p : probs) ptot += p;
  ChiSquare r;
  if (total <= 0) return r;
  auto groups = pool_cells(counts.size(), min_expected, [&](std::size_t i) { return total * probs[i] / ptot; });
  for (const auto& g : groups) {
    double o = 0, e = 0;
    for (auto i : g) o += counts[i], e += total * probs[i] / ptot;
    if (e > 0) r.stat += (o - e) * (o - e) / e;
    else if (o > 0) r.stat = INFINITY;
  }
  r.dof = static_cast<long>(groups.size()) - 1;
  r.p_value = std::isinf(r.stat) ? 0.0 : chi2_sf(r.stat, r.dof);
  return r;
}

ChiSquare chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b, double min_expected) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
  double A = 0, B = 0;
  for (double v : a) A += v;
  for (double v : b) B += v;
  ChiSquare r;
  if (A <= 0 || B <= 0) return r;
  const double fa = A / (A + B), fb = B / (A + B);
  auto groups = pool_cells(a.size(), min_expected,
                           [&](std::size_t i) { return std::min(fa, fb) * (a[i] + b[i]); });
  for (const auto& g : groups) {
    double oa = 0, ob = 0;
    for (auto i : g) oa += a[i], ob += b[i];
    double c = oa + ob;
    if (c <= 0) continue;
    double ea = c * fa, eb = c * fb;
    r.stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  r.dof = static_cast<long>(groups.size()) - 1;
  r.p_value = chi2_sf(r.stat, r.dof);
  return r;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("total_variation: size mismatch");
  double A = 0, B = 0;
  for (double v : a) A += v;
  for (double v : b) B += v;
  if (A <= 0 || B <= 0) throw std::invalid_argument("total_variation: empty histogram");
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] / A - b[i] / B);
  return d / 2;
}

// ---- Tracy-Widom reference ----

double TWReference::operator()(double y) const {
  if (x.empty()) throw std::logic_error("TWReference: empty table");
  if (y <= x.front()) return F.front();
  if (y >= x.back()) return F.back();
  auto it = std::upper_bound(x.begin(), x.end(), y);
  std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  double w = (y - x[i]) / (x[i + 1] - x[i]);
  return F[i] + w * (F[i + 1] - F[i]);
}

double TWReference::median() const {
  auto it = std::lower_bound(F.begin(), F.end(), 0.5);
  if (it == F.begin() || it == F.end()) throw std::logic_error("TWReference: median outside grid");
  std::size_t i = static_cast<std::size_t>(it - F.begin());
  double w = (0.5 - F[i - 1]) / (F[i] - F[i - 1]);
  return x[i - 1] + w * (x[i] - x[i - 1]);
}

nlohmann::json TWReference::to_json() const {
  return {{"n", n}, {"replicas", replicas}, {"mean", mean}, {"variance", variance}, {"x", x}, {"F", F}, {"stderr", stderr_}};
}

TWReference TWReference::from_json(const nlohmann::json& j) {
  TWReference r;
  r.n = j.at("n").get<int>();
  r.replicas = j.at("replicas").get<long>();
  r.mean = j.at("mean").get<double>();
  r.variance = j.at("variance").get<double>();
  r.x = j.at("x").get<std::vector<double>>();
  r.F = j.at("F").get<std::vector<double>>();
  r.stderr_ = j.at("stderr").get<std::vector<double>>();
  if (r.x.size() != r.F.size() || r.x.size() < 2) throw std::invalid_argument("TWReference: malformed table");
  return r;
}

std::string TWReference::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "x,F,stderr\n";
  for (std::size_t i = 0; i < x.size(); ++i) os << x[i] << ',' << F[i] << ',' << stderr_[i] << '\n';
  return os.str();
}

namespace {

// number of eigenvalues < x (LDL^T sign count)
long sturm_count(const std::vector<double>& a, const std::vector<double>& b, double x) {
  long cnt = 0;
  double d = 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double off = i ? b[i - 1] * b[i - 1] : 0.0;
    d = a[i] - x - (i ? off / d : 0.0);
    if (d == 0) d = -1e-300;
    if (d < 0) ++cnt;
  }
  return cnt;
}

double bisect_top(const std::vector<double>& a, const std::vector<double>& b, double lo, double hi, double tol) {
  const long n = static_cast<long>(a.size());
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (sturm_count(a, b, mid) == n) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double tridiag_max_eigenvalue(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.empty() || b.size() + 1 != a.size()) throw std::invalid_argument("tridiag_max_eigenvalue: bad sizes");
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double rad = (i ? std::abs(b[i - 1]) : 0.0) + (i < b.size() ? std::abs(b[i]) : 0.0);
    lo = std::min(lo, a[i] - rad);
    hi = std::max(hi, a[i] + rad);
  }
  return bisect_top(a, b, lo - 1e-12, hi + 1e-12, tol);
}

double tw_oracle_draw(Rng& rng, int n) {
  if (n < 2) throw std::invalid_argument("tw_oracle_draw: n must be >= 2");
  std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n) - 1);
  for (auto& v : a) v = rng.normal();
  for (int k = 0; k < n - 1; ++k) b[k] = rng.chi(2.0 * (n - 1 - k)) / std::numbers::sqrt2;
  const double edge = 2 * std::sqrt(static_cast<double>(n)), scale = std::pow(static_cast<double>(n), 1.0 / 6);
  const double tol = 1e-7 / scale;
  double lo = edge - 10 / scale, hi = edge + 10 / scale;
  double lam;
  if (sturm_count(a, b, lo) < n && sturm_count(a, b, hi) == n) lam = bisect_top(a, b, lo, hi, tol);
  else lam = tridiag_max_eigenvalue(a, b, tol);  // Gershgorin bracket
  return scale * (lam - edge);
}

TWReference tw_reference_build(const TwOracleParams& p) {
  if (p.replicas < 10000) throw std::invalid_argument("tw_reference_build: need at least 1e4 replicas");
  if (!(p.grid_step > 0) || !(p.grid_hi > p.grid_lo) || !(p.bandwidth > 0))
    throw std::invalid_argument("tw_reference_build: bad grid");
  TWReference ref;
  ref.n = p.n;
  ref.replicas = p.replicas;
  ref.samples = parallel_map<double>(p.replicas, p.workers, [&](long i) {
    Rng rng(derive_replica_seed(p.seed, static_cast<std::uint64_t>(i)));
    return tw_oracle_draw(rng, p.n);
  });
  std::sort(ref.samples.begin(), ref.samples.end());
  Ecdf e(ref.samples);
  ref.mean = e.mean();
  ref.variance = e.variance();
  const double nn = static_cast<double>(ref.samples.size());
  const double cut = 8 * p.bandwidth;
  const auto steps = static_cast<long>(std::llround((p.grid_hi - p.grid_lo) / p.grid_step));
  for (long k = 0; k <= steps; ++k) {
    double x = p.grid_lo + static_cast<double>(k) * p.grid_step;
    auto lo = std::lower_bound(ref.samples.begin(), ref.samples.end(), x - cut);
    auto hi = std::upper_bound(ref.samples.begin(), ref.samples.end(), x + cut);
    double s = static_cast<double>(lo - ref.samples.begin());
    for (auto it = lo; it != hi; ++it) s += 0.5 * std::erfc(-(x - *it) / (p.bandwidth * std::numbers::sqrt2));
    double F = s / nn;
    ref.x.push_back(x);
    ref.F.push_back(F);
    ref.stderr_.push_back(std::sqrt(F * (1 - F) / nn));
  }
  // enforce monotone table against rounding
  for (std::size_t i = 1; i < ref.F.size(); ++i) ref.F[i] = std::max(ref.F[i], ref.F[i - 1]);
  return ref;
}

// ---- curve diagnostics ----

nlohmann::json IncrementReport::to_json() const {
  return {{"r", r}, {"p", p}, {"curves", curves}, {"xi", xi}, {"variance", variance},
          {"target", target}, {"ratio", ratio}, {"ratio_stderr", ratio_stderr}};
}

IncrementReport increment_variance_diag(const std::vector<ScaledCurve>& curves, double r, double p) {
  if (curves.size() < 2) throw std::invalid_argument("increment_variance_diag: need at least 2 curves");
  IncrementReport rep;
  rep.r = r, rep.p = p;
  rep.curves = static_cast<long>(curves.size());
  rep.xi = {0.25, 0.5, 0.75};
  for (double xi : rep.xi) {
    std::vector<double> g;
    for (const auto& c : curves) {
      double a = c.eval(-r), b = c.eval(r);
      g.push_back(c.eval(2 * r * xi - r) - a - (b - a) * xi);
    }
    const double n = static_cast<double>(g.size());
    double m = 0;
    for (double v : g) m += v;
    m /= n;
    double m2 = 0, m4 = 0;
    for (double v : g) {
      double d2 = (v - m) * (v - m);
      m2 += d2, m4 += d2 * d2;
    }
    double var = m2 / (n - 1);
    m2 /= n, m4 /= n;
    double se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    double target = 2 * r * p * (1 - p) * xi * (1 - xi);
    rep.variance.push_back(var);
    rep.target.push_back(target);
    rep.ratio.push_back(target > 0 ? var / target : NAN);
    rep.ratio_stderr.push_back(target > 0 ? se / target : NAN);
  }
  return rep;
}

nlohmann::json TransversalReport::to_json() const {
  nlohmann::json v = nlohmann::json::object();
  for (const auto& [e, vals] : variance) v[std::to_string(e)] = vals;
  return {{"s", s}, {"N", N}, {"variance", v}, {"ratio_two_thirds", ratio_two_thirds},
          {"control_half_decreasing", control_half_decreasing},
          {"control_five_sixths_increasing", control_five_sixths_increasing}};
}

TransversalReport transversal_exponent_diag(const ScalingSpec& spec,
                                            const std::map<long, std::vector<RawCurve>>& raw_by_N, double s) {
  if (!(s > 0)) throw std::invalid_argument("transversal_exponent_diag: s must be positive");
  TransversalReport rep;
  rep.s = s;
  const std::vector<double> exps{0.5, 2.0 / 3.0, 5.0 / 6.0};
  for (const auto& [N, raws] : raw_by_N) {
    if (raws.size() < 2) throw std::invalid_argument("transversal_exponent_diag: need at least 2 curves per N");
    rep.N.push_back(N);
    for (double e : exps) {
      std::vector<double> d;
      for (const auto& raw : raws) d.push_back(scale_point(spec, N, raw, s, e) - scale_point(spec, N, raw, 0, e));
      rep.variance[e].push_back(Ecdf(d).variance());
    }
  }
  const auto& v = rep.variance[2.0 / 3.0];
  rep.ratio_two_thirds = *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
  const auto& h = rep.variance[0.5];
  const auto& f = rep.variance[5.0 / 6.0];
  rep.control_half_decreasing = rep.control_five_sixths_increasing = true;
  for (std::size_t i = 1; i < h.size(); ++i) {
    rep.control_half_decreasing = rep.control_half_decreasing && h[i] < h[i - 1];
    rep.control_five_sixths_increasing = rep.control_five_sixths_increasing && f[i] > f[i - 1];
  }
  return rep;
}

nlohmann::json AcceptanceReport::to_json() const {
  return {{"samples", z.size()}, {"exact", exact}, {"monte_carlo", monte_carlo},
          {"delta", delta}, {"prob_below", prob_below}, {"z", z}};
}

AcceptanceReport acceptance_probability_experiment(Rng& rng, const std::vector<std::pair<UpRightPath, UpRightPath>>& pairs,
                                                   long s1, double t, const std::vector<double>& delta_grid,
                                                   long mc_samples) {
  if (s1 < 1) throw std::invalid_argument("acceptance_probability_experiment: s1 must be >= 1");
  AcceptanceReport rep;
  rep.delta = delta_grid;
  for (const auto& [L1, L2] : pairs) {
    GibbsContext ctx{t, -s1, s1, full_S(-s1, s1), Boundary::infinite(), Boundary::of(L2)};
    ctx.validate();
    long a = L1.at(-s1), b = L1.at(s1);
    double z;
    // exact below 2e4 paths, Monte Carlo above
    if (bridge_count(BridgeSpec{-s1, s1, a, b}) <= 2e4) {
      z = acceptance_Z_exact(ctx, a, b);
      ++rep.exact;
    } else {
      z = acceptance_Z_mc(rng, ctx, a, b, mc_samples).estimate;
      ++rep.monte_carlo;
    }
    rep.z.push_back(z);
  }
  for (double d : delta_grid) {
    double c = 0;
    for (double z : rep.z) c += z < d;
    rep.prob_below.push_back(rep.z.empty() ? 0.0 : c / static_cast<double>(rep.z.size()));
  }
  return rep;
}

}  // namespace kpzlab
