#include "kpzlab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kpzlab {

UpRightPath::UpRightPath(long t0, std::vector<long> values) : t0_(t0), values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("UpRightPath: empty value list");
  for (std::size_t i = 1; i < values_.size(); ++i) {
    long d = values_[i] - values_[i - 1];
    if (d != 0 && d != 1) {
      std::ostringstream os;
      os << "UpRightPath: increment " << d << " at t=" << t0_ + static_cast<long>(i) - 1
         << " not in {0,1}";
      throw std::invalid_argument(os.str());
    }
  }
}

long UpRightPath::at(long t) const {
  if (t < t0_ || t > t1()) throw std::out_of_range("UpRightPath::at: t outside domain");
  return values_[static_cast<std::size_t>(t - t0_)];
}

double UpRightPath::eval(double s) const {
  if (s < t0_ || s > t1()) throw std::out_of_range("UpRightPath::eval: s outside domain");
  double fl = std::floor(s);
  long i = static_cast<long>(fl);
  if (i >= t1()) return static_cast<double>(values_.back());
  double w = s - fl;
  double lo = static_cast<double>(at(i)), hi = static_cast<double>(at(i + 1));
  return lo + w * (hi - lo);
}

UpRightPath make_path(long t0, std::vector<long> values) { return UpRightPath(t0, std::move(values)); }

void BridgeSpec::validate() const {
  if (t0 >= t1) throw std::invalid_argument("BridgeSpec: need t0 < t1");
  if (z1 - z0 < 0 || z1 - z0 > t1 - t0)
    throw std::invalid_argument("BridgeSpec: empty state space (need 0 <= z1-z0 <= t1-t0)");
}

double log_binomial(double n, double k) {
  if (k < 0 || k > n) return -INFINITY;
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

double bridge_count(const BridgeSpec& spec) {
  spec.validate();
  long n = spec.steps(), k = std::min(spec.ups(), spec.steps() - spec.ups());
  double c = 1;
  for (long i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

std::vector<UpRightPath> enumerate_bridges(const BridgeSpec& spec) {
  spec.validate();
  const long n = spec.steps(), k = spec.ups();
  std::vector<UpRightPath> out;
  // walk through all k-subsets of the n steps in lexicographic order
  std::vector<char> step(static_cast<std::size_t>(n), 0);
  std::fill(step.end() - k, step.end(), 1);
  do {
    std::vector<long> v(static_cast<std::size_t>(n + 1));
    v[0] = spec.z0;
    for (long i = 0; i < n; ++i) v[i + 1] = v[i] + step[i];
    out.emplace_back(spec.t0, std::move(v));
  } while (std::next_permutation(step.begin(), step.end()));
  return out;
}

UpRightPath sample_uniform_bridge(Rng& rng, const BridgeSpec& spec) {
  spec.validate();
  const long n = spec.steps(), k = spec.ups();
  std::vector<char> step(static_cast<std::size_t>(n), 0);
  std::fill(step.begin(), step.begin() + k, 1);
  rng.shuffle(step.begin(), step.end());
  std::vector<long> v(static_cast<std::size_t>(n + 1));
  v[0] = spec.z0;
  for (long i = 0; i < n; ++i) v[i + 1] = v[i] + step[i];
  return UpRightPath(spec.t0, std::move(v));
}

std::pair<long, long> bridge_range_at(const BridgeSpec& spec, long T) {
  spec.validate();
  if (T < spec.t0 || T > spec.t1) throw std::out_of_range("bridge_range_at: T outside [t0,t1]");
  long lo = std::max(spec.z0, spec.z1 - (spec.t1 - T));
  long hi = std::min(spec.z1, spec.z0 + (T - spec.t0));
  return {lo, hi};
}

double bridge_pmf_at(const BridgeSpec& spec, long T, long k) {
  auto [lo, hi] = bridge_range_at(spec, T);
  if (k < lo || k > hi) return 0.0;
  double l = log_binomial(T - spec.t0, k - spec.z0) + log_binomial(spec.t1 - T, spec.z1 - k) -
             log_binomial(spec.steps(), spec.ups());
  return std::exp(l);
}

UpRightPath sample_bridge_through(Rng& rng, const BridgeSpec& spec, long T, long k) {
  auto [lo, hi] = bridge_range_at(spec, T);
  if (k < lo || k > hi) {
    std::ostringstream os;
    os << "sample_bridge_through: k=" << k << " outside [" << lo << "," << hi << "]";
    throw std::invalid_argument(os.str());
  }
  std::vector<long> v;
  if (T > spec.t0) {
    v = sample_uniform_bridge(rng, {spec.t0, T, spec.z0, k}).values();
  } else {
    v = {spec.z0};
  }
  if (T < spec.t1) {
    auto right = sample_uniform_bridge(rng, {T, spec.t1, k, spec.z1}).values();
    v.insert(v.end(), right.begin() + 1, right.end());
  }
  return UpRightPath(spec.t0, std::move(v));
}

double modulus_of_continuity(const std::vector<double>& f, double a, double b, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("modulus_of_continuity: delta must be positive");
  if (f.size() < 2) return 0.0;
  const std::size_t n = f.size();
  const double h = (b - a) / static_cast<double>(n - 1);
  if (h > delta * (1 + 1e-12))
    throw std::invalid_argument("modulus_of_continuity: grid spacing exceeds delta");
  auto interp = [&](double x) {
    double u = (x - a) / h;
    if (u <= 0) return f.front();
    if (u >= static_cast<double>(n - 1)) return f.back();
    auto i = static_cast<std::size_t>(u);
    double w = u - static_cast<double>(i);
    return i + 1 < n ? f[i] + w * (f[i + 1] - f[i]) : f[i];
  };
  // a PL difference f(x+d)-f(x) peaks at d = delta or at a breakpoint, so
  // grid-grid pairs plus grid-to-(grid +- delta) pairs are enough
  const long reach = static_cast<long>(std::floor(delta / h + 1e-9));
  double w = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (long d = 1; d <= reach && i + d < n; ++d) w = std::max(w, std::abs(f[i + d] - f[i]));
    double x = a + h * static_cast<double>(i);
    if (x + delta <= b) w = std::max(w, std::abs(interp(x + delta) - f[i]));
    else w = std::max(w, std::abs(f.back() - f[i]));
    if (x - delta >= a) w = std::max(w, std::abs(interp(x - delta) - f[i]));
    else w = std::max(w, std::abs(f.front() - f[i]));
  }
  return w;
}

double modulus_of_continuity(const UpRightPath& p, double delta) {
  std::vector<double> f(p.values().begin(), p.values().end());
  return modulus_of_continuity(f, static_cast<double>(p.t0()), static_cast<double>(p.t1()), delta);
}

std::string path_to_csv(const UpRightPath& p) {
  std::ostringstream os;
  os << "t,value\n";
  for (long t = p.t0(); t <= p.t1(); ++t) os << t << ',' << p.at(t) << '\n';
  return os.str();
}

nlohmann::json path_to_json(const UpRightPath& p) {
  return nlohmann::json{{"t0", p.t0()}, {"values", p.values()}};
}

UpRightPath path_from_json(const nlohmann::json& j) {
  return UpRightPath(j.at("t0").get<long>(), j.at("values").get<std::vector<long>>());
}

}  // namespace kpzlab
