#include "kpzlab/asep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kpzlab {

TruncationPolicy TruncationPolicy::for_time(double T) {
  if (!(T >= 0)) throw std::invalid_argument("TruncationPolicy: T must be >= 0");
  TruncationPolicy p;
  long a = static_cast<long>(std::ceil(2 * T)), b = static_cast<long>(std::ceil(10 * std::sqrt(T)));
  p.M0 = a + b + 10;
  std::ostringstream os;
  os << "M0 = ceil(2T) + ceil(10 sqrt T) + 10 = " << a << " + " << b << " + 10 = " << p.M0 << " at T = " << T
     << "; particle M0 starts at " << -(p.M0 - 1)
     << "; only its left jumps differ from the infinite system; heights trusted on [-T/2, inf)"
        " while particle M0 stays left of -T/2";
  p.log = os.str();
  return p;
}

TruncationPolicy TruncationPolicy::custom(long M0) {
  if (M0 < 1) throw std::invalid_argument("TruncationPolicy: M0 must be >= 1");
  TruncationPolicy p;
  p.M0 = M0;
  p.log = "custom M0 = " + std::to_string(M0) + " (no truncation bound claimed)";
  return p;
}

bool AsepState::ordered() const {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] >= x[i - 1]) return false;
  return true;
}

AsepState step_initial(const TruncationPolicy& policy, double t) {
  if (!(t >= 0 && t < 1)) throw std::invalid_argument("simulate_asep: t must lie in [0,1)");
  AsepState s;
  s.t = t;
  s.policy = policy;
  s.x.resize(static_cast<std::size_t>(policy.M0));
  for (long m = 0; m < policy.M0; ++m) s.x[m] = -m;
  s.last_max = s.x.back();
  return s;
}

namespace {

// unordered set of particle indices with O(1) insert / erase
struct IndexSet {
  std::vector<long> items, where;
  explicit IndexSet(long n) : where(static_cast<std::size_t>(n), -1) {}
  void insert(long i) {
    if (where[i] >= 0) return;
    where[i] = static_cast<long>(items.size());
    items.push_back(i);
  }
  void erase(long i) {
    long k = where[i];
    if (k < 0) return;
    long last = items.back();
    items[k] = last;
    where[last] = k;
    items.pop_back();
    where[i] = -1;
  }
  void set(long i, bool on) { on ? insert(i) : erase(i); }
  std::size_t size() const { return items.size(); }
};

}  // namespace

AsepState simulate_asep(Rng& rng, double t, double T, const TruncationPolicy& policy) {
  if (!(T >= 0)) throw std::invalid_argument("simulate_asep: T must be >= 0");
  AsepState s = step_initial(policy, t);
  auto& x = s.x;
  const long n = policy.M0;
  IndexSet right(n), left(n);
  auto can_right = [&](long m) { return m == 0 || x[m - 1] > x[m] + 1; };
  auto can_left = [&](long m) { return t > 0 && (m == n - 1 || x[m + 1] < x[m] - 1); };
  auto refresh = [&](long m) {
    if (m < 0 || m >= n) return;
    right.set(m, can_right(m));
    left.set(m, can_left(m));
  };
  for (long m = 0; m < n; ++m) refresh(m);

  double now = 0;
  for (;;) {
    double total = static_cast<double>(right.size()) + t * static_cast<double>(left.size());
    if (total <= 0) break;
    now += rng.exponential(total);
    if (now > T) break;
    long m;
    if (rng.uniform() * total < static_cast<double>(right.size())) {
      m = right.items[rng.below(right.size())];
      ++x[m];
    } else {
      m = left.items[rng.below(left.size())];
      --x[m];
    }
    ++s.events;
    refresh(m - 1);
    refresh(m);
    refresh(m + 1);
    if (m == n - 1) s.last_max = std::max(s.last_max, x[m]);
  }
  s.time = T;
  return s;
}

long height_at(const AsepState& s, long x) {
  if (static_cast<double>(x) < s.reliable_left())
    throw std::domain_error("height: x left of the reliable window [-T/2, inf) (right of particle M0 at T = 0); " + s.policy.log);
  if (!s.truncation_ok())
    throw std::domain_error("height: truncated particle M0 entered the reliable window; " + s.policy.log);
  // x is strictly decreasing
  auto it = std::lower_bound(s.x.begin(), s.x.end(), x, [](long a, long v) { return a >= v; });
  return static_cast<long>(it - s.x.begin());
}

double height(const AsepState& s, double x) {
  double fl = std::floor(x);
  long i = static_cast<long>(fl);
  double lo = static_cast<double>(height_at(s, i));
  if (fl == x) return lo;
  double hi = static_cast<double>(height_at(s, i + 1));
  return lo + (x - fl) * (hi - lo);
}

bool check_event_identity(const AsepState& s, long n_lo, long n_hi) {
  for (long v = n_lo; v <= n_hi; ++v) {
    long h = height_at(s, v);
    for (long m = 1; m <= static_cast<long>(s.x.size()); ++m)
      if ((h >= m) != (s.x[m - 1] >= v)) return false;
  }
  return true;
}

std::pair<double, double> tw_centering(double sigma) {
  if (!(sigma > 0 && sigma < 1)) throw std::invalid_argument("tw_centering: sigma must lie in (0,1)");
  double r = std::sqrt(sigma);
  return {1 - 2 * r, std::pow(sigma, -1.0 / 6) * std::pow(1 - r, 2.0 / 3)};
}

std::string height_to_csv(const AsepState& s, long x_lo, long x_hi) {
  std::ostringstream os;
  os << "x,h\n";
  for (long v = x_lo; v <= x_hi; ++v) os << v << ',' << height_at(s, v) << '\n';
  return os.str();
}

}  // namespace kpzlab
