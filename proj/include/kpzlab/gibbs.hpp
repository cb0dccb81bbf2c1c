/*
 * Hall-Littlewood Gibbs weight, acceptance probability, rejection
 * resampling and exhaustive checks of the weak monotonicity inequalities.
 */
#ifndef KPZLAB_GIBBS_HPP
#define KPZLAB_GIBBS_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpzlab/paths.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

// A neighbouring curve, or the +infinity / -infinity sentinel.
struct Boundary {
  std::optional<UpRightPath> path;
  static Boundary infinite() { return {}; }
  static Boundary of(UpRightPath p) { return Boundary{std::move(p)}; }
  bool is_infinite() const { return !path.has_value(); }
};

struct GibbsContext {
  double t = 0.5;
  long T0 = 0, T1 = 1;
  std::vector<long> S;  // sorted subset of [T0+1, T1]
  Boundary top;         // infinite means +infinity
  Boundary bottom;      // infinite means -infinity

  void validate() const;
};

// S = [T0+1, T1]
std::vector<long> full_S(long T0, long T1);
GibbsContext make_context(double t, long T0, long T1, Boundary top, Boundary bottom);

struct LineEnsemble {
  std::vector<UpRightPath> curves;  // L_1 >= L_2 >= ...
  bool ordered() const;
};

struct ResampleReport {
  UpRightPath accepted_path;
  long trials = 0;
  double acceptance_estimate = 0;  // running mean of W over the trials
};

class EnumerationGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MaxTrialsError : public std::runtime_error {
 public:
  MaxTrialsError(const std::string& msg, double estimate)
      : std::runtime_error(msg), running_estimate(estimate) {}
  double running_estimate;
};

constexpr double kEnumerationGuard = 2e6;
constexpr double kTieTolerance = 1e-12;

// t^d, through logs once d > 64
double t_power(double t, long d);

double weight_W(const GibbsContext& ctx, const UpRightPath& ell);

double acceptance_Z_exact(const GibbsContext& ctx, long a, long b, double guard = kEnumerationGuard);

struct McEstimate {
  double estimate = 0;
  double stderr_ = 0;
};
McEstimate acceptance_Z_mc(Rng& rng, const GibbsContext& ctx, long a, long b, long n_samples);

ResampleReport gibbs_resample(Rng& rng, const GibbsContext& ctx, long a, long b, long max_trials);

std::map<UpRightPath, double> conditional_law_exact(const GibbsContext& ctx, long a, long b,
                                                    double guard = kEnumerationGuard);

// c(t) = prod_{i>=1} (1 - t^i), truncated once the tail bound is below tol
double euler_c(double t, double tol = 1e-15);

struct MonotoneRow {
  long T, k1, k2;
  double lhs, rhs;
  bool pass;
};

struct MonotoneReport {
  std::vector<MonotoneRow> lemma_rows;  // c(t) E[W|L(T)=k1] <= E[W|L(T)=k2]
  long lemma_failures = 0;
  long set_checks = 0, set_failures = 0;      // set version, |A|,|B| <= 3
  long tail_checks = 0, tail_failures = 0;    // P(L(T)>=alpha) >= c(t) P_free(L(T)>=alpha)
  double c = 0;
  std::string to_csv() const;
  long failures() const { return lemma_failures + set_failures + tail_failures; }
};

// top = +infinity; spec carries (t1, t2, a, b); bottom lives on [t1, t2]
MonotoneReport verify_monotone_lemma(double t, const BridgeSpec& spec, const UpRightPath& bottom,
                                     const std::vector<long>& S, double tol = kTieTolerance);

// The flat-then-up bottom curve on [0, 2n] together with the two test paths
// ell' (= bottom) and ell'' (up then flat).
struct CounterexampleInstance {
  BridgeSpec spec;
  UpRightPath bottom, ell_low, ell_high;
};
CounterexampleInstance slope_counterexample(long n);

// Exhaustive sweep with t1 = 0: t2 in [2, n_max], every bottom curve with
// values in [0, box], a in [bottom(0), box], b in [max(a, bottom(t2)), min(a + t2, box)],
// every subset S of [1, t2].
struct MonotoneSuiteReport {
  long instances = 0, lemma_checks = 0, set_checks = 0, tail_checks = 0;
  long failures = 0;
  double worst_margin = 0;  // min over lemma checks of rhs - lhs
};
MonotoneSuiteReport verify_monotone_suite(double t, int n_max, int box, double tol = kTieTolerance);

}  // namespace kpzlab

#endif
