/*
 * KPZ scaling maps, empirical distribution tools, a Monte Carlo Tracy-Widom
 * GUE reference and the curve diagnostics.
 */
#ifndef KPZLAB_ANALYSIS_HPP
#define KPZLAB_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpzlab/gibbs.hpp"
#include "kpzlab/paths.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

enum class Model { HL, SV, ASEP };
std::string model_name(Model m);

struct ScalingSpec {
  Model model = Model::HL;
  double mu = 1, zeta = 0.5, t = 0.5;  // HL, SV
  double alpha = 0.5, L = 0.5;         // ASEP
  double sigma = 0, f = 0, df = 0, d2f = 0;

  static ScalingSpec hl(double mu, double zeta, double t);
  static ScalingSpec sv(double mu, double zeta, double q);
  static ScalingSpec asep(double alpha, double L);

  // macroscopic position of s = 0 in lattice units: mu N, 1 + mu N, alpha N
  double origin(long N) const;
  // slope of the good sequence: f1' (HL, SV) or -f3' (ASEP)
  double bridge_slope() const;
  // ASEP time horizon N / (1 - L)
  double asep_time(long N) const;
};

// f1, f2 = 1 - f1 and derivatives; sigma_mu
double hl_sigma(double mu, double zeta);
double hl_f1(double mu, double zeta);
double hl_df1(double mu, double zeta);
double hl_d2f1(double mu, double zeta);

// raw lattice curve sampled at x0, x0 + 1, ..., interpolated in between
struct RawCurve {
  double x0 = 0;
  std::vector<double> v;
  double lo() const { return x0; }
  double hi() const { return x0 + static_cast<double>(v.size()) - 1; }
  double eval(double x) const;  // throws std::out_of_range
};

struct ScaledCurve {
  double r = 1;
  std::vector<double> s, f;  // uniform grid on [-r, r]
  double eval(double x) const;
};

// f_N on a uniform grid of 2 * half_points + 1 points.  exponent replaces
// 2/3 in the spatial scaling (and the parabola term accordingly).
ScaledCurve scale_curve(const ScalingSpec& spec, long N, const RawCurve& raw, double r, int half_points = 32,
                        double exponent = 2.0 / 3.0);
// f_N at a single s
double scale_point(const ScalingSpec& spec, long N, const RawCurve& raw, double s, double exponent = 2.0 / 3.0);
// g = sigma f -/+ parabola: the curve whose pinned increments are compared to a bridge
ScaledCurve remove_parabola(const ScalingSpec& spec, const ScaledCurve& c);

// ---- empirical distributions ----

class Ecdf {
 public:
  explicit Ecdf(std::vector<double> samples);
  double operator()(double x) const;  // right-continuous
  double left_limit(double x) const;
  const std::vector<double>& sorted() const { return x_; }
  std::size_t size() const { return x_.size(); }
  double mean() const;
  double variance() const;
  double quantile(double q) const;

 private:
  std::vector<double> x_;
};

// sup_x |F_n(x) - F(x)|, checked on both sides of every jump (F continuous)
double ks_distance(const Ecdf& e, const std::function<double(double)>& F);
// sup over the pooled jump points of |F_a - F_b|
double ks_distance(const Ecdf& a, const Ecdf& b);
// P(K > lambda) for the Kolmogorov distribution
double kolmogorov_survival(double lambda);
// asymptotic one-sample p-value with the Stephens correction
double ks_pvalue(double d, std::size_t n);

struct ChiSquare {
  double stat = 0;
  long dof = 0;
  double p_value = 1;
};
// counts against probabilities; cells with expected count < min_expected are pooled
ChiSquare chi_square_gof(const std::vector<double>& counts, const std::vector<double>& probs,
                         double min_expected = 5);
// homogeneity of two count vectors over the same cells
ChiSquare chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                double min_expected = 5);
// total variation between two normalized count vectors
double total_variation(const std::vector<double>& a, const std::vector<double>& b);

// ---- Tracy-Widom reference ----

struct TwOracleParams {
  int n = 1000;
  long replicas = 100000;
  std::uint64_t seed = 20240601;
  int workers = 1;
  double grid_lo = -8, grid_hi = 6, grid_step = 0.01;
  double bandwidth = 0.02;  // Gaussian kernel smoothing of the ECDF
};

struct TWReference {
  std::vector<double> x, F, stderr_;
  std::vector<double> samples;  // sorted raw oracle draws, not serialized
  double mean = 0, variance = 0;
  long replicas = 0;
  int n = 0;
  double operator()(double y) const;
  double median() const;
  nlohmann::json to_json() const;
  static TWReference from_json(const nlohmann::json& j);
  std::string to_csv() const;  // "x,F,stderr"
};

// largest eigenvalue of the symmetric tridiagonal (diag a, offdiag b) by Sturm bisection
double tridiag_max_eigenvalue(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-10);
// n^{1/6}(lambda_max - 2 sqrt n) for one beta = 2 tridiagonal draw
double tw_oracle_draw(Rng& rng, int n);
TWReference tw_reference_build(const TwOracleParams& params);

// ---- curve diagnostics ----

struct IncrementReport {
  double r = 1, p = 0.5;
  std::vector<double> xi, variance, target, ratio, ratio_stderr;
  long curves = 0;
  nlohmann::json to_json() const;
};
// G(h)(xi) = h(2 r xi - r) - h(-r) - (h(r) - h(-r)) xi at xi in {1/4, 1/2, 3/4},
// target 2 r p (1 - p) xi (1 - xi)
IncrementReport increment_variance_diag(const std::vector<ScaledCurve>& g_curves, double r, double p);

struct TransversalReport {
  double s = 1;
  std::vector<long> N;
  std::map<double, std::vector<double>> variance;  // exponent -> Var(f_N(s) - f_N(0)) per N
  double ratio_two_thirds = 0;                      // max / min over N
  bool control_half_decreasing = false, control_five_sixths_increasing = false;
  nlohmann::json to_json() const;
};
TransversalReport transversal_exponent_diag(const ScalingSpec& spec,
                                            const std::map<long, std::vector<RawCurve>>& raw_by_N, double s);

struct AcceptanceReport {
  std::vector<double> z;  // one estimate per ensemble sample
  std::vector<double> delta, prob_below;
  long exact = 0, monte_carlo = 0;
  nlohmann::json to_json() const;
};
// (L1, L2) pairs on [-s1, s1]; Z_t(-s1, s1, L1(-s1), L1(s1), +inf, L2; [-s1+1, s1])
AcceptanceReport acceptance_probability_experiment(Rng& rng, const std::vector<std::pair<UpRightPath, UpRightPath>>& pairs,
                                                   long s1, double t, const std::vector<double>& delta_grid,
                                                   long mc_samples = 20000);

}  // namespace kpzlab

#endif
