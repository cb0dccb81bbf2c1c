#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "kpzlab/analysis.hpp"
#include "kpzlab/asep.hpp"
#include "kpzlab/experiments.hpp"

using namespace kpzlab;

TEST_CASE("analysis: ecdf") {
  Ecdf e({3, 1, 2, 2});
  CHECK(e(0.5) == 0.0);
  CHECK(e(2) == 0.75);
  CHECK(e.left_limit(2) == 0.25);
  CHECK(e.mean() == doctest::Approx(2.0));
  CHECK(e.variance() == doctest::Approx(2.0 / 3));
  CHECK(e.quantile(0.5) == doctest::Approx(2.0));
  CHECK_THROWS(Ecdf({}));
}

TEST_CASE("analysis: KS against uniform samples") {
  Rng rng(1);
  std::vector<double> u;
  for (int i = 0; i < 5000; ++i) u.push_back(rng.uniform());
  Ecdf e(u);
  double d = ks_distance(e, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(ks_pvalue(d, u.size()) > 1e-3);
  // known critical value: P(K > 1.358) ~ 0.05
  CHECK(kolmogorov_survival(1.358) == doctest::Approx(0.05).epsilon(0.01));
  // deterministic: all mass at 0.5 against uniform
  Ecdf pt({0.5, 0.5});
  CHECK(ks_distance(pt, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.5));
  std::vector<double> v;
  for (int i = 0; i < 5000; ++i) v.push_back(rng.uniform() + 0.2);
  CHECK(ks_distance(e, Ecdf(v)) == doctest::Approx(0.2).epsilon(0.15));
}

TEST_CASE("analysis: chi-square and total variation") {
  auto c = chi_square_gof({25, 25, 25, 25}, {0.25, 0.25, 0.25, 0.25});
  CHECK(c.stat == 0.0);
  CHECK(c.dof == 3);
  CHECK(c.p_value == doctest::Approx(1.0));
  // stat = 4 with 1 dof: p = 0.0455
  auto d = chi_square_gof({60, 40}, {0.5, 0.5});
  CHECK(d.stat == doctest::Approx(4.0));
  CHECK(d.p_value == doctest::Approx(0.0455).epsilon(0.01));
  // small cells are pooled
  auto e = chi_square_gof({98, 1, 1}, {0.98, 0.01, 0.01});
  CHECK(e.dof == 0);
  CHECK(chi_square_gof({490, 5, 5}, {0.98, 0.01, 0.01}).dof == 2);
  CHECK(total_variation({1, 1}, {2, 0}) == doctest::Approx(0.5));
  auto t = chi_square_two_sample({50, 50}, {50, 50});
  CHECK(t.p_value == doctest::Approx(1.0));
}

TEST_CASE("analysis: tridiagonal top eigenvalue against a dense solver") {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 2 + static_cast<int>(rng.below(30));
    std::vector<double> a(n), b(n - 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = a[i] = rng.normal();
    for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = b[i] = rng.normal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(tridiag_max_eigenvalue(a, b, 1e-12) == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-9));
  }
}

TEST_CASE("analysis: TW oracle moments") {
  TwOracleParams p;
  p.n = 200;
  p.replicas = 10000;
  auto tw = tw_reference_build(p);
  // GUE Tracy-Widom: mean -1.7711, variance 0.8132
  CHECK(std::abs(tw.mean + 1.7711) < 0.06);
  CHECK(std::abs(tw.variance - 0.8132) < 0.06);
  CHECK(tw(-20) == 0.0);
  CHECK(tw(20) == 1.0);
  for (std::size_t i = 1; i < tw.F.size(); ++i) REQUIRE(tw.F[i] >= tw.F[i - 1]);
  auto back = TWReference::from_json(tw.to_json());
  CHECK(back(-1.5) == doctest::Approx(tw(-1.5)));
  CHECK(tw.to_csv().rfind("x,F,stderr\n", 0) == 0);
  // a reference shifted by one unit is far in KS
  Rng rng(3);
  std::vector<double> shifted;
  for (int i = 0; i < 4000; ++i) shifted.push_back(tw.samples[rng.below(tw.samples.size())] + 1.0);
  CHECK(ks_distance(Ecdf(shifted), [&](double y) { return tw(y); }) >= 0.19);
  p.replicas = 100;
  CHECK_THROWS(tw_reference_build(p));
}

TEST_CASE("analysis: ASEP constants and centering agree") {
  auto s = ScalingSpec::asep(0.5, 0.4);
  CHECK(s.sigma == doctest::Approx(std::pow(2.0, -4.0 / 3) * std::pow(0.75, 2.0 / 3)));
  CHECK(s.f == doctest::Approx(1.0 / 16));
  CHECK(s.df == doctest::Approx(-0.25));
  CHECK(s.d2f == doctest::Approx(0.5));
  CHECK(s.asep_time(60) == doctest::Approx(100.0));
  // f3 integrates the rarefaction density (1 - u)/2 from alpha to 1
  for (double a : {-0.5, 0.0, 0.3, 0.7}) {
    auto sa = ScalingSpec::asep(a, 0.2);
    CHECK(sa.f == doctest::Approx((1 - a) * (1 - a) / 4));
    double h = 1e-5;
    auto sp = ScalingSpec::asep(a + h, 0.2), sm = ScalingSpec::asep(a - h, 0.2);
    CHECK((sp.f - sm.f) / (2 * h) == doctest::Approx(sa.df).epsilon(1e-6));
  }
  // x_m centering at sigma = m/T against the height scaling: h(c1 T) ~ sigma T
  double sigma = 0.25;
  auto [c1, c2] = tw_centering(sigma);
  double alpha = c1;
  CHECK((1 - alpha) * (1 - alpha) / 4 == doctest::Approx(sigma));
  CHECK(c2 > 0);
}

TEST_CASE("analysis: HL limit shape derivatives") {
  for (double mu : {0.7, 1.0, 1.4})
    for (double z : {0.3, 0.5}) {
      double h = 1e-5;
      CHECK((hl_f1(mu + h, z) - hl_f1(mu - h, z)) / (2 * h) == doctest::Approx(hl_df1(mu, z)).epsilon(1e-6));
      CHECK((hl_df1(mu + h, z) - hl_df1(mu - h, z)) / (2 * h) == doctest::Approx(hl_d2f1(mu, z)).epsilon(1e-6));
      auto hl = ScalingSpec::hl(mu, z, 0.5);
      auto sv = ScalingSpec::sv(mu, z, 0.5);
      CHECK(sv.f == doctest::Approx(1 - hl.f));
      CHECK(sv.df == doctest::Approx(-hl.df));
      CHECK(sv.bridge_slope() == doctest::Approx(hl.bridge_slope()));
      CHECK(hl.sigma > 0);
    }
  CHECK(hl_f1(1.0, 0.5) == doctest::Approx(1 - std::pow(1 - std::sqrt(0.5), 2) / 0.5));
  CHECK_THROWS(ScalingSpec::hl(0.2, 0.5, 0.5));
}

TEST_CASE("analysis: scaling a deterministic curve") {
  // raw = exact deterministic profile, so f_N vanishes identically
  auto spec = ScalingSpec::sv(1.0, 0.5, 0.5);
  const long N = 1000;
  RawCurve raw;
  raw.x0 = 1;
  for (int x = 1; x <= 3000; ++x) {
    double s = (x - spec.origin(N)) / std::pow(1000.0, 2.0 / 3);
    raw.v.push_back(spec.f * N + spec.df * s * 100 + 0.5 * s * s * spec.d2f * 10);
  }
  auto c = scale_curve(spec, N, raw, 2.0, 8);
  for (double f : c.f) CHECK(std::abs(f) < 1e-9);
  // one lattice unit of extra height shifts f by -1/(sigma N^{1/3})
  for (auto& v : raw.v) v += 1;
  CHECK(scale_point(spec, N, raw, 0) == doctest::Approx(-1 / (spec.sigma * 10)));
  auto g = remove_parabola(spec, scale_curve(spec, N, raw, 1.0, 4));
  CHECK(g.f.front() == doctest::Approx(-1 / 10.0 - spec.d2f / 2).epsilon(1e-9));
  CHECK_THROWS_AS(scale_curve(spec, N, raw, 50.0, 4), std::out_of_range);
}

TEST_CASE("analysis: Bernoulli bridge increments") {
  const double p = 0.5, r = 1.0;
  auto curves = bernoulli_g_curves(p, 512, r, 4000, 77);
  auto rep = increment_variance_diag(curves, r, p);
  const double L = std::round(2 * r * 64.0);
  for (std::size_t i = 0; i < rep.xi.size(); ++i) {
    // uniform bridge on L steps carries an extra L/(L-1)
    CHECK(std::abs(rep.ratio[i] - L / (L - 1)) < 4 * rep.ratio_stderr[i]);
    CHECK(rep.target[i] == doctest::Approx(2 * r * p * (1 - p) * rep.xi[i] * (1 - rep.xi[i])));
  }
}

TEST_CASE("analysis: transversal report on synthetic curves") {
  // Brownian-like curves scaled at 2/3 give N-independent variance
  auto spec = ScalingSpec::sv(1.0, 0.5, 0.5);
  std::map<long, std::vector<RawCurve>> raws;
  Rng rng(4);
  for (long N : {64, 512}) {
    for (int k = 0; k < 400; ++k) {
      RawCurve c;
      c.x0 = 1;
      double h = 0;
      int X = static_cast<int>(spec.origin(N) + std::pow(static_cast<double>(N), 5.0 / 6)) + 2;
      for (int x = 1; x <= X; ++x) {
        double s = (x - spec.origin(N)) / std::pow(static_cast<double>(N), 2.0 / 3);
        c.v.push_back(spec.f * N + spec.df * s * std::pow(static_cast<double>(N), 2.0 / 3) +
                      0.5 * s * s * spec.d2f * std::cbrt(static_cast<double>(N)) + h);
        h += rng.normal() * 0.5;
      }
      raws[N].push_back(c);
    }
  }
  auto rep = transversal_exponent_diag(spec, raws, 1.0);
  CHECK(rep.N.size() == 2);
  CHECK(rep.variance.size() == 3);
  CHECK(rep.ratio_two_thirds > 0.7);
  CHECK(rep.ratio_two_thirds < 1.4);
  CHECK(rep.control_half_decreasing);
  CHECK(rep.control_five_sixths_increasing);
}
