#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "kpzlab/analysis.hpp"
#include "kpzlab/coupling.hpp"

using namespace kpzlab;

namespace {
double choose(long n, long k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}
}  // namespace

TEST_CASE("coupling: conditional midpoint pmf") {
  auto p = conditional_midpoint_pmf(4, 2, 2);
  REQUIRE(p.size() == 3);
  CHECK(p[0] == doctest::Approx(1.0 / 6));
  CHECK(p[1] == doctest::Approx(2.0 / 3));
  CHECK(p[2] == doctest::Approx(1.0 / 6));
  auto z0 = conditional_midpoint_pmf(10, 5, 0);
  CHECK(z0[0] == 1.0);
  for (long n : {7, 16, 31})
    for (long m : {n / 2, n / 3})
      for (long z = 0; z <= n; ++z) {
        auto q = conditional_midpoint_pmf(n, m, z);
        double s = 0;
        for (std::size_t w = 0; w < q.size(); ++w) {
          double exact = choose(m, static_cast<long>(w)) * choose(n - m, z - static_cast<long>(w)) / choose(n, z);
          CHECK(q[w] == doctest::Approx(exact).epsilon(1e-12));
          s += q[w];
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
        if (2 * m == n)
          for (long w = 0; w <= std::min(m, z); ++w)
            if (z - w <= m) CHECK(q[w] == doctest::Approx(q[z - w]).epsilon(1e-12));
      }
}

TEST_CASE("coupling: quantile coupling marginal and monotonicity") {
  Rng rng(3);
  auto pmf = conditional_midpoint_pmf(16, 8, 8);
  std::vector<double> counts(pmf.size(), 0);
  for (int i = 0; i < 100000; ++i) counts[quantile_couple_midpoint(rng.normal(), 16, 8, 8, 0.5).W] += 1;
  CHECK(chi_square_gof(counts, pmf).p_value > 1e-3);
  for (int i = 0; i < 100; ++i) CHECK(quantile_couple_midpoint(rng.normal(), 16, 8, 0, 0.5).W == 0);
  long prev = -1;
  for (double g = -6; g <= 6; g += 0.01) {
    long w = quantile_couple_midpoint(g, 40, 20, 17, 0.3).W;
    CHECK(w >= prev);
    prev = w;
  }
  CHECK_THROWS_AS(quantile_couple_midpoint(0.0, 16, 3, 8, 0.5), std::invalid_argument);
  CHECK_NOTHROW(quantile_couple_midpoint(0.0, 16, 3, 8, 0.5, true));
}

TEST_CASE("coupling: walk midpoints at n = 16 for every endpoint") {
  Rng rng(4);
  for (long z = 0; z <= 16; ++z) {
    auto pmf = conditional_midpoint_pmf(16, 8, z);
    std::vector<double> counts(pmf.size(), 0);
    for (int i = 0; i < 20000; ++i) counts[kmt_couple(rng, 16, z, 0.5).walk.at(8)] += 1;
    CHECK(chi_square_gof(counts, pmf).p_value > 1e-3);
  }
}

TEST_CASE("coupling: bridge covariance") {
  Rng rng(5);
  const double p = 0.3, var = p * (1 - p);
  const int n = 40000;
  const long len = 16;
  std::vector<std::vector<double>> b(3);
  for (int i = 0; i < n; ++i) {
    auto s = kmt_couple(rng, len, 5, p);
    REQUIRE(s.bridge.front() == 0.0);
    REQUIRE(std::abs(s.bridge.back()) < 1e-12);
    for (int k = 0; k < 3; ++k) b[k].push_back(s.bridge[(k + 1) * len / 4]);
  }
  for (int a = 0; a < 3; ++a)
    for (int c = a; c < 3; ++c) {
      double sa = (a + 1) / 4.0, su = (c + 1) / 4.0;
      double target = var * (std::min(sa, su) - sa * su);
      std::vector<double> prod(n);
      double ma = 0, mc = 0;
      for (int i = 0; i < n; ++i) ma += b[a][i], mc += b[c][i];
      ma /= n, mc /= n;
      for (int i = 0; i < n; ++i) prod[i] = (b[a][i] - ma) * (b[c][i] - mc);
      double m = 0, m2 = 0;
      for (double v : prod) m += v, m2 += v * v;
      m /= n;
      double se = std::sqrt((m2 / n - m * m) / n);
      CHECK(std::abs(m - target) < 4 * se);
    }
}

TEST_CASE("coupling: delta statistic") {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    auto s = kmt_couple(rng, 4, 2, 0.5);
    double bmax = 0;
    for (double v : s.bridge) bmax = std::max(bmax, std::abs(v));
    CHECK(s.delta <= 2 * 4 + std::sqrt(4.0) * bmax + 1e-12);
    CHECK(s.delta == doctest::Approx(coupling_delta(s.bridge, s.walk)));
  }
  auto base = kmt_couple(rng, 2, 1, 0.5);
  CHECK(std::isfinite(base.delta));
  CHECK_THROWS_AS(kmt_couple(rng, 12, 3, 0.5), std::invalid_argument);
  // direct definition on a hand-made pair
  UpRightPath w(0, {0, 1, 1, 2});
  std::vector<double> br{0, 0.1, -0.2, 0};
  double d = 0;
  for (int t = 0; t <= 3; ++t) d = std::max(d, std::abs(std::sqrt(3.0) * br[t] + t / 3.0 * 2 - w.at(t)));
  CHECK(coupling_delta(br, w) == doctest::Approx(d));
}

TEST_CASE("coupling: delta grows with the endpoint offset") {
  Rng rng(7);
  auto near = delta_growth_experiment(rng, 0.5, {64}, 400, 0);
  auto far = delta_growth_experiment(rng, 0.5, {64}, 400, 20);
  CHECK(far.rows[0].median > near.rows[0].median);
  CHECK(near.to_csv().rfind("n,z,median_delta,q99_delta\n", 0) == 0);
}

TEST_CASE("coupling: local CLT error shrinks") {
  double prev = 1e9;
  for (long n : {100, 1000, 10000}) {
    double e = local_clt_check(n, n / 2, std::pow(static_cast<double>(n), 0.6));
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev <= 0.1);
  // w = 0 term alone
  for (long n : {1000, 10000}) CHECK(local_clt_check(n, n / 2, 0) < 3 / std::sqrt(static_cast<double>(n)));
}
