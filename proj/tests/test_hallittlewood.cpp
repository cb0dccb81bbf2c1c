#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "kpzlab/analysis.hpp"
#include "kpzlab/hallittlewood.hpp"

using namespace kpzlab;

namespace {

using LD = long double;

// Hall-Littlewood P by symmetrization:
// P = (1/v_lambda) sum_w w( x^lambda prod_{i<j} (x_i - t x_j)/(x_i - x_j) )
LD hl_P(const Partition& lam, const std::vector<LD>& x, LD t) {
  const int n = static_cast<int>(x.size());
  if (static_cast<int>(lam.size()) > n) return 0;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  LD sum = 0;
  do {
    LD term = 1;
    for (int i = 0; i < n; ++i) term *= std::pow(x[perm[i]], static_cast<LD>(part(lam, i + 1)));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) term *= (x[perm[i]] - t * x[perm[j]]) / (x[perm[i]] - x[perm[j]]);
    sum += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  // v_lambda = prod over multiplicities m_i (i >= 0) of prod_{j<=m} (1 - t^j)/(1 - t)
  std::map<int, int> mult;
  for (int i = 1; i <= n; ++i) mult[part(lam, i)]++;
  LD v = 1;
  for (auto [k, m] : mult)
    for (int j = 1; j <= m; ++j) v *= (1 - std::pow(t, static_cast<LD>(j))) / (1 - t);
  return sum / v;
}

// Q = b_lambda P, b_lambda = prod_{i>=1} prod_{j<=m_i} (1 - t^j)
LD hl_Q(const Partition& lam, const std::vector<LD>& x, LD t) {
  LD b = 1;
  for (int k = 1; k <= (lam.empty() ? 0 : lam[0]); ++k)
    for (int j = 1; j <= multiplicity(lam, k); ++j) b *= 1 - std::pow(t, static_cast<LD>(j));
  return b * hl_P(lam, x, t);
}

// psi/phi through the conjugate description
double psi_oracle(const Partition& lam, const Partition& mu, double t) {
  auto lc = conjugate(lam), mc = conjugate(mu);
  double r = 1;
  for (int i = 1; i <= (mu.empty() ? 0 : mu[0]); ++i) {
    int a = part(lc, i) - part(mc, i), b = part(lc, i + 1) - part(mc, i + 1);
    if (a == 0 && b == 1) r *= 1 - std::pow(t, multiplicity(mu, i));
  }
  return r;
}
double phi_oracle(const Partition& lam, const Partition& mu, double t) {
  auto lc = conjugate(lam), mc = conjugate(mu);
  double r = 1;
  for (int i = 1; i <= (lam.empty() ? 0 : lam[0]); ++i) {
    int a = part(lc, i) - part(mc, i), b = part(lc, i + 1) - part(mc, i + 1);
    if (a == 1 && b == 0) r *= 1 - std::pow(t, multiplicity(lam, i));
  }
  return r;
}

// level-line weight: a cell of height h has level l if the diagonal run of
// height h starting at it has length l; each side-connected group of equal
// height and level contributes 1 - t^l
double A_geometric(const PlanePartition& p, double t) {
  const int M = p.rows, N = p.cols;
  auto val = [&](int i, int j) { return (i < M && j < N) ? p.at(i, j) : 0; };
  std::vector<int> lev(static_cast<std::size_t>(M) * N, 0), seen(lev.size(), 0);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j) {
      int h = val(i, j);
      if (!h) continue;
      int l = 1;
      while (val(i + l, j + l) == h) ++l;
      lev[i * N + j] = l;
    }
  double a = 1;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j) {
      if (!lev[i * N + j] || seen[i * N + j]) continue;
      a *= 1 - std::pow(t, lev[i * N + j]);
      std::vector<std::pair<int, int>> st{{i, j}};
      seen[i * N + j] = 1;
      while (!st.empty()) {
        auto [x, y] = st.back();
        st.pop_back();
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int u = x + dx[k], v = y + dy[k];
          if (u < 0 || v < 0 || u >= M || v >= N) continue;
          int c = u * N + v;
          if (seen[c] || lev[c] != lev[x * N + y] || val(u, v) != val(x, y)) continue;
          seen[c] = 1;
          st.push_back({u, v});
        }
      }
    }
  return a;
}

Partition P(std::vector<int> v) { return make_partition(std::move(v)); }

}  // namespace

TEST_CASE("hl: conjugate") {
  CHECK(conjugate(P({5, 3, 3, 2, 2})) == P({5, 5, 3, 1, 1}));
  CHECK(conjugate(Partition{}).empty());
  Rng rng(2);
  for (int k = 0; k < 10000; ++k) {
    std::vector<int> v;
    int len = static_cast<int>(rng.below(7));
    for (int i = 0; i < len; ++i) v.push_back(1 + static_cast<int>(rng.below(9)));
    std::sort(v.rbegin(), v.rend());
    auto lam = P(v);
    CHECK(conjugate(conjugate(lam)) == lam);
    CHECK(size_of(conjugate(lam)) == size_of(lam));
  }
  CHECK_THROWS_AS(make_partition({1, 2}), std::invalid_argument);
  CHECK(make_partition({3, 1, 0, 0}) == P({3, 1}));
}

TEST_CASE("hl: psi and phi basic values") {
  CHECK(phi(P({1}), {}, 0.3) == doctest::Approx(0.7));
  CHECK(psi(P({1}), {}, 0.3) == 1.0);
  CHECK(psi(P({3, 1}), P({3, 1}), 0.3) == 1.0);
  CHECK(phi(P({3, 1}), P({3, 1}), 0.3) == 1.0);
}

TEST_CASE("hl: psi and phi agree with the conjugate description") {
  long pairs = 0;
  for (const auto& lam : partitions_up_to(5, 10))
    for_each_predecessor(lam, 5, [&](const Partition& mu) {
      ++pairs;
      for (double t : {0.2, 0.55}) {
        CHECK(psi(lam, mu, t) == doctest::Approx(psi_oracle(lam, mu, t)).epsilon(1e-14));
        CHECK(phi(lam, mu, t) == doctest::Approx(phi_oracle(lam, mu, t)).epsilon(1e-14));
      }
    });
  CHECK(pairs > 1000);
}

TEST_CASE("hl: branching against the symmetrization formula") {
  const LD t = 0.37L;
  for (int n = 2; n <= 4; ++n) {
    std::vector<LD> x;
    for (int i = 0; i < n; ++i) x.push_back(0.3L + 0.17L * i + 0.05L * i * i);
    std::vector<LD> head(x.begin(), x.end() - 1);
    for (const auto& lam : partitions_up_to(n, 7)) {
      LD q = 0, p = 0;
      for_each_predecessor(lam, n - 1, [&](const Partition& mu) {
        LD xp = std::pow(x.back(), static_cast<LD>(size_of(lam) - size_of(mu)));
        q += static_cast<LD>(phi(lam, mu, static_cast<double>(t))) * xp * hl_Q(mu, head, t);
        p += static_cast<LD>(psi(lam, mu, static_cast<double>(t))) * xp * hl_P(mu, head, t);
      });
      LD qd = hl_Q(lam, x, t), pd = hl_P(lam, x, t);
      CHECK(static_cast<double>(std::abs(q - qd)) <= 1e-11 * static_cast<double>(std::abs(qd)) + 1e-15);
      CHECK(static_cast<double>(std::abs(p - pd)) <= 1e-11 * static_cast<double>(std::abs(pd)) + 1e-15);
    }
  }
}

TEST_CASE("hl: principal specializations near 1^n") {
  const double t = 0.4;
  const LD eps = 1e-3L;
  for (int n = 1; n <= 3; ++n) {
    std::vector<LD> x;
    for (int i = 0; i < n; ++i) x.push_back(1 + eps * (i - (n - 1) / 2.0L));
    for (const auto& lam : partitions_up_to(n, 5)) {
      double q = static_cast<double>(hl_Q(lam, x, t)), p = static_cast<double>(hl_P(lam, x, t));
      CHECK(principal_Q(lam, 1.0, n, t) == doctest::Approx(q).epsilon(1e-4));
      CHECK(principal_P(lam, n, t) == doctest::Approx(p).epsilon(1e-4));
    }
  }
  CHECK(principal_Q({}, 0.5, 3, 0.4) == 1.0);
  CHECK(principal_Q(P({1}), 0.5, 1, 0.4) == doctest::Approx(0.6 * 0.5));
  CHECK(principal_P(P({1, 1}), 1, 0.4) == 0.0);
}

TEST_CASE("hl: graded Cauchy identity") {
  for (int M : {1, 2, 3})
    for (int N : {1, 2, 3}) {
      HahpParams hp{M, N, 0.3, 0.3};
      auto s = hahp_partition_sum(hp, 40);
      CHECK(s.exact == doctest::Approx(1 / hp.normalization()).epsilon(1e-14));
      CHECK(s.exact - s.sum >= -1e-12);
      CHECK(s.exact - s.sum <= s.tail_bound + 1e-12);
    }
}

TEST_CASE("hl: HAHP single row law") {
  HahpParams hp{1, 1, 0.4, 0.3};
  double norm = (1 - 0.3) / (1 - 0.4 * 0.3);
  CHECK(hahp_prob({{}}, hp) == doctest::Approx(norm));
  double total = norm;
  for (int k = 1; k <= 60; ++k) {
    double pk = hahp_prob({P({k})}, hp);
    CHECK(pk == doctest::Approx(norm * 0.6 * std::pow(0.3, k)).epsilon(1e-12));
    total += pk;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hahp_prob({P({1, 1})}, hp) == 0.0);
  HahpParams h3{3, 2, 0.5, 0.5};
  CHECK(hahp_prob({{}, {}, {}}, h3) == doctest::Approx(h3.normalization()));
  CHECK_FALSE(valid_sequence({P({2}), P({1})}));
  CHECK(valid_sequence({P({1}), P({3, 1})}));
}

TEST_CASE("hl: enumeration mass and projection") {
  HahpParams h2{2, 2, 0.5, 0.3}, h1{1, 2, 0.5, 0.3};
  auto e2 = enumerate_hahp(h2, 30);
  auto e1 = enumerate_hahp(h1, 30);
  CHECK(e2.listed_mass + e2.tail_bound >= 1 - 1e-12);
  CHECK(e2.listed_mass <= 1 + 1e-12);
  std::map<Partition, double> proj, direct;
  for (const auto& [seq, pr] : e2.entries) proj[seq[0]] += pr;
  for (const auto& [seq, pr] : e1.entries) direct[seq[0]] += pr;
  for (const auto& [lam, pr] : direct)
    if (size_of(lam) <= 6) CHECK(proj[lam] == doctest::Approx(pr).epsilon(1e-9));
  HahpParams h11{1, 1, 0.4, 0.3};
  auto e = enumerate_hahp(h11, 50);
  CHECK(e.tail_bound <= std::pow(0.3, 50) * 0.6 / 0.7 / (1 - 0.4 * 0.3) * 1.0001 + 1e-300);
}

TEST_CASE("hl: sequential sampler rows are stochastic and the law matches") {
  HahpParams hp{2, 2, 0.5, 0.3};
  auto e = enumerate_hahp(hp, 12);
  std::map<InterlacingSequence, std::size_t> idx;
  std::vector<double> probs;
  for (const auto& [seq, pr] : e.entries) {
    idx[seq] = probs.size();
    probs.push_back(pr);
  }
  HahpSampler s(hp, 24);
  Rng rng(31);
  std::vector<double> counts(probs.size() + 1, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto seq = s.sample(rng);
    auto it = idx.find(seq);
    counts[it == idx.end() ? probs.size() : it->second] += 1;
  }
  probs.push_back(std::max(0.0, 1 - std::accumulate(probs.begin(), probs.end(), 0.0)));
  CHECK(chi_square_gof(counts, probs).p_value > 1e-3);
  CHECK(s.draws() == n);
  // empty-sequence frequency
  double p0 = hahp_prob({{}, {}}, hp);
  double f0 = counts[idx.at({{}, {}})] / n;
  CHECK(std::abs(f0 - p0) < 4 * std::sqrt(p0 * (1 - p0) / n));
}

TEST_CASE("hl: line ensemble from the conjugate example") {
  InterlacingSequence seq{P({1}), P({2}), P({2}), P({4}), P({4, 2}), P({5, 2, 2}), P({5, 3, 2}), P({8, 5, 2, 1})};
  REQUIRE(valid_sequence(seq));
  auto ens = line_ensemble_from_sequence(seq, 2);
  CHECK(ens.curves[0].values() == std::vector<long>{0, 1, 1, 1, 1, 2, 3, 3, 4});
  CHECK(ens.ordered());
  auto empty = line_ensemble_from_sequence({{}, {}}, 2);
  CHECK(empty.curves[1].values() == std::vector<long>{0, 0, 0});
  HahpSampler s({4, 3, 0.5, 0.5}, 40);
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) REQUIRE(line_ensemble_from_sequence(s.sample(rng), 4).ordered());
  CHECK(sequence_from_json(sequence_to_json(seq)) == seq);
}

TEST_CASE("hl: Gibbs invariance on a small instance") {
  auto rep = hahp_gibbs_invariance({2, 1, 0.3, 0.6}, 3);
  CHECK(rep.groups > 0);
  CHECK(rep.max_tv < 1e-12);
}

TEST_CASE("hl: plane partition from the slice example") {
  auto pp = plane_partition_from_slices(
      5, 5, {P({1}), P({1}), P({3}), P({4, 2}), P({5, 3, 1}), P({4, 3}), P({4, 3}), P({3, 1}), P({3})});
  CHECK(pp.valid());
  CHECK(pp.volume() == 41);
  CHECK(pp.diag() == 9);
  CHECK(diagonal_slice(pp, 0) == P({5, 3, 1}));
  CHECK(diagonal_slice(pp, -1) == P({4, 2}));
  CHECK(ascending_part(pp).back() == P({5, 3, 1}));
  CHECK(plane_partition_BL(pp, 0.45) == doctest::Approx(A_geometric(pp, 0.45)).epsilon(1e-14));
  CHECK(plane_partition_to_csv(pp).rfind("5,4,4,3,3\n4,3,3,3,1\n", 0) == 0);
}

TEST_CASE("hl: psi/phi product equals the level-line weight") {
  long n = 0;
  for (auto [M, N, H] : std::vector<std::tuple<int, int, int>>{{2, 2, 4}, {3, 3, 3}, {2, 4, 3}, {4, 2, 3}})
    for (const auto& p : enumerate_plane_partitions(M, N, H)) {
      ++n;
      CHECK(plane_partition_BL(p, 0.37) == doctest::Approx(A_geometric(p, 0.37)).epsilon(1e-13));
      CHECK(plane_partition_BL(p, 0.37) == doctest::Approx(plane_partition_BL(p.transpose(), 0.37)).epsilon(1e-13));
    }
  CHECK(n > 2000);
  PlanePartition empty(3, 3), one(3, 3);
  one.at(0, 0) = 1;
  CHECK(plane_partition_weight(empty, 0.3, 0.4) == 1.0);
  CHECK(plane_partition_weight(one, 0.3, 0.4) == doctest::Approx(0.7 * 0.4));
}

TEST_CASE("hl: Metropolis local ratio equals full recomputation") {
  const double t = 0.35, z = 0.45;
  PlanePartitionChain chain(3, 4, 3, t, z);
  Rng rng(8);
  for (int step = 0; step < 3000; ++step) {
    chain.step(rng);
    const auto& pi = chain.state();
    REQUIRE(pi.valid());
    int i = static_cast<int>(rng.below(3)), j = static_cast<int>(rng.below(4));
    for (int v : {pi.at(i, j) - 1, pi.at(i, j) + 1}) {
      PlanePartition alt = pi;
      alt.at(i, j) = v;
      if (v < 0 || v > 3 || !alt.valid()) continue;
      double full = plane_partition_weight(alt, t, z) / plane_partition_weight(pi, t, z);
      CHECK(chain.local_ratio(i, j, v) == doctest::Approx(full).epsilon(1e-12));
    }
  }
}

TEST_CASE("hl: exact Metropolis kernel is stochastic with the weight as stationary law") {
  auto k = mcmc_exact_kernel(2, 2, 2, 0.4, 0.5);
  const std::size_t n = k.states.size();
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0;
    for (std::size_t b = 0; b < n; ++b) {
      row += k.P[a * n + b];
      // detailed balance
      CHECK(k.target[a] * k.P[a * n + b] == doctest::Approx(k.target[b] * k.P[b * n + a]).epsilon(1e-12));
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-13));
  }
  auto pi = stationary_vector(k);
  for (std::size_t a = 0; a < n; ++a) CHECK(std::abs(pi[a] - k.target[a]) < 1e-12);
  CHECK(second_eigenvalue_modulus(k) < 1);
}

TEST_CASE("hl: small zeta concentrates on the empty plane partition") {
  PlanePartitionChain chain(2, 2, 2, 0.5, 1e-4);
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) chain.step(rng);
  long empty = 0;
  for (int i = 0; i < 2000; ++i) {
    chain.step(rng);
    empty += chain.state().volume() == 0;
  }
  CHECK(empty > 1990);
}
