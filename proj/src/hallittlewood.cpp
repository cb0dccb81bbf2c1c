#include "kpzlab/hallittlewood.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kpzlab/paths.hpp"

namespace kpzlab {

Partition make_partition(std::vector<int> parts) {
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] < 0) throw std::invalid_argument("make_partition: negative part");
    if (i && parts[i] > parts[i - 1]) throw std::invalid_argument("make_partition: parts must be weakly decreasing");
  }
  while (!parts.empty() && parts.back() == 0) parts.pop_back();
  return parts;
}

Partition conjugate(const Partition& lambda) {
  if (lambda.empty()) return {};
  Partition c(static_cast<std::size_t>(lambda[0]), 0);
  for (int p : lambda)
    for (int i = 0; i < p; ++i) ++c[i];
  return c;
}

int size_of(const Partition& lambda) {
  int s = 0;
  for (int p : lambda) s += p;
  return s;
}

int part(const Partition& lambda, int i) {
  return i >= 1 && i <= static_cast<int>(lambda.size()) ? lambda[i - 1] : 0;
}

int multiplicity(const Partition& lambda, int i) {
  return static_cast<int>(std::count(lambda.begin(), lambda.end(), i));
}

bool interlaces(const Partition& lambda, const Partition& mu) {
  const int L = static_cast<int>(std::max(lambda.size(), mu.size())) + 1;
  for (int i = 1; i <= L; ++i) {
    if (part(lambda, i) < part(mu, i)) return false;
    if (part(mu, i) < part(lambda, i + 1)) return false;
  }
  return true;
}

// For a horizontal strip the new boxes sit in the column intervals
// (mu_i, lambda_i], pairwise disjoint.  J collects the left ends mu_i whose
// own column holds no new box; I collects the right ends lambda_r whose next
// column holds no new box.
double psi(const Partition& lambda, const Partition& mu, double t) {
  if (!interlaces(lambda, mu)) return 0.0;
  double v = 1;
  const int L = static_cast<int>(lambda.size());
  for (int i = 1; i <= L; ++i) {
    int li = part(lambda, i), mi = part(mu, i);
    if (li == mi || mi == 0) continue;
    // column mi is new iff the first row below with a shorter mu ends there
    int r = i + 1;
    while (part(mu, r) == mi) ++r;
    if (part(lambda, r) == mi) continue;
    v *= 1 - std::pow(t, multiplicity(mu, mi));
  }
  return v;
}

double phi(const Partition& lambda, const Partition& mu, double t) {
  if (!interlaces(lambda, mu)) return 0.0;
  double v = 1;
  const int L = static_cast<int>(lambda.size());
  for (int r = 1; r <= L; ++r) {
    int lr = part(lambda, r), mr = part(mu, r);
    if (lr == mr) continue;
    // column lr+1 is new iff the last longer row above starts there
    int k = r - 1;
    while (k >= 1 && part(lambda, k) == lr) --k;
    if (k >= 1 && part(mu, k) == lr) continue;
    v *= 1 - std::pow(t, multiplicity(lambda, lr));
  }
  return v;
}

void for_each_predecessor(const Partition& lambda, int max_len, const std::function<void(const Partition&)>& f) {
  const int L = static_cast<int>(lambda.size());
  if (L > max_len + 1) return;
  Partition mu(static_cast<std::size_t>(L), 0);
  std::function<void(int)> rec = [&](int i) {
    if (i > L) {
      Partition m = mu;
      while (!m.empty() && m.back() == 0) m.pop_back();
      if (static_cast<int>(m.size()) <= max_len) f(m);
      return;
    }
    int lo = part(lambda, i + 1), hi = part(lambda, i);
    if (i > max_len) hi = lo;  // forced zero row (lo is 0 here)
    for (int v = lo; v <= hi; ++v) {
      mu[i - 1] = v;
      rec(i + 1);
    }
  };
  rec(1);
}

void for_each_successor(const Partition& mu, int max_len, int max_size,
                        const std::function<void(const Partition&)>& f) {
  const int L = std::min(static_cast<int>(mu.size()) + 1, max_len);
  if (static_cast<int>(mu.size()) > max_len) return;
  int base = size_of(mu);
  if (base > max_size) return;
  Partition lam(static_cast<std::size_t>(L), 0);
  // remaining lower bound of rows > i is sum of mu_j, j > i
  std::vector<int> tail(static_cast<std::size_t>(L + 2), 0);
  for (int i = L; i >= 1; --i) tail[i] = tail[i + 1] + part(mu, i);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i > L) {
      Partition l = lam;
      while (!l.empty() && l.back() == 0) l.pop_back();
      f(l);
      return;
    }
    int lo = part(mu, i);
    int hi = i == 1 ? max_size : part(mu, i - 1);
    hi = std::min(hi, max_size - used - tail[i + 1]);
    for (int v = lo; v <= hi; ++v) {
      lam[i - 1] = v;
      rec(i + 1, used + v);
    }
  };
  rec(1, 0);
}

std::vector<Partition> partitions_up_to(int max_len, int max_size) {
  std::vector<Partition> out;
  Partition cur;
  std::function<void(int, int)> rec = [&](int maxpart, int left) {
    out.push_back(cur);
    if (static_cast<int>(cur.size()) == max_len) return;
    for (int v = 1; v <= std::min(maxpart, left); ++v) {
      cur.push_back(v);
      rec(v, left - v);
      cur.pop_back();
    }
  };
  rec(max_size, max_size);
  return out;
}

std::size_t PartitionHash::operator()(const Partition& p) const {
  std::uint64_t h = 1469598103934665603ULL;
  for (int v : p) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

double BranchingTable::Q1(const Partition& lambda, int n) { return rec(lambda, n, true); }
double BranchingTable::P1(const Partition& lambda, int n) { return rec(lambda, n, false); }

double BranchingTable::rec(const Partition& lambda, int n, bool is_q) {
  if (n < 0) throw std::invalid_argument("BranchingTable: negative variable count");
  if (n == 0) return lambda.empty() ? 1.0 : 0.0;
  if (static_cast<int>(lambda.size()) > n) return 0.0;
  auto& memo = is_q ? q_ : p_;
  if (static_cast<int>(memo.size()) <= n) memo.resize(static_cast<std::size_t>(n) + 1);
  auto it = memo[n].find(lambda);
  if (it != memo[n].end()) return it->second;
  double s = 0;
  for_each_predecessor(lambda, n - 1, [&](const Partition& mu) {
    double c = is_q ? phi(lambda, mu, t_) : psi(lambda, mu, t_);
    if (c != 0) s += c * rec(mu, n - 1, is_q);
  });
  memo[n].emplace(lambda, s);
  return s;
}

double principal_Q(const Partition& lambda, double zeta, int N, double t) {
  BranchingTable tab(t);
  return std::pow(zeta, size_of(lambda)) * tab.Q1(lambda, N);
}

double principal_P(const Partition& lambda, int M, double t) {
  BranchingTable tab(t);
  return tab.P1(lambda, M);
}

void HahpParams::validate() const {
  if (M < 1 || N < 1) throw std::invalid_argument("HahpParams: M, N must be positive");
  if (!(t > 0 && t < 1)) throw std::invalid_argument("HahpParams: t must lie in (0,1)");
  if (!(zeta > 0 && zeta < 1)) throw std::invalid_argument("HahpParams: zeta must lie in (0,1)");
}

double HahpParams::normalization() const {
  return std::pow((1 - zeta) / (1 - t * zeta), static_cast<double>(N) * M);
}

bool valid_sequence(const InterlacingSequence& seq) {
  Partition prev;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] != make_partition(seq[i])) return false;
    if (!interlaces(seq[i], prev)) return false;
    if (seq[i].size() > i + 1) return false;
    prev = seq[i];
  }
  return true;
}

double hahp_prob(const InterlacingSequence& seq, const HahpParams& params, BranchingTable& table) {
  params.validate();
  if (static_cast<int>(seq.size()) != params.M) throw std::invalid_argument("hahp_prob: sequence length must be M");
  double p = params.normalization();
  Partition prev;
  for (const auto& lam : seq) {
    p *= psi(lam, prev, params.t);
    if (p == 0) return 0.0;
    prev = lam;
  }
  return p * std::pow(params.zeta, size_of(prev)) * table.Q1(prev, params.N);
}

double hahp_prob(const InterlacingSequence& seq, const HahpParams& params) {
  BranchingTable tab(params.t);
  return hahp_prob(seq, params, tab);
}

double hahp_size_tail_bound(const HahpParams& params, int K) {
  params.validate();
  const double d = static_cast<double>(params.M) * params.N - 1;
  const double lz = std::log(params.zeta);
  double sum = 0;
  for (long k = K + 1;; ++k) {
    double term = std::exp(log_binomial(static_cast<double>(k) + d, d) + static_cast<double>(k) * lz);
    sum += term;
    double r = (static_cast<double>(k) + 1 + d) / (static_cast<double>(k) + 1) * params.zeta;
    if (r < 1 && term * r / (1 - r) < 1e-18 * std::max(sum, 1e-300)) {
      sum += term * r / (1 - r);  // geometric remainder, ratios keep falling
      break;
    }
  }
  return sum;
}

HahpEnumeration enumerate_hahp(const HahpParams& params, int H_max, double guard) {
  params.validate();
  if (H_max < 0) throw std::invalid_argument("enumerate_hahp: H_max must be >= 0");
  HahpEnumeration out;
  BranchingTable tab(params.t);
  const double norm = params.normalization();
  InterlacingSequence seq;
  std::function<void(int, const Partition&, double)> rec = [&](int i, const Partition& prev, double w) {
    if (i > params.M) {
      double q = tab.Q1(prev, params.N);
      if (q == 0) return;
      double p = norm * w * std::pow(params.zeta, size_of(prev)) * q;
      out.entries.emplace_back(seq, p);
      out.listed_mass += p;
      if (static_cast<double>(out.entries.size()) > guard)
        throw EnumerationGuardError("enumerate_hahp: number of sequences exceeds guard");
      return;
    }
    const int max_len = std::min(i, params.N);
    // lambda_1 <= H_max bounds the size by max_len * H_max
    for_each_successor(prev, max_len, max_len * H_max, [&](const Partition& lam) {
      if (!lam.empty() && lam[0] > H_max) return;
      double ps = psi(lam, prev, params.t);
      if (ps == 0) return;
      seq.push_back(lam);
      rec(i + 1, lam, w * ps);
      seq.pop_back();
    });
  };
  rec(1, Partition{}, 1.0);
  // lambda(M)_1 > H forces |lambda(M)| > H
  out.tail_bound = std::min(1.0, norm * hahp_size_tail_bound(params, H_max));
  return out;
}

PartitionSum hahp_partition_sum(const HahpParams& params, int K) {
  params.validate();
  PartitionSum r;
  BranchingTable tab(params.t);
  const int len = std::min(params.M, params.N);
  double s = 0, comp = 0;
  for (const auto& lam : partitions_up_to(len, K)) {
    double term = tab.P1(lam, params.M) * tab.Q1(lam, params.N) * std::pow(params.zeta, size_of(lam));
    double y = term - comp, u = s + y;
    comp = (u - s) - y;
    s = u;
  }
  r.sum = s;
  r.tail_bound = hahp_size_tail_bound(params, K);
  r.exact = 1.0 / params.normalization();
  return r;
}

HahpSampler::HahpSampler(const HahpParams& params, int K) : params_(params), K_(K), table_(params.t) {
  params_.validate();
  if (K < 0) throw std::invalid_argument("HahpSampler: size cap must be >= 0");
  tail_bound_ = std::min(1.0, params_.normalization() * hahp_size_tail_bound(params_, K));
}

const HahpSampler::Row& HahpSampler::row(const Partition& mu) {
  auto it = rows_.find(mu);
  if (it != rows_.end()) return it->second;
  Row r;
  const double pre = std::pow((1 - params_.zeta) / (1 - params_.t * params_.zeta), params_.N);
  const double qmu = table_.Q1(mu, params_.N);
  const int smu = size_of(mu);
  double acc = 0;
  for_each_successor(mu, params_.N, K_, [&](const Partition& lam) {
    double w = pre * psi(lam, mu, params_.t) * std::pow(params_.zeta, size_of(lam) - smu) *
               table_.Q1(lam, params_.N) / qmu;
    if (w <= 0) return;
    acc += w;
    r.next.push_back(lam);
    r.cdf.push_back(acc);
  });
  return rows_.emplace(mu, std::move(r)).first->second;
}

InterlacingSequence HahpSampler::sample(Rng& rng) {
  for (;;) {
    ++draws_;
    InterlacingSequence seq;
    Partition cur;
    bool ok = true;
    for (int i = 1; i <= params_.M; ++i) {
      const Row& r = row(cur);
      double u = rng.uniform();
      if (r.cdf.empty() || u >= r.cdf.back()) {
        ok = false;
        break;
      }
      auto k = static_cast<std::size_t>(std::upper_bound(r.cdf.begin(), r.cdf.end(), u) - r.cdf.begin());
      cur = r.next[k];
      seq.push_back(cur);
    }
    if (ok) return seq;
    ++restarts_;
  }
}

LineEnsemble line_ensemble_from_sequence(const InterlacingSequence& seq, int n_lines) {
  if (!valid_sequence(seq)) throw std::invalid_argument("line_ensemble_from_sequence: invalid interlacing sequence");
  const int M = static_cast<int>(seq.size());
  if (n_lines < 0) n_lines = seq.empty() ? 0 : part(seq.back(), 1);
  LineEnsemble ens;
  std::vector<Partition> conj;
  conj.push_back({});
  for (const auto& l : seq) conj.push_back(conjugate(l));
  for (int j = 1; j <= n_lines; ++j) {
    std::vector<long> v(static_cast<std::size_t>(M) + 1);
    for (int i = 0; i <= M; ++i) v[i] = part(conj[i], j);
    ens.curves.emplace_back(0, std::move(v));
  }
  return ens;
}

GibbsInvarianceReport hahp_gibbs_invariance(const HahpParams& params, int H) {
  auto en = enumerate_hahp(params, H);
  const int M = params.M;
  using Lines = std::vector<std::vector<long>>;
  std::map<Lines, double> pi;
  for (const auto& [seq, p] : en.entries) {
    auto ens = line_ensemble_from_sequence(seq, H);
    Lines key;
    for (const auto& c : ens.curves) key.push_back(c.values());
    pi[key] += p / en.listed_mass;
  }
  GibbsInvarianceReport rep;
  const UpRightPath zero(0, std::vector<long>(static_cast<std::size_t>(M) + 1, 0));
  for (int j = 1; j <= H; ++j) {
    // group by everything except line j, plus the endpoint of line j
    std::map<std::pair<Lines, long>, std::vector<std::pair<std::vector<long>, double>>> groups;
    for (const auto& [x, p] : pi) {
      Lines rest = x;
      std::vector<long> mine = rest[j - 1];
      rest[j - 1].clear();
      groups[{rest, mine.back()}].emplace_back(mine, p);
    }
    double tv = 0;
    for (const auto& [key, members] : groups) {
      ++rep.groups;
      const Lines& rest = key.first;
      double mass = 0;
      std::map<std::vector<long>, double> cond;
      for (const auto& [line, p] : members) {
        mass += p;
        cond[line] += p;
      }
      Boundary top = j == 1 ? Boundary::infinite() : Boundary::of(UpRightPath(0, rest[j - 2]));
      Boundary bot = j == H ? Boundary::of(zero) : Boundary::of(UpRightPath(0, rest[j]));
      GibbsContext ctx = make_context(params.t, 0, M, top, bot);
      auto law = conditional_law_exact(ctx, 0, key.second);
      // (pi K)(x') on this group is mass * law(x'_j)
      for (const auto& [path, q] : law) {
        auto it = cond.find(path.values());
        double have = it == cond.end() ? 0.0 : it->second;
        tv += std::abs(mass * q - have);
      }
      for (const auto& [line, p] : cond)
        if (!law.count(UpRightPath(0, line))) tv += p;
    }
    rep.max_tv = std::max(rep.max_tv, tv / 2);
  }
  return rep;
}

// ---- plane partitions ----

bool PlanePartition::valid() const {
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      int v = at(i, j);
      if (v < 0) return false;
      if (i + 1 < rows && at(i + 1, j) > v) return false;
      if (j + 1 < cols && at(i, j + 1) > v) return false;
    }
  return true;
}

int PlanePartition::volume() const {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

int PlanePartition::diag() const {
  int s = 0;
  for (int i = 0; i < std::min(rows, cols); ++i) s += at(i, i);
  return s;
}

PlanePartition PlanePartition::transpose() const {
  PlanePartition p(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) p.at(j, i) = at(i, j);
  return p;
}

Partition diagonal_slice(const PlanePartition& pi, int s) {
  Partition p;
  if (s <= -pi.rows || s >= pi.cols) return p;
  for (int i = std::max(0, -s); i < pi.rows && i + s < pi.cols; ++i) {
    int v = pi.at(i, i + s);
    if (v == 0) break;
    p.push_back(v);
  }
  return p;
}

PlanePartition plane_partition_from_slices(int M, int N, const std::vector<Partition>& slices) {
  if (static_cast<int>(slices.size()) != M + N - 1)
    throw std::invalid_argument("plane_partition_from_slices: need M+N-1 slices");
  PlanePartition pi(M, N);
  for (int s = -(M - 1); s <= N - 1; ++s) {
    const Partition& l = slices[static_cast<std::size_t>(s + M - 1)];
    int i0 = std::max(0, -s);
    for (std::size_t k = 0; k < l.size(); ++k) {
      int i = i0 + static_cast<int>(k);
      if (i >= M || i + s >= N) throw std::invalid_argument("plane_partition_from_slices: slice does not fit the box");
      pi.at(i, i + s) = l[k];
    }
  }
  if (!pi.valid()) throw std::invalid_argument("plane_partition_from_slices: slices do not interlace");
  return pi;
}

InterlacingSequence ascending_part(const PlanePartition& pi) {
  InterlacingSequence seq;
  for (int i = 1; i <= pi.rows; ++i) seq.push_back(diagonal_slice(pi, i - pi.rows));
  return seq;
}

double plane_partition_BL(const PlanePartition& pi, double t) {
  const int M = pi.rows, N = pi.cols;
  double b = 1;
  for (int n = -M + 1; n <= 0; ++n) b *= psi(diagonal_slice(pi, n), diagonal_slice(pi, n - 1), t);
  for (int n = 1; n <= N; ++n) b *= phi(diagonal_slice(pi, n - 1), diagonal_slice(pi, n), t);
  return b;
}

double plane_partition_weight(const PlanePartition& pi, double t, double zeta) {
  if (!pi.valid()) throw std::invalid_argument("plane_partition_weight: not a plane partition");
  return plane_partition_BL(pi, t) * std::pow(zeta, pi.diag());
}

std::vector<PlanePartition> enumerate_plane_partitions(int M, int N, int H) {
  std::vector<PlanePartition> out;
  PlanePartition pi(M, N);
  std::function<void(int)> rec = [&](int k) {
    if (k == M * N) {
      out.push_back(pi);
      return;
    }
    int i = k / N, j = k % N;
    int hi = H;
    if (i > 0) hi = std::min(hi, pi.at(i - 1, j));
    if (j > 0) hi = std::min(hi, pi.at(i, j - 1));
    for (int v = 0; v <= hi; ++v) {
      pi.at(i, j) = v;
      rec(k + 1);
    }
    pi.at(i, j) = 0;
  };
  rec(0);
  return out;
}

PlanePartitionChain::PlanePartitionChain(int M, int N, int H, double t, double zeta)
    : M_(M), N_(N), H_(H), t_(t), zeta_(zeta), pi_(M, N) {
  if (M < 1 || N < 1 || H < 1) throw std::invalid_argument("PlanePartitionChain: need M, N, H >= 1");
  if (!(t > 0 && t < 1) || !(zeta > 0 && zeta < 1))
    throw std::invalid_argument("PlanePartitionChain: t, zeta must lie in (0,1)");
}

void PlanePartitionChain::set_state(const PlanePartition& pi) {
  if (pi.rows != M_ || pi.cols != N_ || !pi.valid()) throw std::invalid_argument("set_state: bad plane partition");
  for (int v : pi.a)
    if (v > H_) throw std::invalid_argument("set_state: entry above cap");
  pi_ = pi;
}

Partition PlanePartitionChain::slice_or_empty(int s) const { return diagonal_slice(pi_, s); }

// factor between slices n-1 and n
double PlanePartitionChain::link(int n, const Partition& lo, const Partition& hi) const {
  return n <= 0 ? psi(hi, lo, t_) : phi(lo, hi, t_);
}

double PlanePartitionChain::local_ratio(int i, int j, int v) const {
  const int s = j - i;
  Partition prev = slice_or_empty(s - 1), next = slice_or_empty(s + 1);
  Partition cur = slice_or_empty(s);
  PlanePartition tmp = pi_;
  tmp.at(i, j) = v;
  Partition alt = diagonal_slice(tmp, s);
  double old_w = link(s, prev, cur) * link(s + 1, cur, next);
  double new_w = link(s, prev, alt) * link(s + 1, alt, next);
  double r = new_w / old_w;
  if (s == 0) r *= std::pow(zeta_, v - pi_.at(i, j));
  return r;
}

bool PlanePartitionChain::step(Rng& rng) {
  ++proposed_;
  auto cell = static_cast<int>(rng.below(static_cast<std::uint64_t>(M_) * N_));
  int i = cell / N_, j = cell % N_;
  int v = pi_.at(i, j) + (rng.below(2) ? 1 : -1);
  double u = rng.uniform();
  if (v < 0 || v > H_) return false;
  if (i > 0 && v > pi_.at(i - 1, j)) return false;
  if (j > 0 && v > pi_.at(i, j - 1)) return false;
  if (i + 1 < M_ && v < pi_.at(i + 1, j)) return false;
  if (j + 1 < N_ && v < pi_.at(i, j + 1)) return false;
  double r = local_ratio(i, j, v);
  if (r >= 1 || u < r) {
    pi_.at(i, j) = v;
    ++accepted_;
    return true;
  }
  return false;
}

ExactKernel mcmc_exact_kernel(int M, int N, int H, double t, double zeta) {
  ExactKernel k;
  k.states = enumerate_plane_partitions(M, N, H);
  const std::size_t S = k.states.size();
  std::map<PlanePartition, std::size_t> index;
  for (std::size_t s = 0; s < S; ++s) index[k.states[s]] = s;
  k.P.assign(S * S, 0.0);
  double wsum = 0;
  for (const auto& st : k.states) {
    double w = plane_partition_weight(st, t, zeta);
    k.target.push_back(w);
    wsum += w;
  }
  for (auto& w : k.target) w /= wsum;
  const double q = 1.0 / (2.0 * M * N);
  for (std::size_t s = 0; s < S; ++s) {
    const PlanePartition& st = k.states[s];
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < N; ++j)
        for (int d : {-1, 1}) {
          PlanePartition nx = st;
          nx.at(i, j) += d;
          bool ok = nx.at(i, j) >= 0 && nx.at(i, j) <= H && nx.valid();
          if (!ok) {
            k.P[s * S + s] += q;
            continue;
          }
          double a = std::min(1.0, plane_partition_weight(nx, t, zeta) / plane_partition_weight(st, t, zeta));
          k.P[s * S + index.at(nx)] += q * a;
          k.P[s * S + s] += q * (1 - a);
        }
  }
  return k;
}

std::vector<double> stationary_vector(const ExactKernel& k) {
  const auto S = static_cast<Eigen::Index>(k.states.size());
  Eigen::MatrixXd A(S, S);
  for (Eigen::Index r = 0; r < S; ++r)
    for (Eigen::Index c = 0; c < S; ++c)
      A(r, c) = k.P[static_cast<std::size_t>(c * S + r)] - (r == c ? 1.0 : 0.0);
  A.row(S - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S);
  rhs(S - 1) = 1;
  Eigen::VectorXd x = A.fullPivLu().solve(rhs);
  return std::vector<double>(x.data(), x.data() + S);
}

double second_eigenvalue_modulus(const ExactKernel& k) {
  const auto S = static_cast<Eigen::Index>(k.states.size());
  Eigen::MatrixXd P(S, S);
  for (Eigen::Index r = 0; r < S; ++r)
    for (Eigen::Index c = 0; c < S; ++c) P(r, c) = k.P[static_cast<std::size_t>(r * S + c)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(P, false);
  std::vector<double> mods;
  for (Eigen::Index i = 0; i < S; ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mods.rbegin(), mods.rend());
  return mods.size() > 1 ? mods[1] : 0.0;
}

std::string plane_partition_to_csv(const PlanePartition& pi) {
  std::ostringstream os;
  for (int i = 0; i < pi.rows; ++i) {
    for (int j = 0; j < pi.cols; ++j) os << (j ? "," : "") << pi.at(i, j);
    os << '\n';
  }
  return os.str();
}

nlohmann::json sequence_to_json(const InterlacingSequence& seq) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& l : seq) j.push_back(l);
  return j;
}

InterlacingSequence sequence_from_json(const nlohmann::json& j) {
  InterlacingSequence seq;
  for (const auto& e : j) seq.push_back(make_partition(e.get<std::vector<int>>()));
  return seq;
}

}  // namespace kpzlab
