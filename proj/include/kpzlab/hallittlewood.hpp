/*
 * Partitions, one-variable skew Hall-Littlewood coefficients, the homogeneous
 * ascending Hall-Littlewood process (HAHP) and Hall-Littlewood weighted
 * plane partitions.
 */
#ifndef KPZLAB_HALLITTLEWOOD_HPP
#define KPZLAB_HALLITTLEWOOD_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "kpzlab/gibbs.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

// Positive parts only, weakly decreasing.  The empty vector is the empty partition.
using Partition = std::vector<int>;
using InterlacingSequence = std::vector<Partition>;  // lambda(1), ..., lambda(M)

Partition make_partition(std::vector<int> parts);  // validates, drops trailing zeros
Partition conjugate(const Partition& lambda);
int size_of(const Partition& lambda);
int part(const Partition& lambda, int i);  // 1-based, 0 beyond the length
int multiplicity(const Partition& lambda, int i);
// lambda > mu: lambda/mu is a horizontal strip
bool interlaces(const Partition& lambda, const Partition& mu);

double psi(const Partition& lambda, const Partition& mu, double t);
double phi(const Partition& lambda, const Partition& mu, double t);

// every mu with mu < lambda (lambda/mu a horizontal strip) and length(mu) <= max_len
void for_each_predecessor(const Partition& lambda, int max_len, const std::function<void(const Partition&)>& f);
// every lambda with lambda > mu, length(lambda) <= max_len, |lambda| <= max_size
void for_each_successor(const Partition& mu, int max_len, int max_size,
                        const std::function<void(const Partition&)>& f);
// all partitions with length <= max_len and size <= max_size
std::vector<Partition> partitions_up_to(int max_len, int max_size);

struct PartitionHash {
  std::size_t operator()(const Partition& p) const;
};

// Memoized Q_lambda(1^n) and P_lambda(1^n) by branching.  Not thread safe.
class BranchingTable {
 public:
  explicit BranchingTable(double t) : t_(t) {}
  double Q1(const Partition& lambda, int n);
  double P1(const Partition& lambda, int n);
  double t() const { return t_; }

 private:
  double t_;
  std::vector<std::unordered_map<Partition, double, PartitionHash>> q_, p_;
  double rec(const Partition& lambda, int n, bool is_q);
};

// Q_lambda(zeta^N) = zeta^{|lambda|} Q_lambda(1^N)
double principal_Q(const Partition& lambda, double zeta, int N, double t);
double principal_P(const Partition& lambda, int M, double t);

struct HahpParams {
  int M = 1, N = 1;
  double t = 0.5, zeta = 0.5;
  void validate() const;
  // ((1 - zeta) / (1 - t zeta))^{NM}
  double normalization() const;
};

bool valid_sequence(const InterlacingSequence& seq);
double hahp_prob(const InterlacingSequence& seq, const HahpParams& params);
double hahp_prob(const InterlacingSequence& seq, const HahpParams& params, BranchingTable& table);

// Bound on the unnormalized weight sum over lambda(M) with |lambda(M)| > K:
// sum_{k>K} C(k+MN-1, MN-1) zeta^k  (from psi, phi <= 1 and the Schur Cauchy identity)
double hahp_size_tail_bound(const HahpParams& params, int K);

struct HahpEnumeration {
  std::vector<std::pair<InterlacingSequence, double>> entries;
  double listed_mass = 0;
  double tail_bound = 0;  // bound on P(lambda(M)_1 > H_max)
};
HahpEnumeration enumerate_hahp(const HahpParams& params, int H_max, double guard = 2e6);

struct PartitionSum {
  double sum = 0;         // sum over |lambda| <= K of P_lambda(1^M) Q_lambda(zeta^N)
  double tail_bound = 0;  // hahp_size_tail_bound(params, K)
  double exact = 0;       // ((1 - t zeta)/(1 - zeta))^{NM}
};
PartitionSum hahp_partition_sum(const HahpParams& params, int K);

// Exact sequential sampler: ascending Markov chain
// T(mu -> lambda) = ((1-zeta)/(1-t zeta))^N psi_{lambda/mu} zeta^{|lambda|-|mu|} Q_lambda(1^N)/Q_mu(1^N)
// restricted to |lambda(M)| <= K; a run that leaves the window is restarted.
class HahpSampler {
 public:
  HahpSampler(const HahpParams& params, int K);
  InterlacingSequence sample(Rng& rng);
  long restarts() const { return restarts_; }
  long draws() const { return draws_; }
  double tail_bound() const { return tail_bound_; }
  int size_cap() const { return K_; }

 private:
  struct Row {
    std::vector<Partition> next;
    std::vector<double> cdf;
  };
  const Row& row(const Partition& mu);

  HahpParams params_;
  int K_;
  double tail_bound_;
  BranchingTable table_;
  std::unordered_map<Partition, Row, PartitionHash> rows_;
  long restarts_ = 0, draws_ = 0;
};

// L_j(i) = lambda'_j(i) on [0, M]; lines j = 1..n_lines (default: lambda(M)_1)
LineEnsemble line_ensemble_from_sequence(const InterlacingSequence& seq, int n_lines = -1);

// Largest total variation, over lines 1..H and over conditioning data, between
// the HAHP conditional law of a line and the Gibbs conditional law (S = [1,M],
// bottom of line H is the zero curve), after one exact resampling step.
struct GibbsInvarianceReport {
  double max_tv = 0;
  long groups = 0;
};
GibbsInvarianceReport hahp_gibbs_invariance(const HahpParams& params, int H);

// ---- plane partitions ----

struct PlanePartition {
  int rows = 0, cols = 0;  // M x N box
  std::vector<int> a;      // row major
  PlanePartition() = default;
  PlanePartition(int M, int N) : rows(M), cols(N), a(static_cast<std::size_t>(M) * N, 0) {}
  int at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }  // 0-based
  int& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  bool valid() const;
  int volume() const;
  int diag() const;
  PlanePartition transpose() const;
  bool operator<(const PlanePartition& o) const { return a < o.a; }
  bool operator==(const PlanePartition& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

// lambda^s = (pi_{i,i+s}), s in [-(M-1), N-1]
Partition diagonal_slice(const PlanePartition& pi, int s);
// slices lambda^{-(M-1)}, ..., lambda^{N-1} -> plane partition
PlanePartition plane_partition_from_slices(int M, int N, const std::vector<Partition>& slices);
// lambda(i) = lambda^{i-M}, i = 1..M
InterlacingSequence ascending_part(const PlanePartition& pi);

// B_L(t) = prod_{n=-M+1}^{0} psi_{lambda^n/lambda^{n-1}} prod_{n=1}^{N} phi_{lambda^{n-1}/lambda^n}
double plane_partition_BL(const PlanePartition& pi, double t);
double plane_partition_weight(const PlanePartition& pi, double t, double zeta);

std::vector<PlanePartition> enumerate_plane_partitions(int M, int N, int H);

// single-cell Metropolis chain, target proportional to the weight on entries <= H
class PlanePartitionChain {
 public:
  PlanePartitionChain(int M, int N, int H, double t, double zeta);
  bool step(Rng& rng);
  const PlanePartition& state() const { return pi_; }
  void set_state(const PlanePartition& pi);
  long accepted() const { return accepted_; }
  long proposed() const { return proposed_; }
  // W(pi with (i,j) set to v) / W(pi), from the two factors around slice j-i
  double local_ratio(int i, int j, int v) const;

 private:
  double link(int n, const Partition& lo, const Partition& hi) const;
  Partition slice_or_empty(int s) const;
  int M_, N_, H_;
  double t_, zeta_;
  PlanePartition pi_;
  long accepted_ = 0, proposed_ = 0;
};

struct ExactKernel {
  std::vector<PlanePartition> states;
  std::vector<double> P;  // row-major transition matrix
  std::vector<double> target;  // normalized weights
};
ExactKernel mcmc_exact_kernel(int M, int N, int H, double t, double zeta);
std::vector<double> stationary_vector(const ExactKernel& k);
double second_eigenvalue_modulus(const ExactKernel& k);

std::string plane_partition_to_csv(const PlanePartition& pi);
nlohmann::json sequence_to_json(const InterlacingSequence& seq);
InterlacingSequence sequence_from_json(const nlohmann::json& j);

}  // namespace kpzlab

#endif
