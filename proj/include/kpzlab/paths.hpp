/*
 * Up-right lattice paths and uniform bridge measures.
 */
#ifndef KPZLAB_PATHS_HPP
#define KPZLAB_PATHS_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

// L(t0), L(t0+1), ..., L(t1) with increments in {0,1}
class UpRightPath {
 public:
  UpRightPath() = default;
  UpRightPath(long t0, std::vector<long> values);  // validates

  long t0() const { return t0_; }
  long t1() const { return t0_ + static_cast<long>(values_.size()) - 1; }
  const std::vector<long>& values() const { return values_; }

  long at(long t) const;       // throws std::out_of_range
  double eval(double s) const;  // linear interpolation

  bool operator==(const UpRightPath& o) const { return t0_ == o.t0_ && values_ == o.values_; }
  bool operator<(const UpRightPath& o) const {
    return t0_ != o.t0_ ? t0_ < o.t0_ : values_ < o.values_;
  }

 private:
  long t0_ = 0;
  std::vector<long> values_{0};
};

UpRightPath make_path(long t0, std::vector<long> values);

struct BridgeSpec {
  long t0 = 0, t1 = 1, z0 = 0, z1 = 0;
  void validate() const;  // throws std::invalid_argument on empty state space
  long steps() const { return t1 - t0; }
  long ups() const { return z1 - z0; }
};

// number of paths, C(steps, ups), as a double
double bridge_count(const BridgeSpec& spec);

std::vector<UpRightPath> enumerate_bridges(const BridgeSpec& spec);
UpRightPath sample_uniform_bridge(Rng& rng, const BridgeSpec& spec);

// m(T), M(T): extreme values of L(T) over the state space
std::pair<long, long> bridge_range_at(const BridgeSpec& spec, long T);
// exact P_free(L(T) = k)
double bridge_pmf_at(const BridgeSpec& spec, long T, long k);
UpRightPath sample_bridge_through(Rng& rng, const BridgeSpec& spec, long T, long k);

// f sampled on the uniform grid a = x_0 < ... < x_{n-1} = b, evaluated as a
// piecewise linear curve
double modulus_of_continuity(const std::vector<double>& f, double a, double b, double delta);
double modulus_of_continuity(const UpRightPath& p, double delta);

std::string path_to_csv(const UpRightPath& p);
nlohmann::json path_to_json(const UpRightPath& p);
UpRightPath path_from_json(const nlohmann::json& j);

double log_binomial(double n, double k);

}  // namespace kpzlab

#endif
