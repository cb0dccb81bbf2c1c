/*
 * Stochastic six-vertex model in the quadrant with step boundary: horizontal
 * arrows enter at every (1,m), nothing enters from below.
 *
 * At a vertex with a single incoming arrow:
 *   vertical in   -> continues up with prob b1, turns right otherwise
 *   horizontal in -> continues right with prob b2, turns up otherwise
 * Two incoming arrows leave through both outgoing edges.
 */
#ifndef KPZLAB_SIXVERTEX_HPP
#define KPZLAB_SIXVERTEX_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "kpzlab/rng.hpp"

namespace kpzlab {

struct S6VParams {
  double q = 0.5;
  std::vector<double> xi{1.0};  // one entry: homogeneous, else per column x = 1..X
  std::vector<double> u{1.0};   // one entry: homogeneous, else per row y = 1..Y

  static S6VParams homogeneous(double q, double xi, double u);
  double xi_at(int x) const;
  double u_at(int y) const;
  // zeta = 1/(xi u sqrt q), homogeneous case only
  double zeta() const;
  void validate() const;
};

struct VertexProbs {
  double b1 = 0, b2 = 0;
};

VertexProbs vertex_probs(const S6VParams& params, int x, int y);

// Vertices (x,y), 1 <= x <= X, 1 <= y <= Y.  Two packed bitplanes with the
// outgoing arrows: up(x,y) and right(x,y).  Incoming arrows are recovered
// as up(x,y-1) and right(x-1,y) (1 on the left boundary).
class HeightField {
 public:
  HeightField() = default;
  HeightField(int X, int Y);

  int X() const { return X_; }
  int Y() const { return Y_; }

  bool up(int x, int y) const { return get(up_, x, y); }
  bool right(int x, int y) const { return get(right_, x, y); }
  bool vin(int x, int y) const { return y > 1 && up(x, y - 1); }
  bool hin(int x, int y) const { return x == 1 || right(x - 1, y); }
  void set(int x, int y, bool up_out, bool right_out);

  // paths at or to the right of x on row y: h(x,y) = y - #{c < x : up(c,y)}
  // 1 <= x <= X+1, 1 <= y <= Y
  long height(int x, int y) const;
  double height(double x, int y) const;  // linear interpolation
  std::vector<long> height_row(int y) const;  // h(1..X+1, y)

  std::string row_to_csv(int y) const;  // "x,h"
  std::vector<std::uint8_t> to_bitplanes() const;
  static HeightField from_bitplanes(const std::vector<std::uint8_t>& bytes);

  bool operator==(const HeightField& o) const {
    return X_ == o.X_ && Y_ == o.Y_ && up_ == o.up_ && right_ == o.right_;
  }

 private:
  int X_ = 0, Y_ = 0;
  std::size_t words_ = 0;  // words per row
  std::vector<std::uint64_t> up_, right_;
  bool get(const std::vector<std::uint64_t>& p, int x, int y) const;
  void check(int x, int y) const;
};

HeightField sample_s6v(Rng& rng, const S6VParams& params, int X, int Y);
// homogeneous vertex probabilities given directly; b1, b2 in [0,1]
HeightField sample_s6v(Rng& rng, double b1, double b2, int X, int Y);

// homogeneous parameters with b2 = 1/N and b1 = q/N exactly (u = 1)
S6VParams asep_limit_params(int N, double q);

}  // namespace kpzlab

#endif
