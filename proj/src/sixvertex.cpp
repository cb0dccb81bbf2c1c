#include "kpzlab/sixvertex.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace kpzlab {

S6VParams S6VParams::homogeneous(double q, double xi, double u) {
  S6VParams p;
  p.q = q;
  p.xi = {xi};
  p.u = {u};
  p.validate();
  return p;
}

double S6VParams::xi_at(int x) const {
  if (xi.size() == 1) return xi[0];
  if (x < 1 || x > static_cast<int>(xi.size())) throw std::out_of_range("S6VParams: column outside xi array");
  return xi[x - 1];
}

double S6VParams::u_at(int y) const {
  if (u.size() == 1) return u[0];
  if (y < 1 || y > static_cast<int>(u.size())) throw std::out_of_range("S6VParams: row outside u array");
  return u[y - 1];
}

double S6VParams::zeta() const {
  if (xi.size() != 1 || u.size() != 1) throw std::logic_error("S6VParams::zeta: inhomogeneous parameters");
  return 1.0 / (xi[0] * u[0] * std::sqrt(q));
}

void S6VParams::validate() const {
  if (!(q > 0 && q < 1)) throw std::invalid_argument("S6VParams: q must lie in (0,1)");
  if (xi.empty() || u.empty()) throw std::invalid_argument("S6VParams: empty xi or u");
  const double thr = 1 / std::sqrt(q);
  for (double a : xi)
    for (double b : u)
      if (!(a > 0 && b > 0 && a * b > thr))
        throw std::invalid_argument("S6VParams: need xi_x u_y > q^{-1/2} for all x, y");
}

VertexProbs vertex_probs(const S6VParams& params, int x, int y) {
  const double sq = std::sqrt(params.q);
  const double w = params.xi_at(x) * params.u_at(y);
  if (!(params.q > 0 && params.q < 1) || !(w > 1 / sq))
    throw std::invalid_argument("vertex_probs: need q in (0,1) and xi u > q^{-1/2}");
  const double den = 1 - w / sq;
  return {(1 - sq * w) / den, (1 / params.q - w / sq) / den};
}

HeightField::HeightField(int X, int Y) : X_(X), Y_(Y) {
  if (X < 1 || Y < 1) throw std::invalid_argument("HeightField: window must be at least 1x1");
  words_ = (static_cast<std::size_t>(X) + 63) / 64;
  up_.assign(words_ * static_cast<std::size_t>(Y), 0);
  right_.assign(words_ * static_cast<std::size_t>(Y), 0);
}

void HeightField::check(int x, int y) const {
  if (x < 1 || x > X_ || y < 1 || y > Y_) throw std::out_of_range("HeightField: vertex outside window");
}

bool HeightField::get(const std::vector<std::uint64_t>& p, int x, int y) const {
  check(x, y);
  std::size_t c = static_cast<std::size_t>(x - 1);
  return (p[static_cast<std::size_t>(y - 1) * words_ + c / 64] >> (c % 64)) & 1U;
}

void HeightField::set(int x, int y, bool up_out, bool right_out) {
  check(x, y);
  std::size_t c = static_cast<std::size_t>(x - 1);
  std::size_t k = static_cast<std::size_t>(y - 1) * words_ + c / 64;
  std::uint64_t bit = std::uint64_t{1} << (c % 64);
  up_[k] = up_out ? (up_[k] | bit) : (up_[k] & ~bit);
  right_[k] = right_out ? (right_[k] | bit) : (right_[k] & ~bit);
}

long HeightField::height(int x, int y) const {
  if (y < 1 || y > Y_ || x < 1 || x > X_ + 1) throw std::out_of_range("HeightField::height: outside window");
  const std::uint64_t* row = &up_[static_cast<std::size_t>(y - 1) * words_];
  std::size_t n = static_cast<std::size_t>(x - 1);  // columns 1..x-1
  long cnt = 0;
  for (std::size_t w = 0; w < n / 64; ++w) cnt += std::popcount(row[w]);
  if (n % 64) cnt += std::popcount(row[n / 64] & ((std::uint64_t{1} << (n % 64)) - 1));
  return y - cnt;
}

double HeightField::height(double x, int y) const {
  if (!(x >= 1 && x <= X_ + 1)) throw std::out_of_range("HeightField::height: outside window");
  double fl = std::floor(x);
  int i = static_cast<int>(fl);
  if (i >= X_ + 1) return static_cast<double>(height(X_ + 1, y));
  double lo = static_cast<double>(height(i, y)), hi = static_cast<double>(height(i + 1, y));
  return lo + (x - fl) * (hi - lo);
}

std::vector<long> HeightField::height_row(int y) const {
  if (y < 1 || y > Y_) throw std::out_of_range("HeightField::height_row: outside window");
  std::vector<long> h(static_cast<std::size_t>(X_) + 1);
  long cur = y;
  for (int x = 1; x <= X_ + 1; ++x) {
    h[x - 1] = cur;
    if (x <= X_ && up(x, y)) --cur;
  }
  return h;
}

std::string HeightField::row_to_csv(int y) const {
  std::ostringstream os;
  os << "x,h\n";
  auto h = height_row(y);
  for (std::size_t i = 0; i < h.size(); ++i) os << i + 1 << ',' << h[i] << '\n';
  return os.str();
}

namespace {
void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}
constexpr std::uint32_t kOutPlanes = 1;  // planes hold outgoing arrows
}  // namespace

// "S6V1" | X | Y | flags, then the up plane and the right plane, each row
// as little-endian 64-bit words
std::vector<std::uint8_t> HeightField::to_bitplanes() const {
  std::vector<std::uint8_t> b{'S', '6', 'V', '1'};
  put_u32(b, static_cast<std::uint32_t>(X_));
  put_u32(b, static_cast<std::uint32_t>(Y_));
  put_u32(b, kOutPlanes);
  for (const auto* p : {&up_, &right_})
    for (std::uint64_t w : *p)
      for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
  return b;
}

HeightField HeightField::from_bitplanes(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "S6V1", 4) != 0)
    throw std::invalid_argument("from_bitplanes: bad header");
  int X = static_cast<int>(get_u32(bytes, 4)), Y = static_cast<int>(get_u32(bytes, 8));
  if (get_u32(bytes, 12) != kOutPlanes) throw std::invalid_argument("from_bitplanes: unknown flags");
  HeightField f(X, Y);
  if (bytes.size() != 16 + 2 * 8 * f.up_.size()) throw std::invalid_argument("from_bitplanes: truncated payload");
  std::size_t off = 16;
  for (auto* p : {&f.up_, &f.right_})
    for (auto& w : *p) {
      w = 0;
      for (int i = 0; i < 8; ++i) w |= static_cast<std::uint64_t>(bytes[off++]) << (8 * i);
    }
  return f;
}

namespace {

// P(event) = b through an integer threshold on one raw draw
struct Coin {
  bool always = false;
  std::uint64_t thr = 0;
  explicit Coin(double b) {
    if (b >= 1) always = true;
    else if (b > 0) thr = static_cast<std::uint64_t>(std::ldexp(b, 64));
  }
  bool flip(Rng& rng) const { return always || rng() < thr; }
};

template <class CoinAt>
HeightField sweep(Rng& rng, int X, int Y, CoinAt coins) {
  HeightField f(X, Y);
  std::vector<char> below(static_cast<std::size_t>(X) + 1, 0);  // up arrows from the previous row
  for (int y = 1; y <= Y; ++y) {
    bool h = true;  // step boundary
    for (int x = 1; x <= X; ++x) {
      bool v = below[x];
      bool up_out, right_out;
      if (v && h) {
        up_out = right_out = true;
      } else if (v) {
        up_out = coins(x, y).first.flip(rng);
        right_out = !up_out;
      } else if (h) {
        right_out = coins(x, y).second.flip(rng);
        up_out = !right_out;
      } else {
        up_out = right_out = false;
      }
      f.set(x, y, up_out, right_out);
      below[x] = up_out;
      h = right_out;
    }
  }
  return f;
}

}  // namespace

HeightField sample_s6v(Rng& rng, const S6VParams& params, int X, int Y) {
  params.validate();
  if (X < 1 || Y < 1) throw std::invalid_argument("sample_s6v: window must be at least 1x1");
  if (params.xi.size() == 1 && params.u.size() == 1) {
    auto b = vertex_probs(params, 1, 1);
    std::pair<Coin, Coin> c{Coin(b.b1), Coin(b.b2)};
    return sweep(rng, X, Y, [&](int, int) -> const std::pair<Coin, Coin>& { return c; });
  }
  return sweep(rng, X, Y, [&](int x, int y) {
    auto b = vertex_probs(params, x, y);
    return std::pair<Coin, Coin>{Coin(b.b1), Coin(b.b2)};
  });
}

HeightField sample_s6v(Rng& rng, double b1, double b2, int X, int Y) {
  if (!(b1 >= 0 && b1 <= 1 && b2 >= 0 && b2 <= 1))
    throw std::invalid_argument("sample_s6v: probabilities must lie in [0,1]");
  if (X < 1 || Y < 1) throw std::invalid_argument("sample_s6v: window must be at least 1x1");
  std::pair<Coin, Coin> c{Coin(b1), Coin(b2)};
  return sweep(rng, X, Y, [&](int, int) -> const std::pair<Coin, Coin>& { return c; });
}

S6VParams asep_limit_params(int N, double q) {
  if (!(q > 0 && q < 1)) throw std::invalid_argument("asep_limit_params: q must lie in (0,1)");
  if (N <= 1) throw std::invalid_argument("asep_limit_params: infeasible N (need N > 1)");
  const double y = (N / q - 1) / (N - 1);  // xi u / sqrt q
  return S6VParams::homogeneous(q, std::sqrt(q) * y, 1.0);
}

}  // namespace kpzlab
