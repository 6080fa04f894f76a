#include "qmcst/sampling.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace qmcst {

namespace detail {
extern const std::string_view kSobolTableText;
extern const std::string_view kSobolTableSha256;
}  // namespace detail

PointSet iid_uniform(std::size_t n, int d, std::uint64_t seed) {
  if (d < 1) throw PreconditionError("iid_uniform: d must be >= 1");
  Rng rng(seed);
  std::vector<double> coords(n * static_cast<std::size_t>(d));
  for (auto& x : coords) x = rng.uniform();
  return PointSet(d, std::move(coords), {seed, "iid"});
}

SobolTable SobolTable::parse(std::string_view text) {
  SobolTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  int expected = 2;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'd' || line[0] == '#') continue;
    std::istringstream ls(line);
    int dim = 0;
    SobolPolynomial p;
    if (!(ls >> dim >> p.degree >> p.coeffs)) throw PreconditionError("sobol table: bad row");
    if (dim != expected) throw PreconditionError("sobol table: rows out of order at " + line);
    if (p.degree < 1 || p.degree > SobolSequence::kBits) {
      throw PreconditionError("sobol table: bad degree");
    }
    p.initial.resize(p.degree);
    for (auto& m : p.initial) {
      if (!(ls >> m)) throw PreconditionError("sobol table: short row for dim " + std::to_string(dim));
    }
    for (int k = 0; k < p.degree; ++k) {
      // m_k must be odd and below 2^k (1-based k)
      if (p.initial[k] % 2 == 0 || p.initial[k] >= (1u << (k + 1))) {
        throw PreconditionError("sobol table: invalid m_k in dim " + std::to_string(dim));
      }
    }
    t.polys_.push_back(std::move(p));
    ++expected;
  }
  return t;
}

const SobolTable& SobolTable::builtin() {
  static const SobolTable table = parse(detail::kSobolTableText);
  return table;
}

std::string_view SobolTable::builtin_sha256() { return detail::kSobolTableSha256; }

std::uint32_t owen_scramble(std::uint32_t x, std::uint64_t seed) {
  std::uint32_t out = 0;
  for (int b = 0; b < 32; ++b) {
    // the flip for bit b depends only on the b leading bits of x
    const std::uint64_t prefix = b == 0 ? 0 : (x >> (32 - b));
    const std::uint64_t key = (static_cast<std::uint64_t>(b) << 32) | prefix;
    const std::uint64_t flip = splitmix64(seed ^ (key * 0x9e3779b97f4a7c15ULL)) & 1u;
    const std::uint32_t bit = (x >> (31 - b)) & 1u;
    out |= static_cast<std::uint32_t>(bit ^ flip) << (31 - b);
  }
  return out;
}

SobolSequence::SobolSequence(int d, SobolSpec spec, const SobolTable& table)
    : d_(d), spec_(spec), directions_(d), state_(d, 0) {
  if (d < 1) throw PreconditionError("sobol: d must be >= 1");
  if (d > table.max_dimension()) {
    throw PreconditionError("sobol: dimension " + std::to_string(d) + " exceeds table maximum " +
                            std::to_string(table.max_dimension()));
  }
  for (int k = 0; k < kBits; ++k) directions_[0][k] = 1u << (kBits - 1 - k);
  for (int j = 1; j < d; ++j) {
    const auto& poly = table.polynomial(j + 1);
    const int s = poly.degree;
    std::array<std::uint32_t, kBits> m{};
    for (int k = 0; k < s && k < kBits; ++k) m[k] = poly.initial[k];
    for (int k = s; k < kBits; ++k) {
      std::uint32_t v = m[k - s] ^ (m[k - s] << s);
      for (int i = 1; i < s; ++i) {
        if ((poly.coeffs >> (s - 1 - i)) & 1u) v ^= m[k - i] << i;
      }
      m[k] = v;
    }
    for (int k = 0; k < kBits; ++k) directions_[j][k] = m[k] << (kBits - 1 - k);
  }
  if (spec_.scramble.kind == ScrambleKind::DigitalShift) {
    Rng rng(spec_.scramble.seed);
    shifts_.resize(d);
    for (auto& s : shifts_) s = static_cast<std::uint32_t>(rng.next_u64() >> 32);
  } else if (spec_.scramble.kind == ScrambleKind::Owen) {
    owen_seeds_.resize(d);
    for (int j = 0; j < d; ++j) owen_seeds_[j] = Rng::derive(spec_.scramble.seed, j);
  }
  if (spec_.skip_first) {
    std::vector<std::uint32_t> scratch(d);
    next_raw(scratch);
  }
}

void SobolSequence::next_raw(std::span<std::uint32_t> out) {
  if (index_ >= (std::uint64_t{1} << kBits)) throw PreconditionError("sobol: exhausted 2^32 points");
  for (int j = 0; j < d_; ++j) out[j] = state_[j];
  // Gray-code update: flip the direction number of the lowest zero bit of index
  const int c = std::countr_one(index_);
  if (c < kBits) {
    for (int j = 0; j < d_; ++j) state_[j] ^= directions_[j][c];
  }
  ++index_;
}

std::uint32_t SobolSequence::scramble(std::uint32_t x, int j) const {
  switch (spec_.scramble.kind) {
    case ScrambleKind::None: return x;
    case ScrambleKind::DigitalShift: return x ^ shifts_[j];
    case ScrambleKind::Owen: return owen_scramble(x, owen_seeds_[j]);
  }
  return x;
}

void SobolSequence::next(std::span<double> out) {
  if (static_cast<int>(out.size()) != d_) throw PreconditionError("sobol: output size mismatch");
  std::uint32_t raw[64];
  std::vector<std::uint32_t> big;
  std::span<std::uint32_t> buf(raw, std::min(d_, 64));
  if (d_ > 64) {
    big.resize(d_);
    buf = big;
  }
  next_raw(buf);
  for (int j = 0; j < d_; ++j) out[j] = std::ldexp(static_cast<double>(scramble(buf[j], j)), -kBits);
}

PointSet sobol(std::size_t n, int d, const SobolSpec& spec) {
  if (n > (std::uint64_t{1} << 32)) throw PreconditionError("sobol: n exceeds 2^32");
  SobolSequence seq(d, spec);
  std::vector<double> coords(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    seq.next(std::span<double>(coords.data() + i * d, static_cast<std::size_t>(d)));
  }
  std::string label = "sobol";
  if (spec.scramble.kind == ScrambleKind::DigitalShift) label += "-shift";
  if (spec.scramble.kind == ScrambleKind::Owen) label += "-owen";
  return PointSet(d, std::move(coords), {spec.scramble.seed, label});
}

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) throw PreconditionError("inverse_normal_cdf: u outside (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (u < low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - low) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley step on Phi(x) - u; the upper tail evaluates it as (1-u) - Q(x).
  const double e = u <= 0.5 ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - u
                            : (1.0 - u) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  const double g = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= g / (1.0 + 0.5 * x * g);
  return x;
}

}  // namespace qmcst
