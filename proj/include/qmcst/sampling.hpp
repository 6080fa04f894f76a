#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qmcst/pointset.hpp"
#include "qmcst/rng.hpp"

namespace qmcst {

/// n IID uniform points in [0,1)^d drawn from Rng(seed), row by row.
PointSet iid_uniform(std::size_t n, int d, std::uint64_t seed);

/// Primitive polynomial data for one Sobol' dimension (Joe–Kuo layout).
struct SobolPolynomial {
  int degree = 0;           // s
  std::uint32_t coeffs = 0; // a
  std::vector<std::uint32_t> initial;  // m_1..m_s
};

/// Direction-number table. Row d of the text format is `d s a m_1 .. m_s`;
/// dimension 1 is implicit (all m_k = 1). A leading header line is skipped.
class SobolTable {
 public:
  static SobolTable parse(std::string_view text);
  /// The table shipped with the library (new-joe-kuo-6, first 1024 dims).
  static const SobolTable& builtin();
  static std::string_view builtin_sha256();

  int max_dimension() const { return static_cast<int>(polys_.size()) + 1; }
  /// Polynomial for dimension `dim` (2-based, as in the file).
  const SobolPolynomial& polynomial(int dim) const { return polys_.at(dim - 2); }

 private:
  std::vector<SobolPolynomial> polys_;
};

enum class ScrambleKind { None, DigitalShift, Owen };

struct Scramble {
  ScrambleKind kind = ScrambleKind::None;
  std::uint64_t seed = 0;

  static Scramble none() { return {}; }
  static Scramble digital_shift(std::uint64_t seed) { return {ScrambleKind::DigitalShift, seed}; }
  static Scramble owen(std::uint64_t seed) { return {ScrambleKind::Owen, seed}; }
};

struct SobolSpec {
  Scramble scramble;
  bool skip_first = false;
};

/// Gray-code Sobol' generator with 32-bit resolution.
class SobolSequence {
 public:
  static constexpr int kBits = 32;

  SobolSequence(int d, SobolSpec spec = {}, const SobolTable& table = SobolTable::builtin());

  int dimension() const { return d_; }
  std::uint64_t index() const { return index_; }

  /// Writes the next point into `out` (size d).
  void next(std::span<double> out);
  /// Raw (unscrambled) 32-bit integers of the next point.
  void next_raw(std::span<std::uint32_t> out);

 private:
  std::uint32_t scramble(std::uint32_t x, int j) const;

  int d_;
  SobolSpec spec_;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> shifts_;
  std::vector<std::uint64_t> owen_seeds_;
  std::uint64_t index_ = 0;
};

/// The first n points of the Sobol' sequence under `spec` (n <= 2^32).
PointSet sobol(std::size_t n, int d, const SobolSpec& spec = {});

/// Nested uniform (Owen) scramble of the 32 bits of x under `seed`.
std::uint32_t owen_scramble(std::uint32_t x, std::uint64_t seed);

/// Standard normal quantile; Acklam's rational approximation refined by one
/// Halley step against erfc. Throws for u outside (0,1).
double inverse_normal_cdf(double u);

}  // namespace qmcst
