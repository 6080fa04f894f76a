#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmcst {

/// Raised when an input violates a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PointSetMeta {
  std::uint64_t seed = 0;
  std::string label;

  friend bool operator==(const PointSetMeta&, const PointSetMeta&) = default;
};

/// Ordered d-dimensional points in [0,1)^d, stored row-major.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(int d, PointSetMeta meta = {});
  PointSet(int d, std::vector<double> coords, PointSetMeta meta = {});

  int dimension() const { return d_; }
  std::size_t size() const { return d_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(d_); }
  bool empty() const { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  double at(std::size_t i, int j) const { return coords_[i * static_cast<std::size_t>(d_) + j]; }

  /// Appends a point; every coordinate must lie in [0,1).
  void push_back(std::span<const double> p);

  std::span<const double> coords() const { return coords_; }
  const PointSetMeta& meta() const { return meta_; }
  PointSetMeta& meta() { return meta_; }

  /// The subset at the given row indices, in that order.
  PointSet subset(std::span<const std::uint32_t> rows) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  int d_ = 0;
  std::vector<double> coords_;
  PointSetMeta meta_;
};

/// One side of an axis-aligned box. Endpoint inclusion is explicit so that both
/// left-open dyadic intervals and half-open anchored boxes can be expressed.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double x) const {
    return (lo_closed ? x >= lo : x > lo) && (hi_closed ? x <= hi : x < hi);
  }
  double length() const { return hi > lo ? hi - lo : 0.0; }
};

/// Axis-aligned box in [0,1]^d used as a test set for discrepancy counts.
struct Region {
  std::vector<Interval> sides;

  static Region unit_cube(int d);
  /// The anchored box [0, corner).
  static Region anchored(std::span<const double> corner);
  /// Product of left-open intervals (lo_j, hi_j].
  static Region left_open(std::span<const double> lo, std::span<const double> hi);

  int dimension() const { return static_cast<int>(sides.size()); }
  bool contains(std::span<const double> p) const;
  double volume() const;
};

/// Writes the `# qmcpts v1` text format (17 significant digits per coordinate).
void write_qmcpts(std::ostream& os, const PointSet& ps);
/// Parses the `# qmcpts v1` text format; throws PreconditionError on malformed input.
PointSet read_qmcpts(std::istream& is);

PointSet load_qmcpts(const std::string& path);
void save_qmcpts(const std::string& path, const PointSet& ps);

/// Formats a double with 17 significant digits (round-trippable).
std::string format_double(double x);

}  // namespace qmcst
