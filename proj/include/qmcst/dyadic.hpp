#pragma once

// Dyadic boxes, product weights and sparse weighted incidence vectors.
//
// Intervals are left-open: level l, offset o denotes (o/2^l, (o+1)/2^l]; level 0
// is the trivial interval (0,1]. A point coordinate x in [0,1) is assigned to
// offset floor(x * 2^l) at every level, which differs from the left-open rule
// only for x on a dyadic boundary (a null set once the system is randomly
// shifted). The all-trivial box contains every point.

#include <cstdint>
#include <span>
#include <vector>

#include "qmcst/pointset.hpp"

namespace qmcst {

enum class WeightMode { Full, Superposition, Truncation };

/// Non-increasing product weights gamma_1 >= ... >= gamma_d >= 0 plus the
/// structural mode of the incidence system.
class WeightProfile {
 public:
  /// Full dyadic system with the given weights.
  static WeightProfile full(std::vector<double> gammas);
  static WeightProfile unit(int d) { return full(std::vector<double>(d, 1.0)); }
  /// Boxes with at most s_eff nontrivial dimensions.
  static WeightProfile superposition(std::vector<double> gammas, int s_eff);
  /// Weights (1,...,1,0,...,0) with s_eff ones.
  static WeightProfile truncation(int d, int s_eff);

  int dimension() const { return static_cast<int>(gammas_.size()); }
  WeightMode mode() const { return mode_; }
  /// Effective dimension; equals d in Full mode.
  int s_eff() const { return s_eff_; }
  std::span<const double> gammas() const { return gammas_; }
  double gamma(int j) const { return gammas_[j]; }
  /// Number of leading coordinates with strictly positive weight.
  int active_dimensions() const { return active_; }

  friend bool operator==(const WeightProfile&, const WeightProfile&) = default;

 private:
  WeightProfile(std::vector<double> gammas, WeightMode mode, int s_eff);

  std::vector<double> gammas_;
  WeightMode mode_ = WeightMode::Full;
  int s_eff_ = 0;
  int active_ = 0;
};

struct DyadicInterval {
  int level = 0;
  std::uint64_t offset = 0;

  bool trivial() const { return level == 0; }
  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

/// A d-tuple of dyadic intervals.
struct DyadicBox {
  std::vector<DyadicInterval> dims;

  int dimension() const { return static_cast<int>(dims.size()); }
  int nontrivial_count() const;
  /// The box as a left-open Region.
  Region region() const;
  friend bool operator==(const DyadicBox&, const DyadicBox&) = default;
};

/// Product of gamma_j over the nontrivial dimensions of `box` (empty product 1).
double box_weight(const DyadicBox& box, const WeightProfile& profile);

/// floor(x * 2^level) for x in [0,1).
std::uint64_t locate(double x, int level);

/// (x - s) mod 1 for x, s in [0,1); a result that rounds to 1 becomes the
/// largest double below 1.
double fold_shift(double x, double s);

/// Interval index within one dimension: 0 for the trivial interval, otherwise
/// (2^level - 1) + offset, which lies in [1, 2^(h+1) - 2].
inline std::uint64_t interval_index(const DyadicInterval& iv) {
  return iv.level == 0 ? 0 : ((std::uint64_t{1} << iv.level) - 1) + iv.offset;
}
DyadicInterval interval_from_index(std::uint64_t index);

/// Fixed bijection between admissible boxes and [0, size()).
///
/// Full:          mixed radix over all d dimensions, radix 2^(h+1) - 1, dimension
///                0 least significant.
/// Truncation(s): the Full scheme over the first s dimensions only.
/// Superposition(s): boxes grouped by their number k of nontrivial dimensions
///                (k = 0..s); within a group, by colexicographic rank of the
///                support set, then mixed radix over the support (radix
///                2^(h+1) - 2, lowest support dimension least significant).
class BoxIndex {
 public:
  BoxIndex(int d, int h, WeightMode mode, int s_eff);

  int dimension() const { return d_; }
  int depth() const { return h_; }
  WeightMode mode() const { return mode_; }
  std::uint64_t size() const { return size_; }

  /// Throws PreconditionError if the box is not admissible.
  std::uint64_t index_of(const DyadicBox& box) const;
  DyadicBox box_at(std::uint64_t index) const;

  /// Dimensions that can carry a nontrivial interval.
  int indexed_dimensions() const { return indexed_; }
  int max_nontrivial() const { return max_nontrivial_; }

  // Index pieces used by the incidence builder.
  std::uint64_t radix() const { return radix_; }
  std::uint64_t subset_base(int k) const { return subset_base_[k]; }
  std::uint64_t radix_power(int k) const { return radix_pow_[k]; }
  std::uint64_t binomial(int n, int k) const;

 private:
  int d_;
  int h_;
  WeightMode mode_;
  int indexed_;
  int max_nontrivial_;
  std::uint64_t radix_;
  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> radix_pow_;
  std::vector<std::uint64_t> subset_base_;
  std::vector<std::vector<std::uint64_t>> binom_;
};

/// Index of all admissible boxes for (d, h, mode). Full mode holds exactly
/// (2^(h+1)-1)^d boxes; Superposition(s) holds sum_{k<=s} C(d,k) (2^(h+1)-2)^k;
/// Truncation(s) holds (2^(h+1)-1)^s. Throws before allocating if the index
/// space does not fit in 63 bits.
BoxIndex enumerate_boxes(int d, int h, WeightMode mode, int s_eff);
BoxIndex enumerate_boxes(int h, const WeightProfile& profile);

struct SparseEntry {
  std::uint64_t index;
  double value;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse real vector with entries sorted by strictly increasing index.
struct SparseVector {
  std::vector<SparseEntry> entries;
  std::uint64_t dimension = 0;

  std::size_t nnz() const { return entries.size(); }
  double squared_norm() const;
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

using SparseIncidence = SparseVector;

/// Squared norm of the box part of any point's incidence vector:
/// prod_j (1 + h gamma_j^2) in Full/Truncation mode and
/// sum_{k<=s} e_k(h gamma_1^2, ..., h gamma_d^2) in Superposition mode.
double incidence_norm_squared(const WeightProfile& profile, int h);

/// Default refinement depth: ceil(log2(d n)) in Full mode and
/// ceil(log2(s_eff n)) when an effective dimension is set.
int default_depth(const WeightProfile& profile, std::uint64_t n);

/// Builds weighted incidence vectors for points against the dyadic system
/// shifted by `shift`; the point is mapped to (p - shift) mod 1 and located in
/// the unshifted system. Reuses internal buffers; not thread-safe.
class IncidenceBuilder {
 public:
  IncidenceBuilder(const WeightProfile& profile, int h, std::vector<double> shift);

  const BoxIndex& index() const { return index_; }
  const WeightProfile& profile() const { return profile_; }
  int depth() const { return h_; }
  std::span<const double> shift() const { return shift_; }

  /// Appends the sorted box entries for `point` to `out.entries` with indices
  /// offset by `index_offset`.
  void append(std::span<const double> point, SparseVector& out, std::uint64_t index_offset = 0);
  SparseIncidence build(std::span<const double> point);

 private:
  void product(int pos, std::uint64_t index, double weight, std::uint64_t offset,
               std::vector<SparseEntry>& out) const;
  void superposition(std::vector<SparseEntry>& out, std::uint64_t offset);

  WeightProfile profile_;
  int h_;
  std::vector<double> shift_;
  BoxIndex index_;
  // per indexed dimension: list of (interval index, weight) for levels 0..h
  std::vector<std::vector<SparseEntry>> per_dim_;
  std::vector<int> support_;
};

/// Weighted indicator of `point` against the dyadic system of depth h shifted by `shift`.
SparseIncidence incidence(std::span<const double> point, int h, const WeightProfile& profile,
                          std::span<const double> shift);

}  // namespace qmcst
