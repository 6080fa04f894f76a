#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmcst/dyadic.hpp"
#include "qmcst/fourier.hpp"
#include "qmcst/pointset.hpp"
#include "qmcst/transference.hpp"

namespace qmcst {

enum class DiscrepancyMethod { Exact, LowerBound };

struct DiscrepancyReport {
  double value = 0.0;
  std::vector<double> argmax_corner;
  /// True when the supremum is attained by the closed-box count.
  bool closed_branch = false;
  DiscrepancyMethod method = DiscrepancyMethod::Exact;
};

/// Exact evaluation is only offered for d <= 3.
class DimensionTooLarge : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

inline constexpr int kMaxExactDimension = 3;

/// Exact star discrepancy over anchored boxes [0, a).
///
/// The supremum is attained in the limit at corners whose coordinates come from
/// the point coordinates (plus 1). At every such corner the deficiency
/// vol([0,a)) - #{x < a}/n and the excess #{x <= a}/n - vol([0,a]) are both
/// evaluated; the larger over all corners is the supremum. Points are sorted by
/// the last coordinate once so each innermost sweep is linear: O(n^d) overall.
DiscrepancyReport star_discrepancy_exact(const PointSet& points);

/// Lower bound for any d: evaluates both counts at every point's own corner and
/// at `samples` corners assembled from random point coordinates (or 1).
DiscrepancyReport star_discrepancy_lower_bound(const PointSet& points, std::size_t samples,
                                               std::uint64_t seed);

using Integrand = std::function<double(std::span<const double>)>;

/// Sample mean of f over the points minus `exact`.
double integration_error(const PointSet& points, const Integrand& f, double exact);

/// A zero weight meets a nonzero frequency.
class InfiniteVariation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Squared weighted smoothed-out variation:
///   sum_{k != 0} |c_k|^2 (prod_j (1 + |k_j| / gamma_j^2) - 1).
/// Unit weights give the unweighted smoothed-out variation.
double wso_variation_squared(const FourierPolynomial& f, const WeightProfile& profile);

/// Residual of the lineage identity
///   h_leaf(C) = h_0(C) + sum_t sigma_t disc_t(C) / n_t,   h_t(C) = vol(C) - |C n A_t| / n_t,
/// maximised over regions. Zero regions give 0.
double transference_audit(const TransferenceTrail& trail, std::size_t leaf,
                          std::span<const Region> regions);

/// The same residual multiplied by n_0, computed in integers; the identity
/// holds exactly iff this is 0.
std::int64_t transference_audit_exact(const TransferenceTrail& trail, std::size_t leaf,
                                      std::span<const Region> regions);

/// Linear-interpolation (type 7) quantile of `values`, p in [0,1].
double quantile(std::vector<double> values, double p);

struct ErrorRow {
  std::uint64_t n = 0;
  std::size_t count = 0;
  double mae = 0.0;
  /// Interquartile range of the signed errors.
  double iqr = 0.0;
  /// Quartiles of |error|, the band drawn around the MAE curve.
  double abs_q25 = 0.0;
  double abs_q75 = 0.0;
};

struct ErrorSummary {
  std::vector<ErrorRow> rows;
  /// Negated OLS slope of log MAE on log n; absent with fewer than 2 usable n.
  std::optional<double> alpha;
};

/// Summaries per n of signed errors across seeds; every n needs at least one error.
ErrorSummary summarize(const std::map<std::uint64_t, std::vector<double>>& errors_by_n);

}  // namespace qmcst
