#include "qmcst/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmcst/rng.hpp"

namespace qmcst {

namespace {

struct Best {
  double value = 0.0;
  std::vector<double> corner;
  bool closed = false;
};

void consider(Best& best, double value, const std::vector<double>& corner, bool closed) {
  if (value > best.value) {
    best.value = value;
    best.corner = corner;
    best.closed = closed;
  }
}

// `pts` stays sorted by the last coordinate; filtering preserves that order.
void sweep(const std::vector<const double*>& pts, int dim, int d, double vol, double inv_n,
           bool closed, std::vector<double>& corner, Best& best) {
  const std::size_t m = pts.size();
  if (dim == d - 1) {
    std::size_t i = 0;
    while (i < m) {
      const double v = pts[i][dim];
      std::size_t e = i;
      while (e < m && pts[e][dim] == v) ++e;
      corner[dim] = v;
      if (closed) {
        consider(best, static_cast<double>(e) * inv_n - vol * v, corner, true);
      } else {
        consider(best, vol * v - static_cast<double>(i) * inv_n, corner, false);
      }
      i = e;
    }
    if (!closed) {
      corner[dim] = 1.0;
      consider(best, vol - static_cast<double>(m) * inv_n, corner, false);
    }
    return;
  }
  std::vector<double> cuts(m);
  for (std::size_t i = 0; i < m; ++i) cuts[i] = pts[i][dim];
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (!closed) cuts.push_back(1.0);
  std::vector<const double*> sub;
  sub.reserve(m);
  for (double a : cuts) {
    sub.clear();
    for (const double* p : pts) {
      if (closed ? p[dim] <= a : p[dim] < a) sub.push_back(p);
    }
    corner[dim] = a;
    sweep(sub, dim + 1, d, vol * a, inv_n, closed, corner, best);
  }
}

void check_nonempty(const PointSet& points) {
  if (points.size() == 0) throw PreconditionError("star discrepancy of an empty point set");
}

}  // namespace

DiscrepancyReport star_discrepancy_exact(const PointSet& points) {
  check_nonempty(points);
  const int d = points.dimension();
  if (d > kMaxExactDimension) {
    throw DimensionTooLarge("exact star discrepancy supports d <= " +
                            std::to_string(kMaxExactDimension) + ", got d = " + std::to_string(d));
  }
  std::vector<const double*> pts(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) pts[i] = points.point(i).data();
  std::stable_sort(pts.begin(), pts.end(),
                   [d](const double* a, const double* b) { return a[d - 1] < b[d - 1]; });
  const double inv_n = 1.0 / static_cast<double>(points.size());
  Best best;
  best.corner.assign(d, 0.0);
  std::vector<double> corner(d);
  sweep(pts, 0, d, 1.0, inv_n, false, corner, best);
  sweep(pts, 0, d, 1.0, inv_n, true, corner, best);
  return {best.value, best.corner, best.closed, DiscrepancyMethod::Exact};
}

DiscrepancyReport star_discrepancy_lower_bound(const PointSet& points, std::size_t samples,
                                               std::uint64_t seed) {
  check_nonempty(points);
  const int d = points.dimension();
  const std::size_t n = points.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  Best best;
  best.corner.assign(d, 0.0);
  std::vector<double> corner(d);
  auto evaluate = [&] {
    std::size_t open = 0, closed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto p = points.point(i);
      bool lt = true, le = true;
      for (int j = 0; j < d && le; ++j) {
        lt = lt && p[j] < corner[j];
        le = p[j] <= corner[j];
      }
      open += lt && le;
      closed += le;
    }
    double vol = 1.0;
    for (double a : corner) vol *= a;
    consider(best, vol - static_cast<double>(open) * inv_n, corner, false);
    consider(best, static_cast<double>(closed) * inv_n - vol, corner, true);
  };
  for (std::size_t i = 0; i < n; ++i) {
    auto p = points.point(i);
    std::copy(p.begin(), p.end(), corner.begin());
    evaluate();
  }
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int j = 0; j < d; ++j) {
      const std::uint64_t r = rng.below(n + 1);
      corner[j] = r == n ? 1.0 : points.at(r, j);
    }
    evaluate();
  }
  return {best.value, best.corner, best.closed, DiscrepancyMethod::LowerBound};
}

double integration_error(const PointSet& points, const Integrand& f, double exact) {
  if (points.size() == 0) throw PreconditionError("integration over an empty point set");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < points.size(); ++i) sum += f(points.point(i));
  return static_cast<double>(sum / static_cast<long double>(points.size())) - exact;
}

double wso_variation_squared(const FourierPolynomial& f, const WeightProfile& profile) {
  if (profile.dimension() != f.d) throw PreconditionError("weight profile dimension differs from d");
  double total = 0.0;
  for (const auto& [k, c] : f.terms) {
    double prod = 1.0;
    bool zero = true;
    for (int j = 0; j < f.d; ++j) {
      if (k[j] == 0) continue;
      zero = false;
      const double g = profile.gamma(j);
      if (g == 0.0) {
        throw InfiniteVariation("frequency with k_" + std::to_string(j + 1) +
                                " != 0 meets a zero weight");
      }
      prod *= 1.0 + std::abs(k[j]) / (g * g);
    }
    if (!zero) total += std::norm(c) * (prod - 1.0);
  }
  return total;
}

namespace {

struct AuditCounts {
  std::int64_t initial = 0;
  std::int64_t leaf = 0;
  // sigma_t * disc_t per lineage step.
  std::vector<std::int64_t> signed_disc;
};

AuditCounts audit_counts(const TransferenceTrail& trail, std::size_t leaf, const Region& region,
                         const std::vector<TransferenceTrail::LineageStep>& path) {
  const PointSet& pop = trail.population();
  if (region.dimension() != pop.dimension()) throw PreconditionError("region dimension mismatch");
  std::vector<char> inside(pop.size());
  AuditCounts c;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    inside[i] = region.contains(pop.point(i));
    c.initial += inside[i];
  }
  for (auto m : trail.node(trail.splits(), leaf).members) c.leaf += inside[m];
  for (const auto& step : path) {
    const TrailNode& node = trail.node(step.t, step.node);
    if (node.coloring.signs.size() != node.members.size()) {
      throw PreconditionError("trail node (" + std::to_string(step.t) + ", " +
                              std::to_string(step.node) + ") carries no coloring");
    }
    std::int64_t disc = 0;
    for (std::size_t j = 0; j < node.members.size(); ++j) {
      if (inside[node.members[j]]) disc += node.coloring.signs[j];
    }
    c.signed_disc.push_back(step.sigma * disc);
  }
  return c;
}

}  // namespace

double transference_audit(const TransferenceTrail& trail, std::size_t leaf,
                          std::span<const Region> regions) {
  const auto path = trail.lineage(leaf);
  const double n0 = static_cast<double>(trail.population().size());
  double worst = 0.0;
  for (const Region& region : regions) {
    const AuditCounts c = audit_counts(trail, leaf, region, path);
    const double vol = region.volume();
    const double nT = static_cast<double>(trail.node(trail.splits(), leaf).members.size());
    const double h_leaf = vol - static_cast<double>(c.leaf) / nT;
    double rhs = vol - static_cast<double>(c.initial) / n0;
    for (std::size_t t = 0; t < path.size(); ++t) {
      const double nt = static_cast<double>(trail.node(path[t].t, path[t].node).members.size());
      rhs += static_cast<double>(c.signed_disc[t]) / nt;
    }
    worst = std::max(worst, std::abs(h_leaf - rhs));
  }
  return worst;
}

std::int64_t transference_audit_exact(const TransferenceTrail& trail, std::size_t leaf,
                                      std::span<const Region> regions) {
  const auto path = trail.lineage(leaf);
  const auto n0 = static_cast<std::int64_t>(trail.population().size());
  std::int64_t worst = 0;
  for (const Region& region : regions) {
    const AuditCounts c = audit_counts(trail, leaf, region, path);
    const auto nT = static_cast<std::int64_t>(trail.node(trail.splits(), leaf).members.size());
    if (nT == 0 || n0 % nT != 0) throw PreconditionError("leaf size does not divide n_0");
    std::int64_t r = c.initial - c.leaf * (n0 / nT);
    for (std::size_t t = 0; t < path.size(); ++t) {
      const auto nt = static_cast<std::int64_t>(trail.node(path[t].t, path[t].node).members.size());
      r -= c.signed_disc[t] * (n0 / nt);
    }
    worst = std::max(worst, r < 0 ? -r : r);
  }
  return worst;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw PreconditionError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ErrorSummary summarize(const std::map<std::uint64_t, std::vector<double>>& errors_by_n) {
  ErrorSummary s;
  std::vector<double> xs, ys;
  for (const auto& [n, errors] : errors_by_n) {
    if (errors.empty()) throw PreconditionError("no errors recorded for n = " + std::to_string(n));
    ErrorRow row;
    row.n = n;
    row.count = errors.size();
    std::vector<double> abs_errors(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i) abs_errors[i] = std::abs(errors[i]);
    double sum = 0.0;
    for (double a : abs_errors) sum += a;
    row.mae = sum / static_cast<double>(errors.size());
    row.iqr = quantile(errors, 0.75) - quantile(errors, 0.25);
    row.abs_q25 = quantile(abs_errors, 0.25);
    row.abs_q75 = quantile(abs_errors, 0.75);
    if (n > 0 && row.mae > 0.0) {
      xs.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(row.mae));
    }
    s.rows.push_back(row);
  }
  if (xs.size() >= 2) {
    const double k = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    s.alpha = -sxy / sxx;
  }
  return s;
}

}  // namespace qmcst
