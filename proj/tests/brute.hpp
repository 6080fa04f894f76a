#pragma once

// Slow reference computations shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qmcst/dyadic.hpp"
#include "qmcst/fourier.hpp"
#include "qmcst/pointset.hpp"
#include "qmcst/rng.hpp"

namespace brute {

// sum_{k != 0} |c_k|^2 sum_{nonempty u} prod_{j in u} |k_j| / gamma_j^2, by
// enumerating every subset u.
inline double wso_by_subsets(const qmcst::FourierPolynomial& f, std::span<const double> gammas) {
  const int d = f.d;
  double total = 0.0;
  for (const auto& [k, c] : f.terms) {
    if (std::all_of(k.begin(), k.end(), [](int x) { return x == 0; })) continue;
    double inner = 0.0;
    for (std::uint32_t u = 1; u < (1u << d); ++u) {
      double prod = 1.0;
      for (int j = 0; j < d; ++j) {
        if (u >> j & 1u) prod *= std::abs(k[j]) / (gammas[j] * gammas[j]);
      }
      inner += prod;
    }
    total += std::norm(c) * inner;
  }
  return total;
}

// Supremum of |vol - count/n| over anchored corners on the grid {0, 1/m, ..., 1}^2,
// with both the strict and the inclusive count at every corner.
inline double grid_star_discrepancy_2d(const qmcst::PointSet& ps, int m) {
  const double n = static_cast<double>(ps.size());
  double best = 0.0;
  for (int a = 0; a <= m; ++a) {
    for (int b = 0; b <= m; ++b) {
      const double x = static_cast<double>(a) / m, y = static_cast<double>(b) / m;
      std::size_t lt = 0, le = 0;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        lt += ps.at(i, 0) < x && ps.at(i, 1) < y;
        le += ps.at(i, 0) <= x && ps.at(i, 1) <= y;
      }
      best = std::max({best, x * y - lt / n, le / n - x * y});
    }
  }
  return best;
}

// Random conjugate-symmetric polynomial with `support` frequency pairs (k, -k)
// in [-3, 3]^d, possibly including a constant term.
inline qmcst::FourierPolynomial random_fourier(qmcst::Rng& rng, int d, int support) {
  qmcst::FourierPolynomial f{d, {}};
  for (int s = 0; s < support; ++s) {
    std::vector<int> k(d), neg(d);
    for (int j = 0; j < d; ++j) {
      k[j] = static_cast<int>(rng.below(7)) - 3;
      neg[j] = -k[j];
    }
    const std::complex<double> c(rng.uniform() - 0.5, rng.uniform() - 0.5);
    if (k == neg) {
      f.add(k, c.real());
    } else {
      f.add(k, c);
      f.add(neg, std::conj(c));
    }
  }
  return f;
}

}  // namespace brute
