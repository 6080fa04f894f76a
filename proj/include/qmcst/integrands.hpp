#pragma once

#include <functional>
#include <span>
#include <string>

#include "qmcst/fourier.hpp"
#include "qmcst/metrics.hpp"

namespace qmcst {

/// f(x) = sum_{i=1}^d (-1)^i prod_{j<=i} x_j.
double truncation_test(std::span<const double> x);

/// Exact integral of truncation_test over [0,1]^d: (1 - (-1/2)^d) / (-3).
double truncation_test_exact_integral(int d);

struct AsianParams {
  double s0 = 50.0;
  double strike = 45.0;
  double maturity = 1.0;
  double rate = 0.05;
  double sigma = 0.3;
  int d = 12;

  void validate() const;
};

/// Discounted arithmetic-average call payoff along the incremental GBM path
/// driven by z_j = inverse_normal_cdf(u_j). u must lie strictly inside (0,1)^d.
double asian_call_payoff(std::span<const double> u, const AsianParams& p);

/// e^{-rT} ((1/d) sum_j s0 e^{r j T/d} - K)^+, the payoff when sigma = 0.
double asian_zero_vol_value(const AsianParams& p);

/// Reference value of the default Asian option.
inline constexpr double kAsianReference = 7.2110915;

struct NamedIntegrand {
  std::string name;
  int d = 0;
  Integrand f;
  double exact = 0.0;
};

/// Looks up `truncation`, `asian` or `fourier:<file>` for dimension d.
/// The Asian integrand requires d == params.d and its `exact` is kAsianReference
/// for the default parameters. Throws PreconditionError for unknown names.
NamedIntegrand make_integrand(const std::string& name, int d, const AsianParams& params = {});

}  // namespace qmcst
