#include "qmcst/integrands.hpp"

#include <cmath>
#include <memory>

#include "qmcst/sampling.hpp"

namespace qmcst {

double truncation_test(std::span<const double> x) {
  double prod = 1.0;
  double sum = 0.0;
  double sign = -1.0;
  for (double xi : x) {
    prod *= xi;
    sum += sign * prod;
    sign = -sign;
  }
  return sum;
}

double truncation_test_exact_integral(int d) {
  if (d < 1) throw PreconditionError("d must be >= 1");
  return (1.0 - std::pow(-0.5, d)) / -3.0;
}

void AsianParams::validate() const {
  if (!(s0 > 0.0 && strike > 0.0 && sigma > 0.0 && maturity > 0.0)) {
    throw PreconditionError("asian: s0, strike, sigma and maturity must be positive");
  }
  if (!std::isfinite(rate)) throw PreconditionError("asian: rate must be finite");
  if (d < 1) throw PreconditionError("asian: d must be >= 1");
}

double asian_call_payoff(std::span<const double> u, const AsianParams& p) {
  if (static_cast<int>(u.size()) != p.d) throw PreconditionError("asian: point dimension differs from d");
  const double dt = p.maturity / p.d;
  const double drift = (p.rate - 0.5 * p.sigma * p.sigma) * dt;
  const double vol = p.sigma * std::sqrt(dt);
  double s = p.s0;
  double sum = 0.0;
  for (double uj : u) {
    if (!(uj > 0.0 && uj < 1.0)) throw PreconditionError("asian: coordinates must lie in (0,1)");
    s *= std::exp(drift + vol * inverse_normal_cdf(uj));
    sum += s;
  }
  return std::exp(-p.rate * p.maturity) * std::max(sum / p.d - p.strike, 0.0);
}

double asian_zero_vol_value(const AsianParams& p) {
  const double dt = p.maturity / p.d;
  double sum = 0.0;
  for (int j = 1; j <= p.d; ++j) sum += p.s0 * std::exp(p.rate * j * dt);
  return std::exp(-p.rate * p.maturity) * std::max(sum / p.d - p.strike, 0.0);
}

NamedIntegrand make_integrand(const std::string& name, int d, const AsianParams& params) {
  if (d < 1) throw PreconditionError("d must be >= 1");
  if (name == "truncation") {
    return {name, d, [](std::span<const double> x) { return truncation_test(x); },
            truncation_test_exact_integral(d)};
  }
  if (name == "asian") {
    params.validate();
    if (params.d != d) throw PreconditionError("asian: d differs from the number of monitoring dates");
    const AsianParams defaults;
    const bool is_default = params.s0 == defaults.s0 && params.strike == defaults.strike &&
                            params.maturity == defaults.maturity && params.rate == defaults.rate &&
                            params.sigma == defaults.sigma && params.d == defaults.d;
    if (!is_default) throw PreconditionError("asian: no reference value for non-default parameters");
    return {name, d, [params](std::span<const double> u) { return asian_call_payoff(u, params); },
            kAsianReference};
  }
  if (name.rfind("fourier:", 0) == 0) {
    auto f = std::make_shared<FourierPolynomial>(load_fourier(name.substr(8), d));
    if (!f->conjugate_symmetric()) {
      throw PreconditionError("fourier: coefficients are not conjugate symmetric");
    }
    const double exact = f->constant().real();
    return {name, d, [f](std::span<const double> x) { return fourier_eval_trusted(*f, x); }, exact};
  }
  throw PreconditionError("unknown integrand '" + name + "'");
}

}  // namespace qmcst
