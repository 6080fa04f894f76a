#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qmcst/pointset.hpp"

namespace qmcst {

/// Finite Fourier series f(x) = sum_k c_k exp(2 pi i <k, x>).
struct FourierPolynomial {
  int d = 0;
  std::map<std::vector<int>, std::complex<double>> terms;

  /// Adds c to the coefficient of frequency k.
  void add(std::vector<int> k, std::complex<double> c);
  /// True when c_{-k} = conj(c_k) for every k (within `tol`).
  bool conjugate_symmetric(double tol = 1e-12) const;
  /// Coefficient of the zero frequency (0 if absent).
  std::complex<double> constant() const;
};

/// Real value of f at x. Throws PreconditionError when f is not conjugate
/// symmetric or the imaginary residual exceeds 1e-12 (relative to sum |c_k|).
double fourier_eval(const FourierPolynomial& f, std::span<const double> x);

/// As fourier_eval, without the symmetry check; the residual check stays.
double fourier_eval_trusted(const FourierPolynomial& f, std::span<const double> x);

/// Reads lines `k_1 ... k_d re im`; '#' starts a comment. Throws PreconditionError.
FourierPolynomial read_fourier(std::istream& is, int d);
FourierPolynomial load_fourier(const std::string& path, int d);

}  // namespace qmcst
