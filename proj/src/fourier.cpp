#include "qmcst/fourier.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qmcst {

void FourierPolynomial::add(std::vector<int> k, std::complex<double> c) {
  if (static_cast<int>(k.size()) != d) throw PreconditionError("frequency dimension mismatch");
  terms[std::move(k)] += c;
}

bool FourierPolynomial::conjugate_symmetric(double tol) const {
  for (const auto& [k, c] : terms) {
    std::vector<int> neg(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) neg[j] = -k[j];
    auto it = terms.find(neg);
    const std::complex<double> partner = it == terms.end() ? 0.0 : it->second;
    if (std::abs(partner - std::conj(c)) > tol) return false;
  }
  return true;
}

std::complex<double> FourierPolynomial::constant() const {
  auto it = terms.find(std::vector<int>(d, 0));
  return it == terms.end() ? 0.0 : it->second;
}

double fourier_eval_trusted(const FourierPolynomial& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.d) throw PreconditionError("fourier: point dimension mismatch");
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::complex<double> sum = 0.0;
  double scale = 1.0;
  for (const auto& [k, c] : f.terms) {
    double phase = 0.0;
    for (int j = 0; j < f.d; ++j) phase += k[j] * x[j];
    // Reduce before multiplying by 2 pi so large frequencies keep precision.
    phase -= std::round(phase);
    sum += c * std::polar(1.0, kTwoPi * phase);
    scale += std::abs(c);
  }
  if (std::abs(sum.imag()) > 1e-12 * scale) {
    throw PreconditionError("fourier: imaginary residual exceeds tolerance");
  }
  return sum.real();
}

double fourier_eval(const FourierPolynomial& f, std::span<const double> x) {
  if (!f.conjugate_symmetric()) throw PreconditionError("fourier: coefficients are not conjugate symmetric");
  return fourier_eval_trusted(f, x);
}

FourierPolynomial read_fourier(std::istream& is, int d) {
  if (d < 1) throw PreconditionError("fourier: d must be >= 1");
  FourierPolynomial f{d, {}};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<int> k(d);
    if (!(ls >> k[0])) continue;
    for (int j = 1; j < d; ++j) {
      if (!(ls >> k[j])) throw PreconditionError("fourier: short line " + std::to_string(lineno));
    }
    double re, im;
    if (!(ls >> re >> im)) throw PreconditionError("fourier: missing coefficient on line " +
                                                   std::to_string(lineno));
    std::string extra;
    if (ls >> extra) throw PreconditionError("fourier: trailing data on line " + std::to_string(lineno));
    f.add(std::move(k), {re, im});
  }
  return f;
}

FourierPolynomial load_fourier(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_fourier(in, d);
}

}  // namespace qmcst
