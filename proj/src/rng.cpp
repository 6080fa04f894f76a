#include "qmcst/rng.hpp"

namespace qmcst {

std::uint64_t Rng::below(std::uint64_t bound) {
  // Largest multiple of bound that fits; reject the tail to avoid modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

}  // namespace qmcst
