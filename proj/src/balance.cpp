#include "qmcst/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qmcst {

double WalkConfig::lambda(std::uint64_t count) const {
  if (const auto* s = std::get_if<StrictLambda>(&lambda_mode)) {
    if (!(s->delta > 0.0 && s->delta < 1.0)) throw PreconditionError("delta must lie in (0,1)");
    const double mn = static_cast<double>(std::max<std::uint64_t>(m, 1)) *
                      static_cast<double>(std::max<std::uint64_t>(count, 1));
    return 30.0 * std::log(mn / s->delta);
  }
  const double l = std::get<GreedyLambda>(lambda_mode).lambda;
  if (!(l > 0.0)) throw PreconditionError("greedy lambda must be positive");
  return l;
}

long Coloring::sum() const {
  return std::accumulate(signs.begin(), signs.end(), 0L);
}

SelfBalancingWalk::SelfBalancingWalk(const WalkConfig& config, std::uint64_t count, Rng& rng)
    : config_(config), rng_(rng), lambda_(config.lambda(count)) {}

double SelfBalancingWalk::alignment(const SparseVector& v) const {
  double s = 0.0;
  for (const auto& e : v.entries) {
    auto it = w_.find(e.index);
    if (it != w_.end()) s += it->second * e.value;
  }
  return s;
}

double SelfBalancingWalk::max_abs() const {
  double m = 0.0;
  for (const auto& [k, x] : w_) m = std::max(m, std::abs(x));
  return m;
}

double SelfBalancingWalk::at(std::uint64_t index) const {
  auto it = w_.find(index);
  return it == w_.end() ? 0.0 : it->second;
}

int SelfBalancingWalk::step(const SparseVector& v) {
  if (steps_ == 0) {
    dimension_ = v.dimension;
  } else if (v.dimension != dimension_) {
    throw PreconditionError("walk input dimension changed from " + std::to_string(dimension_) +
                            " to " + std::to_string(v.dimension));
  }
  ++steps_;
  const double a = alignment(v);
  int sign;
  if (config_.strict()) {
    if (std::abs(a) > lambda_ || exceeded_) {
      throw WalkFailure(steps_, "self-balancing walk failed at step " + std::to_string(steps_));
    }
    const double p = 0.5 - a / (2.0 * lambda_);
    sign = rng_.uniform() < p ? 1 : -1;
  } else if (std::abs(a) > lambda_) {
    sign = a > 0.0 ? -1 : 1;
  } else {
    const double p = std::clamp(0.5 - a / (2.0 * lambda_), 0.0, 1.0);
    sign = rng_.uniform() < p ? 1 : -1;
  }
  for (const auto& e : v.entries) {
    double& x = w_[e.index];
    x += sign * e.value;
    if (std::abs(x) > lambda_) exceeded_ = true;
  }
  return sign;
}

Coloring self_balancing_walk(std::span<const SparseVector> vectors, const WalkConfig& config,
                             Rng& rng) {
  SelfBalancingWalk walk(config, vectors.size(), rng);
  Coloring c;
  c.signs.reserve(vectors.size());
  for (const auto& v : vectors) c.signs.push_back(static_cast<std::int8_t>(walk.step(v)));
  return c;
}

void difference(const SparseVector& a, const SparseVector& b, double scale, SparseVector& out) {
  if (a.dimension != b.dimension) throw PreconditionError("difference: dimension mismatch");
  out.entries.clear();
  out.dimension = a.dimension;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->index < ib->index)) {
      out.entries.push_back({ia->index, ia->value * scale});
      ++ia;
    } else if (ia == a.entries.end() || ib->index < ia->index) {
      out.entries.push_back({ib->index, -ib->value * scale});
      ++ib;
    } else {
      const double v = (ia->value - ib->value) * scale;
      if (v != 0.0) out.entries.push_back({ia->index, v});
      ++ia;
      ++ib;
    }
  }
}

Coloring balanced_coloring(std::span<const SparseVector> vectors, const WalkConfig& config,
                           Rng& rng) {
  return balanced_coloring(
      vectors.size(), [&](std::size_t j, SparseVector& out) { out = vectors[j]; }, config, rng);
}

Coloring balanced_coloring(std::size_t count, const VectorSource& vector_at,
                           const WalkConfig& config, Rng& rng) {
  if (count % 2 != 0) throw PreconditionError("balanced coloring needs an even number of vectors");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  if (config.shuffle_pairs) {
    for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  SelfBalancingWalk walk(config, count / 2, rng);
  Coloring c;
  c.signs.assign(count, 0);
  c.balanced = true;
  SparseVector a, b, diff;
  for (std::size_t p = 0; p < count; p += 2) {
    vector_at(order[p], a);
    vector_at(order[p + 1], b);
    difference(a, b, 1.0, diff);
    const int s = walk.step(diff);
    c.signs[order[p]] = static_cast<std::int8_t>(s);
    c.signs[order[p + 1]] = static_cast<std::int8_t>(-s);
  }
  return c;
}

}  // namespace qmcst
