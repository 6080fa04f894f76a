#pragma once

// Online vector balancing: the self-balancing walk and its balanced
// (pairwise-difference) wrapper.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "qmcst/dyadic.hpp"
#include "qmcst/rng.hpp"

namespace qmcst {

/// lambda = 30 log(m n / delta); the walk fails once an alignment or a
/// coordinate of the running sum exceeds lambda.
struct StrictLambda {
  double delta = 0.5;
};

/// Fixed small lambda; alignments beyond lambda pick the opposing sign.
struct GreedyLambda {
  double lambda = 1e-3;
};

struct WalkConfig {
  std::variant<StrictLambda, GreedyLambda> lambda_mode = GreedyLambda{};
  /// Ambient dimension; only enters the Strict lambda.
  std::uint64_t m = 1;
  std::uint64_t seed = 0;
  /// Shuffle the input order before pairing in balanced_coloring.
  bool shuffle_pairs = false;

  bool strict() const { return std::holds_alternative<StrictLambda>(lambda_mode); }
  /// Threshold for a walk over `count` vectors.
  double lambda(std::uint64_t count) const;
};

/// Raised by a Strict-mode walk; `step` is the 1-based index of the failing vector.
class WalkFailure : public std::runtime_error {
 public:
  WalkFailure(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct Coloring {
  std::vector<std::int8_t> signs;
  bool balanced = false;

  std::size_t size() const { return signs.size(); }
  long sum() const;
  friend bool operator==(const Coloring&, const Coloring&) = default;
};

/// Self-balancing walk with a sparse running sum w. Each step touches only the
/// nonzero coordinates of its input.
class SelfBalancingWalk {
 public:
  /// `count` is the number of vectors the walk will see (used by Strict lambda).
  SelfBalancingWalk(const WalkConfig& config, std::uint64_t count, Rng& rng);

  /// Colors the next vector and folds it into w. Returns +1 or -1.
  int step(const SparseVector& v);

  /// <w, v> for the current running sum.
  double alignment(const SparseVector& v) const;
  double max_abs() const;
  double lambda() const { return lambda_; }
  std::size_t steps() const { return steps_; }
  double at(std::uint64_t index) const;

 private:
  const WalkConfig& config_;
  Rng& rng_;
  double lambda_;
  std::uint64_t dimension_ = 0;
  std::size_t steps_ = 0;
  bool exceeded_ = false;
  absl::flat_hash_map<std::uint64_t, double> w_;
};

/// Colors `vectors` in order with a fresh walk.
Coloring self_balancing_walk(std::span<const SparseVector> vectors, const WalkConfig& config,
                             Rng& rng);

/// (a - b) * scale with exact cancellation of shared coordinates.
void difference(const SparseVector& a, const SparseVector& b, double scale, SparseVector& out);

/// Runs the walk on v1 - v2, v3 - v4, ...; pair sign +1 gives (+1,-1), -1 gives (-1,+1).
/// The result always sums to zero.
Coloring balanced_coloring(std::span<const SparseVector> vectors, const WalkConfig& config,
                           Rng& rng);

/// Same as above with vectors produced on demand: `vector_at(j, out)` fills the
/// j-th input. Useful when a node's vectors do not fit in memory at once.
using VectorSource = std::function<void(std::size_t, SparseVector&)>;
Coloring balanced_coloring(std::size_t count, const VectorSource& vector_at,
                           const WalkConfig& config, Rng& rng);

}  // namespace qmcst
