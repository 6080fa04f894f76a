#pragma once

// Weighted subgaussian transference: oversample a population, then halve it
// T times with balanced colorings of weighted dyadic incidence vectors.
//
// Node (t, i) at depth t splits into (t+1, 2i), holding the points colored -1,
// and (t+1, 2i+1), holding the points colored +1. Leaves are returned in that
// index order. One random shift, drawn before any split, is shared by every
// node; output points are never shifted.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qmcst/balance.hpp"
#include "qmcst/dyadic.hpp"
#include "qmcst/pointset.hpp"
#include "qmcst/sampling.hpp"

namespace qmcst {

struct IidInit {
  std::uint64_t seed = 0;
};

/// First k n Sobol' points; `seed` drives the scramble when there is one.
struct SobolInit {
  std::uint64_t seed = 0;
  ScrambleKind scramble = ScrambleKind::None;
};

struct ExternalInit {
  PointSet points;
};

using InitSpec = std::variant<IidInit, SobolInit, ExternalInit>;

/// Where the random shift s acts. Grid shifts the dyadic system and returns the
/// points unchanged. Points replaces every population point by (p - s) mod 1
/// before splitting, keeps the grid fixed, and returns the moved points.
enum class ShiftTarget { Grid, Points };

struct TransferenceConfig {
  std::uint64_t n = 0;
  int d = 0;
  std::uint64_t oversample_k = 16;
  WeightProfile profile = WeightProfile::unit(1);
  std::optional<int> h_override;
  InitSpec init = IidInit{};
  WalkConfig walk;
  std::uint64_t shift_seed = 0;
  ShiftTarget shift_target = ShiftTarget::Grid;

  /// Throws PreconditionError unless n, k are powers of two and dimensions agree.
  void validate() const;
  std::uint64_t population_size() const { return n * oversample_k; }
  /// Number of halving rounds, log2(k).
  int splits() const;
  /// h_override if set, else default_depth(profile, n).
  int refinement_depth() const;
};

struct TrailNode {
  /// Rows of the initial population held by this node, in walk order.
  std::vector<std::uint32_t> members;
  /// Balanced coloring of `members` (empty at the leaves).
  Coloring coloring;

  friend bool operator==(const TrailNode&, const TrailNode&) = default;
};

/// Audit record of one run.
class TransferenceTrail {
 public:
  TransferenceTrail() = default;
  TransferenceTrail(PointSet population, std::vector<double> shift, int h, int splits,
                    std::vector<double> frame_shift = {});

  const PointSet& population() const { return population_; }
  /// Shift of the dyadic system relative to the stored population.
  std::span<const double> shift() const { return shift_; }
  /// Shift already folded into the stored population (empty under ShiftTarget::Grid).
  std::span<const double> frame_shift() const { return frame_shift_; }
  /// Dyadic refinement depth h used for the incidence vectors.
  int refinement_depth() const { return h_; }
  int splits() const { return splits_; }
  std::size_t node_count(int t) const { return levels_.at(t).size(); }
  std::size_t leaf_count() const { return levels_.empty() ? 0 : levels_.back().size(); }

  /// Throws PreconditionError for an unknown node.
  const TrailNode& node(int t, std::size_t i) const;
  TrailNode& node(int t, std::size_t i);

  /// Per step of the path root -> leaf: the node (t, i) and the sign sigma_t,
  /// +1 when the path continues into the -1 child and -1 otherwise.
  struct LineageStep {
    int t;
    std::size_t node;
    int sigma;
  };
  std::vector<LineageStep> lineage(std::size_t leaf) const;

  PointSet leaf_points(std::size_t leaf) const;

  std::vector<std::vector<TrailNode>>& levels() { return levels_; }
  const std::vector<std::vector<TrailNode>>& levels() const { return levels_; }

  friend bool operator==(const TransferenceTrail&, const TransferenceTrail&) = default;

 private:
  PointSet population_;
  std::vector<double> shift_;
  std::vector<double> frame_shift_;
  int h_ = 0;
  int splits_ = 0;
  std::vector<std::vector<TrailNode>> levels_;
};

/// Trail leaf emitted at output position r (r ^ (r >> 1)).
inline std::size_t leaf_of_output(std::size_t r) { return r ^ (r >> 1); }

struct TransferenceResult {
  /// sets[r] holds trail leaf leaf_of_output(r): binary-reflected order of the sign paths.
  std::vector<PointSet> sets;
  TransferenceTrail trail;
};

/// Builds the initial population named by `config.init` (k n points).
PointSet initial_population(const TransferenceConfig& config);

/// Runs the algorithm; deterministic in the config. Strict-mode walk failures
/// are rethrown as TransferenceFailure carrying (t, i, j).
TransferenceResult run(const TransferenceConfig& config);

class TransferenceFailure : public WalkFailure {
 public:
  TransferenceFailure(int t, std::size_t node, std::size_t step);
  int depth() const { return t_; }
  std::size_t node() const { return node_; }

 private:
  int t_;
  std::size_t node_;
};

/// Incidence vectors of one node, unnormalized: the weighted box entries
/// (indices below box_count) and a one-hot identity coordinate at box_count + j.
std::vector<SparseIncidence> incidence_block(const PointSet& points, const WeightProfile& profile,
                                             int h, std::span<const double> shift);

/// Signed count (#(+1) - #(-1)) of the node's points inside `region`.
long combinatorial_disc(const TransferenceTrail& trail, const Region& region, int t,
                        std::size_t node);

/// Digest of a coloring (FNV-1a over the sign bytes) as 16 hex digits.
std::string coloring_digest(const Coloring& c);

}  // namespace qmcst
