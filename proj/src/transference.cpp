#include "qmcst/transference.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

namespace qmcst {

namespace {

bool is_pow2(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

// Identity coordinates live after the box indices and are reused per node.
void node_vector(IncidenceBuilder& builder, std::span<const double> point, std::uint64_t box_count,
                 std::size_t local, std::uint64_t node_size, SparseVector& out) {
  out.entries.clear();
  out.dimension = 0;
  builder.append(point, out, 0);
  out.entries.push_back({box_count + local, 1.0});
  out.dimension = box_count + node_size;
}

}  // namespace

void TransferenceConfig::validate() const {
  if (!is_pow2(n)) throw PreconditionError("n must be a power of two");
  if (!is_pow2(oversample_k)) throw PreconditionError("oversample_k must be a power of two");
  if (oversample_k < 2) throw PreconditionError("oversample_k must be at least 2");
  if (d < 1) throw PreconditionError("d must be >= 1");
  if (profile.dimension() != d) throw PreconditionError("weight profile dimension differs from d");
  if (population_size() / oversample_k != n || population_size() > (std::uint64_t{1} << 32)) {
    throw PreconditionError("population k*n exceeds 2^32");
  }
  if (h_override && (*h_override < 0 || *h_override > 61)) {
    throw PreconditionError("h must lie in [0, 61]");
  }
  if (const auto* ext = std::get_if<ExternalInit>(&init)) {
    if (ext->points.dimension() != d || ext->points.size() != population_size()) {
      throw PreconditionError("external init must supply exactly k*n points of dimension d");
    }
  }
}

int TransferenceConfig::splits() const { return std::countr_zero(oversample_k); }

int TransferenceConfig::refinement_depth() const {
  return h_override ? *h_override : default_depth(profile, n);
}

TransferenceTrail::TransferenceTrail(PointSet population, std::vector<double> shift, int h,
                                     int splits, std::vector<double> frame_shift)
    : population_(std::move(population)),
      shift_(std::move(shift)),
      frame_shift_(std::move(frame_shift)),
      h_(h),
      splits_(splits) {
  levels_.resize(splits + 1);
  for (int t = 0; t <= splits; ++t) levels_[t].resize(std::size_t{1} << t);
}

const TrailNode& TransferenceTrail::node(int t, std::size_t i) const {
  if (t < 0 || t >= static_cast<int>(levels_.size()) || i >= levels_[t].size()) {
    throw PreconditionError("unknown trail node (" + std::to_string(t) + ", " + std::to_string(i) +
                            ")");
  }
  return levels_[t][i];
}

TrailNode& TransferenceTrail::node(int t, std::size_t i) {
  return const_cast<TrailNode&>(std::as_const(*this).node(t, i));
}

std::vector<TransferenceTrail::LineageStep> TransferenceTrail::lineage(std::size_t leaf) const {
  if (leaf >= leaf_count()) throw PreconditionError("leaf index out of range");
  std::vector<LineageStep> path;
  for (int t = 0; t < splits_; ++t) {
    const std::size_t node = leaf >> (splits_ - t);
    const bool plus_child = (leaf >> (splits_ - 1 - t)) & 1u;
    path.push_back({t, node, plus_child ? -1 : 1});
  }
  return path;
}

PointSet TransferenceTrail::leaf_points(std::size_t leaf) const {
  if (leaf >= leaf_count()) throw PreconditionError("leaf index out of range");
  PointSet ps = population_.subset(levels_.back()[leaf].members);
  ps.meta().label = "wsubgtrans-leaf-" + std::to_string(leaf);
  return ps;
}

TransferenceFailure::TransferenceFailure(int t, std::size_t node, std::size_t step)
    : WalkFailure(step, "walk failed at depth " + std::to_string(t) + ", node " +
                            std::to_string(node) + ", step " + std::to_string(step)),
      t_(t),
      node_(node) {}

PointSet initial_population(const TransferenceConfig& config) {
  const std::size_t n0 = config.population_size();
  return std::visit(
      [&](const auto& init) -> PointSet {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, IidInit>) {
          return iid_uniform(n0, config.d, init.seed);
        } else if constexpr (std::is_same_v<T, SobolInit>) {
          return sobol(n0, config.d, SobolSpec{Scramble{init.scramble, init.seed}});
        } else {
          return init.points;
        }
      },
      config.init);
}

TransferenceResult run(const TransferenceConfig& config) {
  config.validate();
  const int h = config.refinement_depth();
  const int splits = config.splits();

  std::vector<double> shift(config.d);
  {
    Rng rng(config.shift_seed);
    for (auto& s : shift) s = rng.uniform();
  }

  PointSet population = initial_population(config);
  std::vector<double> frame_shift;
  if (config.shift_target == ShiftTarget::Points) {
    std::vector<double> moved(population.coords().begin(), population.coords().end());
    for (std::size_t i = 0; i < moved.size(); ++i) moved[i] = fold_shift(moved[i], shift[i % config.d]);
    population = PointSet(config.d, std::move(moved), population.meta());
    frame_shift = std::move(shift);
    shift.assign(config.d, 0.0);
  }

  TransferenceTrail trail(std::move(population), shift, h, splits, std::move(frame_shift));
  const PointSet& pop = trail.population();
  IncidenceBuilder builder(config.profile, h, shift);
  const std::uint64_t box_count = builder.index().size();
  const double scale = 1.0 / std::sqrt(1.0 + incidence_norm_squared(config.profile, h));

  auto& root = trail.node(0, 0).members;
  root.resize(pop.size());
  std::iota(root.begin(), root.end(), 0u);

  for (int t = 0; t < splits; ++t) {
    for (std::size_t i = 0; i < trail.node_count(t); ++i) {
      TrailNode& node = trail.node(t, i);
      const std::uint64_t size = node.members.size();
      WalkConfig walk = config.walk;
      walk.m = box_count + size;
      Rng rng(Rng::derive(config.walk.seed, (static_cast<std::uint64_t>(t) << 40) | i));
      VectorSource source = [&](std::size_t j, SparseVector& out) {
        node_vector(builder, pop.point(node.members[j]), box_count, j, size, out);
        for (auto& e : out.entries) e.value *= scale;
      };
      try {
        node.coloring = balanced_coloring(size, source, walk, rng);
      } catch (const WalkFailure& f) {
        throw TransferenceFailure(t, i, f.step());
      }
      auto& minus = trail.node(t + 1, 2 * i).members;
      auto& plus = trail.node(t + 1, 2 * i + 1).members;
      minus.reserve(size / 2);
      plus.reserve(size / 2);
      for (std::size_t j = 0; j < size; ++j) {
        (node.coloring.signs[j] < 0 ? minus : plus).push_back(node.members[j]);
      }
    }
  }

  TransferenceResult result;
  result.sets.reserve(trail.leaf_count());
  for (std::size_t r = 0; r < trail.leaf_count(); ++r) {
    PointSet ps = trail.leaf_points(leaf_of_output(r));
    ps.meta().seed = config.shift_seed;
    result.sets.push_back(std::move(ps));
  }
  result.trail = std::move(trail);
  return result;
}

std::vector<SparseIncidence> incidence_block(const PointSet& points, const WeightProfile& profile,
                                             int h, std::span<const double> shift) {
  IncidenceBuilder builder(profile, h, std::vector<double>(shift.begin(), shift.end()));
  const std::uint64_t box_count = builder.index().size();
  std::vector<SparseIncidence> out(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    node_vector(builder, points.point(j), box_count, j, points.size(), out[j]);
  }
  return out;
}

long combinatorial_disc(const TransferenceTrail& trail, const Region& region, int t,
                        std::size_t node) {
  const TrailNode& n = trail.node(t, node);
  if (n.coloring.signs.size() != n.members.size()) {
    throw PreconditionError("trail node (" + std::to_string(t) + ", " + std::to_string(node) +
                            ") carries no coloring");
  }
  if (region.dimension() != trail.population().dimension()) {
    throw PreconditionError("region dimension mismatch");
  }
  long disc = 0;
  for (std::size_t j = 0; j < n.members.size(); ++j) {
    if (region.contains(trail.population().point(n.members[j]))) disc += n.coloring.signs[j];
  }
  return disc;
}

std::string coloring_digest(const Coloring& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto s : c.signs) {
    h ^= static_cast<std::uint8_t>(s);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qmcst
