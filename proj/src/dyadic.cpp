#include "qmcst/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace qmcst {

namespace {

constexpr std::uint64_t kIndexLimit = std::uint64_t{1} << 63;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r) || r >= kIndexLimit) {
    throw PreconditionError("dyadic box index space exceeds 2^63; reduce h, d or s_eff");
  }
  return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r) || r >= kIndexLimit) {
    throw PreconditionError("dyadic box index space exceeds 2^63; reduce h, d or s_eff");
  }
  return r;
}

int ceil_log2(std::uint64_t x) {
  if (x <= 1) return 0;
  return 64 - std::countl_zero(x - 1);
}

void check_box(const DyadicBox& box, int d, int h) {
  if (box.dimension() != d) throw PreconditionError("box dimension mismatch");
  for (const auto& iv : box.dims) {
    if (iv.level < 0 || iv.level > h) throw PreconditionError("box level outside [0,h]");
    if (iv.offset >= (std::uint64_t{1} << iv.level)) {
      throw PreconditionError("box offset outside [0, 2^level)");
    }
  }
}

}  // namespace

WeightProfile::WeightProfile(std::vector<double> gammas, WeightMode mode, int s_eff)
    : gammas_(std::move(gammas)), mode_(mode), s_eff_(s_eff) {
  const int d = static_cast<int>(gammas_.size());
  if (d < 1) throw PreconditionError("weight profile needs at least one coordinate");
  for (int j = 0; j < d; ++j) {
    if (!(gammas_[j] >= 0.0) || !std::isfinite(gammas_[j])) {
      throw PreconditionError("weights must be finite and non-negative");
    }
    if (j > 0 && gammas_[j] > gammas_[j - 1]) {
      throw PreconditionError("weights must be non-increasing");
    }
  }
  if (s_eff_ < 1 || s_eff_ > d) throw PreconditionError("s_eff must lie in [1, d]");
  active_ = static_cast<int>(std::count_if(gammas_.begin(), gammas_.end(),
                                           [](double g) { return g > 0.0; }));
}

WeightProfile WeightProfile::full(std::vector<double> gammas) {
  const int d = static_cast<int>(gammas.size());
  return WeightProfile(std::move(gammas), WeightMode::Full, std::max(d, 1));
}

WeightProfile WeightProfile::superposition(std::vector<double> gammas, int s_eff) {
  return WeightProfile(std::move(gammas), WeightMode::Superposition, s_eff);
}

WeightProfile WeightProfile::truncation(int d, int s_eff) {
  if (d < 1) throw PreconditionError("weight profile needs at least one coordinate");
  if (s_eff < 1 || s_eff > d) throw PreconditionError("s_eff must lie in [1, d]");
  std::vector<double> g(d, 0.0);
  std::fill_n(g.begin(), s_eff, 1.0);
  return WeightProfile(std::move(g), WeightMode::Truncation, s_eff);
}

int DyadicBox::nontrivial_count() const {
  return static_cast<int>(std::count_if(dims.begin(), dims.end(),
                                        [](const DyadicInterval& iv) { return !iv.trivial(); }));
}

Region DyadicBox::region() const {
  Region r;
  for (const auto& iv : dims) {
    const double scale = std::ldexp(1.0, -iv.level);
    r.sides.push_back({static_cast<double>(iv.offset) * scale,
                       static_cast<double>(iv.offset + 1) * scale, false, true});
  }
  return r;
}

double box_weight(const DyadicBox& box, const WeightProfile& profile) {
  if (box.dimension() != profile.dimension()) {
    throw PreconditionError("box and weight profile dimensions differ");
  }
  double w = 1.0;
  for (int j = 0; j < box.dimension(); ++j) {
    if (!box.dims[j].trivial()) w *= profile.gamma(j);
  }
  if (profile.mode() == WeightMode::Superposition && box.nontrivial_count() > profile.s_eff()) {
    return 0.0;
  }
  return w;
}

std::uint64_t locate(double x, int level) {
  if (!(x >= 0.0 && x < 1.0)) throw PreconditionError("locate: x outside [0,1)");
  if (level < 0 || level > 62) throw PreconditionError("locate: level outside [0,62]");
  // Scaling by a power of two is exact, so the floor is exact too.
  const auto off = static_cast<std::uint64_t>(std::ldexp(x, level));
  return std::min(off, (std::uint64_t{1} << level) - 1);
}

double fold_shift(double x, double s) {
  double q = x - s;
  if (q < 0.0) q += 1.0;
  if (q >= 1.0) q = std::nextafter(1.0, 0.0);
  return q;
}

DyadicInterval interval_from_index(std::uint64_t index) {
  if (index == 0) return {};
  const int level = 63 - std::countl_zero(index + 1);
  return {level, index + 1 - (std::uint64_t{1} << level)};
}

BoxIndex::BoxIndex(int d, int h, WeightMode mode, int s_eff) : d_(d), h_(h), mode_(mode) {
  if (d < 1) throw PreconditionError("box index needs d >= 1");
  if (h < 0 || h > 61) throw PreconditionError("box index needs 0 <= h <= 61");
  if (mode != WeightMode::Full && (s_eff < 1 || s_eff > d)) {
    throw PreconditionError("s_eff must lie in [1, d]");
  }
  const std::uint64_t per_dim = (std::uint64_t{1} << (h + 1)) - 1;
  switch (mode) {
    case WeightMode::Full:
      indexed_ = d;
      max_nontrivial_ = d;
      radix_ = per_dim;
      break;
    case WeightMode::Truncation:
      indexed_ = s_eff;
      max_nontrivial_ = s_eff;
      radix_ = per_dim;
      break;
    case WeightMode::Superposition:
      indexed_ = d;
      max_nontrivial_ = s_eff;
      radix_ = per_dim - 1;
      break;
  }

  if (mode == WeightMode::Superposition) {
    binom_.assign(d + 1, std::vector<std::uint64_t>(max_nontrivial_ + 2, 0));
    for (int n = 0; n <= d; ++n) {
      binom_[n][0] = 1;
      for (int k = 1; k <= max_nontrivial_ + 1 && k <= n; ++k) {
        binom_[n][k] = checked_add(binom_[n - 1][k - 1], k <= n - 1 ? binom_[n - 1][k] : 0);
      }
    }
    radix_pow_.assign(max_nontrivial_ + 1, 1);
    for (int k = 1; k <= max_nontrivial_; ++k) radix_pow_[k] = checked_mul(radix_pow_[k - 1], radix_);
    subset_base_.assign(max_nontrivial_ + 2, 0);
    for (int k = 0; k <= max_nontrivial_; ++k) {
      subset_base_[k + 1] = checked_add(subset_base_[k], checked_mul(binom_[d][k], radix_pow_[k]));
    }
    size_ = subset_base_[max_nontrivial_ + 1];
  } else {
    radix_pow_.assign(indexed_ + 1, 1);
    for (int k = 1; k <= indexed_; ++k) radix_pow_[k] = checked_mul(radix_pow_[k - 1], radix_);
    size_ = radix_pow_[indexed_];
  }
}

std::uint64_t BoxIndex::binomial(int n, int k) const {
  if (k < 0 || k > n) return 0;
  return binom_[n][k];
}

std::uint64_t BoxIndex::index_of(const DyadicBox& box) const {
  check_box(box, d_, h_);
  if (mode_ != WeightMode::Superposition) {
    std::uint64_t idx = 0;
    for (int j = 0; j < d_; ++j) {
      const auto i = interval_index(box.dims[j]);
      if (j >= indexed_) {
        if (i != 0) throw PreconditionError("box is nontrivial outside the truncated coordinates");
        continue;
      }
      idx += i * radix_pow_[j];
    }
    return idx;
  }
  std::uint64_t digits = 0;
  std::uint64_t rank = 0;
  int k = 0;
  for (int j = 0; j < d_; ++j) {
    const auto i = interval_index(box.dims[j]);
    if (i == 0) continue;
    if (k == max_nontrivial_) {
      throw PreconditionError("box has more nontrivial dimensions than s_eff");
    }
    digits += (i - 1) * radix_pow_[k];
    rank += binom_[j][k + 1];
    ++k;
  }
  return subset_base_[k] + rank * radix_pow_[k] + digits;
}

DyadicBox BoxIndex::box_at(std::uint64_t index) const {
  if (index >= size_) throw PreconditionError("box index out of range");
  DyadicBox box{std::vector<DyadicInterval>(d_)};
  if (mode_ != WeightMode::Superposition) {
    for (int j = 0; j < indexed_; ++j) {
      box.dims[j] = interval_from_index(index % radix_);
      index /= radix_;
    }
    return box;
  }
  int k = 0;
  while (index >= subset_base_[k + 1]) ++k;
  std::uint64_t r = index - subset_base_[k];
  std::uint64_t rank = r / radix_pow_[k];
  std::uint64_t digits = r % radix_pow_[k];
  std::vector<int> support(k);
  for (int i = k - 1; i >= 0; --i) {
    int c = i;
    while (c + 1 < d_ && binom_[c + 1][i + 1] <= rank) ++c;
    support[i] = c;
    rank -= binom_[c][i + 1];
  }
  for (int pos = 0; pos < k; ++pos) {
    box.dims[support[pos]] = interval_from_index(digits % radix_ + 1);
    digits /= radix_;
  }
  return box;
}

BoxIndex enumerate_boxes(int d, int h, WeightMode mode, int s_eff) {
  return BoxIndex(d, h, mode, s_eff);
}

BoxIndex enumerate_boxes(int h, const WeightProfile& profile) {
  return BoxIndex(profile.dimension(), h, profile.mode(), profile.s_eff());
}

double SparseVector::squared_norm() const {
  // Extended accumulator: Full-mode vectors reach (h+1)^d entries.
  long double s = 0.0L;
  for (const auto& e : entries) s += static_cast<long double>(e.value) * e.value;
  return static_cast<double>(s);
}

double incidence_norm_squared(const WeightProfile& profile, int h) {
  const auto g = profile.gammas();
  if (profile.mode() != WeightMode::Superposition) {
    double prod = 1.0;
    for (double gj : g) prod *= 1.0 + h * gj * gj;
    return prod;
  }
  // elementary symmetric polynomials e_0..e_s of h*gamma_j^2
  const int s = profile.s_eff();
  std::vector<double> e(s + 1, 0.0);
  e[0] = 1.0;
  for (double gj : g) {
    const double x = h * gj * gj;
    for (int k = s; k >= 1; --k) e[k] += e[k - 1] * x;
  }
  double sum = 0.0;
  for (double v : e) sum += v;
  return sum;
}

int default_depth(const WeightProfile& profile, std::uint64_t n) {
  const std::uint64_t dims = profile.mode() == WeightMode::Full
                                 ? static_cast<std::uint64_t>(profile.dimension())
                                 : static_cast<std::uint64_t>(profile.s_eff());
  return ceil_log2(dims * std::max<std::uint64_t>(n, 1));
}

IncidenceBuilder::IncidenceBuilder(const WeightProfile& profile, int h, std::vector<double> shift)
    : profile_(profile),
      h_(h),
      shift_(std::move(shift)),
      index_(enumerate_boxes(h, profile)) {
  if (static_cast<int>(shift_.size()) != profile_.dimension()) {
    throw PreconditionError("shift dimension mismatch");
  }
  for (double s : shift_) {
    if (!(s >= 0.0 && s < 1.0)) throw PreconditionError("shift coordinate outside [0,1)");
  }
  per_dim_.resize(index_.indexed_dimensions());
  support_.reserve(index_.max_nontrivial());
}

void IncidenceBuilder::product(int pos, std::uint64_t index, double weight, std::uint64_t offset,
                               std::vector<SparseEntry>& out) const {
  const auto& options = per_dim_[pos];
  const std::uint64_t scale = index_.radix_power(pos);
  for (const auto& opt : options) {
    const std::uint64_t idx = index + opt.index * scale;
    const double w = weight * opt.value;
    if (pos == 0) {
      out.push_back({offset + idx, w});
    } else {
      product(pos - 1, idx, w, offset, out);
    }
  }
}

void IncidenceBuilder::superposition(std::vector<SparseEntry>& out, std::uint64_t offset) {
  const int active = profile_.active_dimensions();
  const int smax = std::min(index_.max_nontrivial(), active);
  const std::uint64_t radix = index_.radix();
  out.push_back({offset + 0, 1.0});
  if (h_ == 0) return;
  for (int k = 1; k <= smax; ++k) {
    // colex enumeration of k-subsets of the active prefix {0..active-1}
    support_.resize(k);
    for (int i = 0; i < k; ++i) support_[i] = i;
    while (true) {
      std::uint64_t rank = 0;
      for (int i = 0; i < k; ++i) rank += index_.binomial(support_[i], i + 1);
      const std::uint64_t base = offset + index_.subset_base(k) + rank * index_.radix_power(k);
      // mixed radix over the support, last position most significant
      std::vector<std::size_t> digit(k, 1);
      while (true) {
        std::uint64_t idx = 0;
        double w = 1.0;
        for (int pos = k - 1; pos >= 0; --pos) {
          const auto& e = per_dim_[support_[pos]][digit[pos]];
          idx = idx * radix + (e.index - 1);
          w *= e.value;
        }
        out.push_back({base + idx, w});
        int pos = 0;
        while (pos < k && ++digit[pos] == per_dim_[support_[pos]].size()) {
          digit[pos] = 1;
          ++pos;
        }
        if (pos == k) break;
      }
      int i = 0;
      while (i < k && (i + 1 < k ? support_[i] + 1 == support_[i + 1] : support_[i] + 1 == active)) {
        ++i;
      }
      if (i == k) break;
      ++support_[i];
      for (int r = 0; r < i; ++r) support_[r] = r;
    }
  }
}

void IncidenceBuilder::append(std::span<const double> point, SparseVector& out,
                              std::uint64_t index_offset) {
  const int d = profile_.dimension();
  if (static_cast<int>(point.size()) != d) throw PreconditionError("point dimension mismatch");
  for (double x : point) {
    if (!(x >= 0.0 && x < 1.0)) {
      throw PreconditionError("incidence: point coordinate outside [0,1)");
    }
  }
  const int indexed = index_.indexed_dimensions();
  for (int j = 0; j < indexed; ++j) {
    auto& opts = per_dim_[j];
    opts.clear();
    opts.push_back({0, 1.0});
    const double g = profile_.gamma(j);
    if (g <= 0.0) continue;
    const double q = fold_shift(point[j], shift_[j]);
    for (int l = 1; l <= h_; ++l) {
      opts.push_back({((std::uint64_t{1} << l) - 1) + locate(q, l), g});
    }
  }
  if (index_.mode() == WeightMode::Superposition) {
    superposition(out.entries, index_offset);
  } else {
    product(indexed - 1, 0, 1.0, index_offset, out.entries);
  }
  out.dimension = std::max(out.dimension, index_offset + index_.size());
}

SparseIncidence IncidenceBuilder::build(std::span<const double> point) {
  SparseIncidence v;
  append(point, v, 0);
  v.dimension = index_.size();
  return v;
}

SparseIncidence incidence(std::span<const double> point, int h, const WeightProfile& profile,
                          std::span<const double> shift) {
  IncidenceBuilder builder(profile, h, std::vector<double>(shift.begin(), shift.end()));
  return builder.build(point);
}

}  // namespace qmcst
