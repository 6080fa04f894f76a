#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "qmcst/dyadic.hpp"
#include "qmcst/rng.hpp"

using namespace qmcst;

namespace {

std::vector<DyadicBox> boxes_of(const SparseVector& v, const BoxIndex& index) {
  std::vector<DyadicBox> out;
  for (const auto& e : v.entries) out.push_back(index.box_at(e.index));
  return out;
}

DyadicBox box(std::vector<DyadicInterval> dims) { return DyadicBox{std::move(dims)}; }

std::uint64_t binom(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("box_weight") {
  const auto p = WeightProfile::full({0.5, 0.25});
  CHECK(box_weight(box({{0, 0}, {1, 0}}), p) == 0.25);
  CHECK(box_weight(box({{0, 0}, {0, 0}}), p) == 1.0);
  CHECK(box_weight(box({{2, 3}, {1, 1}}), p) == 0.125);
  const auto u = WeightProfile::unit(3);
  CHECK(box_weight(box({{1, 1}, {3, 2}, {0, 0}}), u) == 1.0);
  CHECK(box_weight(box({{0, 0}, {0, 0}, {0, 0}}), u) == 1.0);
}

TEST_CASE("weight profile validation") {
  CHECK_THROWS_AS(WeightProfile::full({0.5, 0.75}), PreconditionError);
  CHECK_THROWS_AS(WeightProfile::full({1.0, -0.1}), PreconditionError);
  CHECK_THROWS_AS(WeightProfile::full({}), PreconditionError);
  CHECK_THROWS_AS(WeightProfile::superposition({1.0, 1.0}, 3), PreconditionError);
  CHECK_THROWS_AS(WeightProfile::truncation(4, 0), PreconditionError);
  const auto t = WeightProfile::truncation(5, 2);
  CHECK(t.mode() == WeightMode::Truncation);
  CHECK(t.active_dimensions() == 2);
  CHECK(t.gamma(1) == 1.0);
  CHECK(t.gamma(2) == 0.0);
}

TEST_CASE("enumerate_boxes counts") {
  CHECK(enumerate_boxes(1, 1, WeightMode::Full, 1).size() == 3);
  CHECK(enumerate_boxes(2, 1, WeightMode::Superposition, 1).size() == 5);
  CHECK(enumerate_boxes(2, 0, WeightMode::Full, 2).size() == 1);
  CHECK(enumerate_boxes(3, 2, WeightMode::Full, 3).size() == 343);
  CHECK(enumerate_boxes(5, 3, WeightMode::Truncation, 2).size() == 225);
  // 1 + 5*14 + 10*14^2
  CHECK(enumerate_boxes(5, 3, WeightMode::Superposition, 2).size() == 2031);
}

TEST_CASE("enumerate_boxes rejects an index space beyond 63 bits") {
  CHECK_THROWS_AS(enumerate_boxes(64, 10, WeightMode::Full, 64), PreconditionError);
  CHECK_THROWS_AS(enumerate_boxes(100, 20, WeightMode::Superposition, 5), PreconditionError);
  CHECK_THROWS_AS(enumerate_boxes(2, 62, WeightMode::Full, 2), PreconditionError);
}

TEST_CASE("box index is a bijection") {
  for (auto [d, h, mode, s] : std::vector<std::tuple<int, int, WeightMode, int>>{
           {1, 3, WeightMode::Full, 1},
           {3, 2, WeightMode::Full, 3},
           {4, 2, WeightMode::Truncation, 2},
           {4, 2, WeightMode::Superposition, 2},
           {5, 1, WeightMode::Superposition, 3}}) {
    const BoxIndex index(d, h, mode, s);
    std::set<std::vector<std::pair<int, std::uint64_t>>> seen;
    for (std::uint64_t i = 0; i < index.size(); ++i) {
      const DyadicBox b = index.box_at(i);
      REQUIRE(index.index_of(b) == i);
      std::vector<std::pair<int, std::uint64_t>> key;
      for (const auto& iv : b.dims) key.emplace_back(iv.level, iv.offset);
      seen.insert(key);
    }
    CHECK(seen.size() == index.size());
  }
}

TEST_CASE("index_of rejects inadmissible boxes") {
  const BoxIndex sup(3, 2, WeightMode::Superposition, 1);
  CHECK_THROWS_AS(sup.index_of(box({{1, 0}, {1, 1}, {0, 0}})), PreconditionError);
  const BoxIndex tr(3, 2, WeightMode::Truncation, 1);
  CHECK_THROWS_AS(tr.index_of(box({{0, 0}, {1, 0}, {0, 0}})), PreconditionError);
  const BoxIndex full(2, 2, WeightMode::Full, 2);
  CHECK_THROWS_AS(full.index_of(box({{3, 0}, {0, 0}})), PreconditionError);
  CHECK_THROWS_AS(full.index_of(box({{1, 2}, {0, 0}})), PreconditionError);
}

TEST_CASE("locate") {
  CHECK(locate(0.3, 2) == 1);
  CHECK(locate(0.0, 5) == 0);
  CHECK(locate(0.999, 1) == 1);
  CHECK(locate(0.5, 0) == 0);
  CHECK_THROWS_AS(locate(1.0, 3), PreconditionError);
  CHECK_THROWS_AS(locate(-0.1, 3), PreconditionError);
}

TEST_CASE("fold_shift") {
  CHECK(fold_shift(0.1, 0.25) == doctest::Approx(0.85));
  CHECK(fold_shift(0.7, 0.25) == doctest::Approx(0.45));
  CHECK(fold_shift(0.25, 0.25) == 0.0);
  const double tiny = std::nextafter(0.0, 1.0);
  CHECK(fold_shift(0.0, tiny) < 1.0);
}

TEST_CASE("incidence in one dimension") {
  const auto p = WeightProfile::unit(1);
  const double x[] = {0.3};
  const double s[] = {0.0};
  const auto v = incidence(x, 2, p, s);
  REQUIRE(v.nnz() == 3);
  for (const auto& e : v.entries) CHECK(e.value == 1.0);
  CHECK(v.squared_norm() == 3.0);
  const auto boxes = boxes_of(v, enumerate_boxes(2, p));
  std::vector<DyadicBox> want{box({{0, 0}}), box({{1, 0}}), box({{2, 1}})};
  for (const auto& b : want) CHECK(std::find(boxes.begin(), boxes.end(), b) != boxes.end());
}

TEST_CASE("incidence in two dimensions") {
  const auto p = WeightProfile::unit(2);
  const double x[] = {0.3, 0.7};
  const double s[] = {0.0, 0.0};
  const auto v = incidence(x, 1, p, s);
  REQUIRE(v.nnz() == 4);
  CHECK(v.squared_norm() == 4.0);
  const auto boxes = boxes_of(v, enumerate_boxes(1, p));
  std::vector<DyadicBox> want{box({{0, 0}, {0, 0}}), box({{1, 0}, {0, 0}}), box({{0, 0}, {1, 1}}),
                              box({{1, 0}, {1, 1}})};
  for (const auto& b : want) CHECK(std::find(boxes.begin(), boxes.end(), b) != boxes.end());
}

TEST_CASE("incidence folds the shift") {
  const auto p = WeightProfile::unit(1);
  const double x[] = {0.1};
  const double s[] = {0.25};
  const auto v = incidence(x, 1, p, s);
  REQUIRE(v.nnz() == 2);
  const auto boxes = boxes_of(v, enumerate_boxes(1, p));
  CHECK(std::find(boxes.begin(), boxes.end(), box({{0, 0}})) != boxes.end());
  CHECK(std::find(boxes.begin(), boxes.end(), box({{1, 1}})) != boxes.end());
}

TEST_CASE("incidence rejects coordinates outside [0,1)") {
  const auto p = WeightProfile::unit(2);
  const double s[] = {0.0, 0.0};
  const double bad[] = {0.2, 1.0};
  CHECK_THROWS_AS(incidence(bad, 2, p, s), PreconditionError);
  const double neg[] = {-0.2, 0.5};
  CHECK_THROWS_AS(incidence(neg, 2, p, s), PreconditionError);
  const double ok[] = {0.2, 0.5};
  const double bad_shift[] = {0.2, 1.5};
  CHECK_THROWS_AS(incidence(ok, 2, p, bad_shift), PreconditionError);
}

TEST_CASE("incidence invariants on random inputs") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(4));
    const int h = static_cast<int>(rng.below(5));
    std::vector<double> gammas(d);
    for (auto& g : gammas) g = 0.05 + rng.uniform();
    std::sort(gammas.rbegin(), gammas.rend());
    std::vector<double> x(d), s(d), folded(d), zero(d, 0.0);
    for (int j = 0; j < d; ++j) {
      x[j] = rng.uniform();
      s[j] = rng.uniform();
      folded[j] = fold_shift(x[j], s[j]);
    }

    const auto full = WeightProfile::full(gammas);
    const auto v = incidence(x, h, full, s);
    double want = 1.0;
    for (double g : gammas) want *= 1.0 + h * g * g;
    CHECK(std::abs(v.squared_norm() - want) <= 1e-12 * want);
    CHECK(std::abs(incidence_norm_squared(full, h) - want) <= 1e-12 * want);
    CHECK(v == incidence(folded, h, full, zero));

    const int se = 1 + static_cast<int>(rng.below(d));
    const auto sup = WeightProfile::superposition(gammas, se);
    std::uint64_t count = 0, hk = 1;
    for (int k = 0; k <= se; ++k, hk *= h) count += binom(d, k) * hk;
    CHECK(incidence(x, h, sup, s).nnz() == count);

    const auto tr = WeightProfile::truncation(d, se);
    const auto head = WeightProfile::unit(se);
    const auto vt = incidence(x, h, tr, s);
    const auto vh = incidence(std::span<const double>(x).first(se), h, head,
                              std::span<const double>(s).first(se));
    CHECK(vt.entries == vh.entries);
  }
}

TEST_CASE("superposition norm is the elementary symmetric sum") {
  const std::vector<double> g{1.0, 0.5, 0.25};
  const auto sup = WeightProfile::superposition(g, 2);
  const int h = 3;
  const double a = h * 1.0, b = h * 0.25, c = h * 0.0625;
  const double want = 1 + (a + b + c) + (a * b + a * c + b * c);
  CHECK(incidence_norm_squared(sup, h) == doctest::Approx(want).epsilon(1e-14));
  const double x[] = {0.1, 0.6, 0.35};
  const double s[] = {0.0, 0.0, 0.0};
  CHECK(incidence(x, h, sup, s).squared_norm() == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("default depth") {
  CHECK(default_depth(WeightProfile::unit(2), 64) == 7);
  CHECK(default_depth(WeightProfile::truncation(100, 2), 64) == 7);
  CHECK(default_depth(WeightProfile::unit(1), 8) == 3);
}
