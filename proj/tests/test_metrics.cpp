#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "brute.hpp"
#include "oracle_values.hpp"
#include "qmcst/metrics.hpp"
#include "qmcst/sampling.hpp"

using namespace qmcst;

TEST_CASE("star discrepancy of single points") {
  const auto mid = star_discrepancy_exact(PointSet(2, {0.5, 0.5}));
  CHECK(mid.value == doctest::Approx(0.75).epsilon(1e-15));
  const auto origin = star_discrepancy_exact(PointSet(2, {0.0, 0.0}));
  CHECK(origin.value == 1.0);
  CHECK(origin.closed_branch);
  CHECK(star_discrepancy_exact(PointSet(1, std::vector<double>{0.25})).value == 0.75);
}

TEST_CASE("star discrepancy of unscrambled sobol") {
  for (int m = 3; m <= 8; ++m) {
    const auto r = star_discrepancy_exact(sobol(std::size_t{1} << m, 2));
    CHECK(r.value == doctest::Approx(oracle::kSobolStar[m - 3]).epsilon(1e-12));
  }
  CHECK(star_discrepancy_exact(sobol(16, 2)).value == doctest::Approx(0.171875));
}

TEST_CASE("star discrepancy against the brute-force critical grid") {
  for (const auto& c : oracle::kStarCases) {
    const PointSet ps(c.d, c.coords);
    CAPTURE(c.d);
    CAPTURE(ps.size());
    CHECK(star_discrepancy_exact(ps).value == doctest::Approx(c.value).epsilon(1e-12));
    CHECK(star_discrepancy_lower_bound(ps, 200, 1).value <= c.value + 1e-15);
  }
}

TEST_CASE("star discrepancy dominates anchored-box errors") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const auto ps = iid_uniform(1 + rng.below(40), d, trial);
    const double D = star_discrepancy_exact(ps).value;
    for (int b = 0; b < 20; ++b) {
      std::vector<double> corner(d);
      for (auto& a : corner) a = static_cast<double>(1 + rng.below(16)) / 16.0;
      const Region box = Region::anchored(corner);
      const Integrand ind = [&](std::span<const double> x) { return box.contains(x) ? 1.0 : 0.0; };
      CHECK(std::abs(integration_error(ps, ind, box.volume())) <= D + 1e-12);
    }
  }
}

TEST_CASE("exact star discrepancy refuses d > 3") {
  CHECK_THROWS_AS(star_discrepancy_exact(iid_uniform(4, 4, 1)), DimensionTooLarge);
  CHECK_THROWS_AS(star_discrepancy_exact(PointSet(2)), PreconditionError);
  const auto lb = star_discrepancy_lower_bound(iid_uniform(32, 6, 2), 500, 3);
  CHECK(lb.method == DiscrepancyMethod::LowerBound);
  CHECK(lb.value > 0.0);
  CHECK(lb.value <= 1.0);
}

TEST_CASE("integration_error") {
  const PointSet any(1, {0.1, 0.4, 0.8});
  CHECK(integration_error(any, [](std::span<const double>) { return 2.5; }, 2.5) == 0.0);
  const PointSet pair(1, {0.25, 0.75});
  CHECK(integration_error(pair, [](std::span<const double> x) { return x[0]; }, 0.5) == 0.0);
  const PointSet zh(1, {0.0, 0.5});
  CHECK(integration_error(zh, [](std::span<const double> x) { return x[0] * x[0]; }, 1.0 / 3) ==
        doctest::Approx(-0.208333333333).epsilon(1e-12));
}

TEST_CASE("wso variation examples") {
  FourierPolynomial cos1{1, {}};
  cos1.add({1}, 0.5);
  cos1.add({-1}, 0.5);
  CHECK(wso_variation_squared(cos1, WeightProfile::unit(1)) == 0.5);

  FourierPolynomial constant{2, {}};
  constant.add({0, 0}, 3.0);
  CHECK(wso_variation_squared(constant, WeightProfile::unit(2)) == 0.0);

  FourierPolynomial one{2, {}};
  one.add({1, 2}, 1.0);
  CHECK(wso_variation_squared(one, WeightProfile::unit(2)) == doctest::Approx(5.0).epsilon(1e-15));

  FourierPolynomial second{2, {}};
  second.add({0, 1}, 1.0);
  CHECK_THROWS_AS(wso_variation_squared(second, WeightProfile::truncation(2, 1)), InfiniteVariation);
  FourierPolynomial first{2, {}};
  first.add({2, 0}, 1.0);
  CHECK(wso_variation_squared(first, WeightProfile::truncation(2, 1)) == 2.0);
}

TEST_CASE("wso closed form matches subset enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(4));
    std::vector<double> g(d);
    for (auto& x : g) x = 0.2 + rng.uniform();
    std::sort(g.rbegin(), g.rend());
    const auto f = brute::random_fourier(rng, d, 1 + static_cast<int>(rng.below(3)));
    const double want = brute::wso_by_subsets(f, g);
    CHECK(wso_variation_squared(f, WeightProfile::full(g)) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("wso scale law") {
  FourierPolynomial f{2, {}};
  f.add({1, 0}, 1.0);
  f.add({0, 3}, 1.0);
  f.add({2, 1}, 1.0);
  const double base = wso_variation_squared(f, WeightProfile::full({1.0, 1.0}));
  const double scaled = wso_variation_squared(f, WeightProfile::full({2.0, 2.0}));
  // r = 1 terms: 1 + 3 + 2 + 1 = 7, r = 2 term: 2
  CHECK(base == doctest::Approx(9.0));
  CHECK(scaled == doctest::Approx(7.0 / 4 + 2.0 / 16));
}

TEST_CASE("transference audit hand trace") {
  TransferenceTrail trail(PointSet(1, {0.1, 0.3, 0.6, 0.9}), {0.0}, 1, 1);
  trail.node(0, 0).members = {0, 1, 2, 3};
  trail.node(0, 0).coloring = Coloring{{1, 1, -1, -1}, true};
  trail.node(1, 0).members = {2, 3};
  trail.node(1, 1).members = {0, 1};
  const double lo[] = {0.0}, hi[] = {0.5};
  const std::vector<Region> regions{Region::left_open(lo, hi), Region::unit_cube(1)};
  for (std::size_t leaf = 0; leaf < 2; ++leaf) {
    CHECK(transference_audit(trail, leaf, regions) == 0.0);
    CHECK(transference_audit_exact(trail, leaf, regions) == 0);
  }
  CHECK(transference_audit(trail, 0, {}) == 0.0);
  CHECK_THROWS_AS(transference_audit(trail, 2, regions), PreconditionError);

  // Flipping one sign without moving the point breaks the identity by 2/n_0 per count.
  trail.node(0, 0).coloring.signs[0] = -1;
  CHECK(transference_audit_exact(trail, 0, regions) == 2);
  CHECK(transference_audit(trail, 0, regions) == doctest::Approx(0.5));
}

TEST_CASE("transference audit on generated runs") {
  TransferenceConfig c;
  c.n = 64;
  c.d = 2;
  c.oversample_k = 4;
  c.profile = WeightProfile::unit(2);
  c.init = IidInit{3};
  c.walk.seed = 4;
  c.shift_seed = 5;
  const auto r = run(c);
  Rng rng(8);
  std::vector<Region> regions{Region::unit_cube(2)};
  for (int i = 0; i < 100; ++i) {
    std::vector<double> lo(2), hi(2);
    for (int j = 0; j < 2; ++j) {
      const int level = static_cast<int>(rng.below(6));
      const double w = std::ldexp(1.0, -level);
      const double o = static_cast<double>(rng.below(std::uint64_t{1} << level));
      lo[j] = o * w;
      hi[j] = (o + 1) * w;
    }
    regions.push_back(Region::left_open(lo, hi));
  }
  for (std::size_t leaf = 0; leaf < r.trail.leaf_count(); ++leaf) {
    CHECK(transference_audit(r.trail, leaf, regions) <= 1e-10);
    CHECK(transference_audit_exact(r.trail, leaf, regions) == 0);
  }
}

TEST_CASE("quantile is type 7") {
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == 1.75);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.75) == 3.25);
  CHECK(quantile({5.0}, 0.3) == 5.0);
  CHECK_THROWS_AS(quantile({}, 0.5), PreconditionError);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), PreconditionError);
}

TEST_CASE("summarize") {
  const auto s = summarize({{8, {1.0, -1.0}}});
  REQUIRE(s.rows.size() == 1);
  CHECK(s.rows[0].mae == 1.0);
  CHECK(s.rows[0].iqr == 1.0);
  CHECK(s.rows[0].abs_q25 == 1.0);
  CHECK(!s.alpha.has_value());

  const auto h = summarize({{8, {0.8, -0.8}}, {16, {0.4, -0.4}}, {32, {-0.2, 0.2}}, {64, {0.1}}});
  REQUIRE(h.alpha.has_value());
  CHECK(*h.alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(summarize({{8, {}}}), PreconditionError);
}

TEST_CASE("summarize recovers the Monte Carlo rate") {
  std::map<std::uint64_t, std::vector<double>> errors;
  for (std::uint64_t n = 64; n <= 1024; n *= 2) {
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
      const auto ps = iid_uniform(n, 1, n * 1000 + seed);
      errors[n].push_back(integration_error(ps, [](std::span<const double> x) { return x[0]; }, 0.5));
    }
  }
  const auto s = summarize(errors);
  REQUIRE(s.alpha.has_value());
  CHECK(*s.alpha >= 0.35);
  CHECK(*s.alpha <= 0.65);
}

TEST_CASE("fourier evaluation") {
  FourierPolynomial f{1, {}};
  f.add({1}, 0.5);
  f.add({-1}, 0.5);
  const double zero[] = {0.0}, quarter[] = {0.25};
  CHECK(fourier_eval(f, zero) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(fourier_eval(f, quarter)) <= 1e-15);

  FourierPolynomial bad{1, {}};
  bad.add({1}, 0.5);
  CHECK_THROWS_AS(fourier_eval(bad, zero), PreconditionError);
  CHECK_THROWS_AS(bad.add({1, 2}, 1.0), PreconditionError);

  FourierPolynomial constant{2, {}};
  constant.add({0, 0}, 1.25);
  const auto ps = iid_uniform(17, 2, 4);
  CHECK(integration_error(ps, [&](std::span<const double> x) { return fourier_eval(constant, x); },
                          constant.constant().real()) == 0.0);
}

TEST_CASE("read_fourier") {
  std::istringstream in("# cos(2 pi (x1 + x2))\n1 1 0.5 0\n-1 -1 0.5 0  # partner\n\n0 0 2 0\n");
  const auto f = read_fourier(in, 2);
  CHECK(f.terms.size() == 3);
  CHECK(f.conjugate_symmetric());
  CHECK(f.constant() == std::complex<double>(2.0, 0.0));
  std::istringstream short_line("1 0.5 0\n");
  CHECK_THROWS_AS(read_fourier(short_line, 3), PreconditionError);
  std::istringstream trailing("1 0.5 0 9\n");
  CHECK_THROWS_AS(read_fourier(trailing, 1), PreconditionError);
}
