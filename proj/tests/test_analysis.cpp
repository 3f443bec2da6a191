#include <doctest.h>

#include <algorithm>

#include "oracle.hpp"
#include "well_echo/analysis.hpp"
#include "well_echo/closedform.hpp"
#include "well_echo/spectral.hpp"

using namespace well;

namespace {

DensityProfile synthetic(double lambda, std::int64_t m, const std::function<double(double)>& f) {
  const auto model = make_model(lambda);
  DensityProfile p;
  p.grid = SpatialGrid::lattice(model, m);
  p.lambda = lambda;
  p.time = reduce_time(0, 1);
  for (const double x : p.grid.points()) {
    p.values.push_back(f(x));
  }
  return p;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("plateau on a synthetic profile") {
  const auto p = synthetic(2.0, 2000, [](double x) {
    if (x < 0.5) return std::pow(std::sin(oracle::pi * x), 2);
    if (x <= 1.2) return 1.0;
    return std::pow(std::sin(oracle::pi * (x - 1.2) / 1.6 + oracle::pi / 2), 2);
  });
  const auto r = detect_plateaux(p, 1e-10);
  REQUIRE(r.plateaux.size() == 1);
  CHECK(r.plateaux[0].lo == doctest::Approx(0.5));
  CHECK(r.plateaux[0].hi == doctest::Approx(1.2));
  CHECK(r.plateaux[0].value == doctest::Approx(1.0));
}

TEST_CASE("exact plateaux of the closed forms at lambda = 3/2") {
  const auto model = make_model(1.5);
  const auto grid = SpatialGrid::cusp_aligned(model, 6000);
  const double h = *grid.uniform_step();
  const auto q = detect_plateaux(
      sample_closed_form(density_quarter(model), grid, reduce_time(1, 4)));
  REQUIRE(q.plateaux.size() == 1);
  CHECK(std::abs(q.plateaux[0].lo - 0.5) <= h);
  CHECK(std::abs(q.plateaux[0].hi - 1.0) <= h);
  CHECK(q.plateaux[0].value == doctest::Approx(1.0).epsilon(1e-12));
  const auto e = detect_plateaux(
      sample_closed_form(density_eighth(model), grid, reduce_time(1, 8)));
  REQUIRE(e.plateaux.size() == 1);
  CHECK(std::abs(e.plateaux[0].lo - 0.25) <= h);
  CHECK(std::abs(e.plateaux[0].hi - 0.5) <= h);
  CHECK(e.plateaux[0].value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("fragments of the closed-form profiles are scaled initial densities") {
  for (const auto& [lambda, level] : std::vector<std::pair<double, int>>{{5.0, 2}, {8.0, 2}, {11.3, 3}}) {
    CAPTURE(lambda);
    const auto model = make_model(lambda);
    const auto f = fragmented_density(model, level);
    const auto grid = SpatialGrid::cusp_aligned(model, 20000);
    const auto r = detect_fragments(
        sample_closed_form(f.density, grid, reduce_time(1, 1 << (level + 1))), 1e-12);
    CHECK(r.count() == f.centers.size());
    CHECK(r.weight == doctest::Approx(1.0 / (1 << level)));
    CHECK(r.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& fr : r.fragments) {
      CHECK(fr.shape_distance <= 1e-10);
    }
  }
}

TEST_CASE("cusps are the same at tau and 1 - tau") {
  const auto model = make_model(2.5);
  const auto set = build_spectral_set(model, 1e-7);
  const auto grid = SpatialGrid::cusp_aligned(model, 4000);
  for (const auto& t : {reduce_time(1, 8), reduce_time(1, 4), reduce_time(1, 3)}) {
    const auto a = detect_cusps(density(evaluate_wavefunction(set, grid, t))).positions();
    const auto b = detect_cusps(density(evaluate_wavefunction(set, grid, reflect(t)))).positions();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("plateau detector refuses coarse grids") {
  const auto p = synthetic(2.0, 100, [](double) { return 0.5; });
  CHECK_THROWS_AS(detect_plateaux(p, 1e-10), AnalysisError);
}

TEST_CASE("cusps of a synthetic profile") {
  const auto p = synthetic(2.0, 2000, [](double x) {
    return 0.3 + 0.2 * std::abs(x - 0.7) + 0.05 * std::sin(x);
  });
  const auto r = detect_cusps(p);
  REQUIRE(r.cusps.size() == 1);
  CHECK(std::abs(r.cusps[0].position - 0.7) <= r.step);
}

TEST_CASE("T/4 density joins smoothly, T/8 density has cusps") {
  const auto model = make_model(1.5);
  const auto grid = SpatialGrid::cusp_aligned(model, 3000);
  // sin^2 meets the plateau with zero slope at 1/2 and 1
  const auto q = sample_closed_form(density_quarter(model), grid, reduce_time(1, 4));
  CHECK(detect_cusps(q).cusps.empty());
  const auto e = sample_closed_form(density_eighth(model), grid, reduce_time(1, 8));
  const auto r = detect_cusps(e);
  const auto pos = r.positions();
  REQUIRE(pos.size() == 4);
  const std::array<double, 4> expect{0.25, 0.5, 1.0, 1.25};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(pos[i] - expect[i]) <= r.step);
  }
}

TEST_CASE("fragments of a synthetic two-lobe profile") {
  const auto p = synthetic(4.0, 4000, [](double x) {
    if (x <= 1.0) return std::pow(std::sin(oracle::pi * x), 2);
    if (x >= 2.5 && x <= 3.5) return std::pow(std::sin(oracle::pi * (x - 2.5)), 2);
    return 0.0;
  });
  const auto r = detect_fragments(p, 1e-10);
  REQUIRE(r.count() == 2);
  CHECK(r.equal_masses(1e-6));
  CHECK(r.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.fragments[1].centroid == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r.fragments[0].shape_distance < 1e-6);
  CHECK(r.fragments[1].shift == doctest::Approx(2.5).epsilon(1e-4));
}

TEST_CASE("conjecture scan for lambda = 6, M = 12") {
  const std::array<std::size_t, 6> expect{6, 3, 2, 3, 6, 1};
  for (int p = 1; p <= 6; ++p) {
    CHECK(conjecture_scan(make_model(6.0), 12, p).count() == expect[p - 1]);
  }
}

TEST_CASE("threshold estimate") {
  std::vector<double> lambdas;
  for (double l = 1.5; l <= 8.0; l += 0.5) lambdas.push_back(l);
  const auto est = estimate_threshold(6, lambdas);
  REQUIRE(est.lambda_c);
  CHECK(*est.lambda_c == doctest::Approx(3.0));
}

TEST_CASE("double-sum moments agree with quadrature") {
  for (const double lambda : {1.5, 3.0}) {
    const auto model = make_model(lambda);
    const auto set = build_spectral_set_truncated(model, 200);
    const auto grid = SpatialGrid::lattice(model, 20000);
    const TimeSpec t = reduce_time(1, 7);
    const auto rho = density(evaluate_wavefunction(set, grid, t));
    std::vector<double> x1, x2;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      x1.push_back(grid.points()[i] * rho.values[i]);
      x2.push_back(grid.points()[i] * grid.points()[i] * rho.values[i]);
    }
    const auto m = moments_double_sum(lambda, 200, t);
    CHECK(m.mean_xi == doctest::Approx(trapezoid(grid, x1)).epsilon(1e-6));
    CHECK(m.mean_xi2 == doctest::Approx(trapezoid(grid, x2)).epsilon(1e-6));
  }
}

TEST_CASE("expectations at tau = 0 and the uncertainty bound") {
  const auto set = build_spectral_set(make_model(2.5), 1e-5);
  std::vector<TimeSpec> taus;
  for (int k = 0; k < 40; ++k) taus.push_back(reduce_time(k, 40));
  const auto tr = expectations(set, taus);
  CHECK(tr.mean_xi[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(tr.mean_p[0]) < 1e-6);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    CHECK(tr.product[i] >= 0.5 - 1e-6);
  }
  // rho(tau) = rho(1 - tau): <xi> symmetric, <p> antisymmetric
  CHECK(tr.mean_xi[7] == doctest::Approx(tr.mean_xi[33]).epsilon(1e-8));
  CHECK(tr.mean_p[7] == doctest::Approx(-tr.mean_p[33]).epsilon(1e-6));
}

TEST_CASE("compare needs matching grids") {
  const auto model = make_model(1.5);
  const auto a = sample_closed_form(density_quarter(model), SpatialGrid::lattice(model, 10),
                                    reduce_time(1, 4));
  const auto b = sample_closed_form(density_quarter(model), SpatialGrid::lattice(model, 12),
                                    reduce_time(1, 4));
  CHECK_THROWS_AS(compare(a, b), AnalysisError);
  CHECK(compare(a, a).sup == 0.0);
}

}
