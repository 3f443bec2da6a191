#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracle.hpp"
#include "well_echo/evolution.hpp"
#include "well_echo/spectral.hpp"

using namespace well;

namespace {

double sup_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("lattice and direct paths agree with a plain sum") {
  const auto model = make_model(2.5);
  const auto set = build_spectral_set_truncated(model, 1500);
  const auto lattice = SpatialGrid::lattice(model, 40);
  const auto loose = SpatialGrid::from_points(model, lattice.points());
  REQUIRE_FALSE(loose.lattice_info());
  for (const auto& [p, q] : std::vector<std::pair<int, int>>{{0, 1}, {1, 4}, {3, 8}, {5, 13}}) {
    const TimeSpec t = reduce_time(p, q);
    const auto a = evaluate_wavefunction(set, lattice, t);
    const auto b = evaluate_wavefunction(set, loose, t);
    CHECK(sup_diff(a.values, b.values) < 1e-12);
    for (std::size_t i = 0; i < lattice.size(); i += 7) {
      const auto ref = oracle::psi_series(2.5, 1500, p, q, lattice.points()[i]);
      CHECK(std::abs(a.values[i] - ref) < 1e-12);
    }
  }
}

TEST_CASE("doubling n_max stays within the certified bounds") {
  const auto model = make_model(3.7);
  const auto grid = SpatialGrid::lattice(model, 600);
  const auto s1 = build_spectral_set_truncated(model, 2000);
  const auto s2 = build_spectral_set_truncated(model, 4000);
  for (const TimeSpec t : {TimeSpec{reduce_time(1, 3)}, TimeSpec{0.1234}}) {
    const auto a = evaluate_wavefunction(s1, grid, t);
    const auto b = evaluate_wavefunction(s2, grid, t);
    CHECK(sup_diff(a.values, b.values) <= a.error_bound);
  }
}

TEST_CASE("one period later the field is bit-identical") {
  const auto model = make_model(1.5);
  const auto set = build_spectral_set(model, 1e-4);
  const auto grid = SpatialGrid::lattice(model, 300);
  const auto a = evaluate_wavefunction(set, grid, reduce_time(2, 7));
  const auto b = evaluate_wavefunction(set, grid, reduce_time(9, 7));
  CHECK(a.values == b.values);
}

TEST_CASE("real and rational times agree") {
  const auto model = make_model(2.5);
  const auto set = build_spectral_set(model, 1e-5);
  const auto grid = SpatialGrid::lattice(model, 200);
  const auto a = evaluate_wavefunction(set, grid, reduce_time(1, 8));
  const auto b = evaluate_wavefunction(set, grid, 0.125);
  CHECK(sup_diff(a.values, b.values) < 1e-9);
}

TEST_CASE("norm is conserved at random times") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(1.1, 9.0);
  std::uniform_int_distribution<int> num(0, 63);
  for (int k = 0; k < 20; ++k) {
    const auto model = make_model(lam(rng));
    // real times take the point-by-point path; keep that half cheaper
    const bool rational = k % 2 == 1;
    const auto set = build_spectral_set(model, rational ? 1e-5 : 1e-4);
    const auto grid = SpatialGrid::lattice(model, rational ? 8192 : 2048);
    const TimeSpec t = rational ? TimeSpec{reduce_time(num(rng), 64)} : TimeSpec{num(rng) / 63.7};
    const auto rho = density(evaluate_wavefunction(set, grid, t));
    CHECK(std::abs(trapezoid(grid, rho.values) - 1.0) < 1e-4);
  }
}

TEST_CASE("boundary values vanish") {
  const auto model = make_model(4.2);
  const auto set = build_spectral_set(model, 1e-5);
  const auto f = evaluate_wavefunction(set, SpatialGrid::lattice(model, 100), reduce_time(1, 5));
  CHECK(std::abs(f.values.front()) < 1e-14);
  CHECK(std::abs(f.values.back()) < 1e-12);
}

TEST_CASE("derivative matches a finite difference of the field") {
  const auto model = make_model(2.5);
  const auto set = build_spectral_set_truncated(model, 300);
  const double h = 1e-5;
  const auto grid = SpatialGrid::from_points(model, {0.7 - h, 0.7, 0.7 + h});
  const TimeSpec t = reduce_time(1, 5);
  const auto f = evaluate_wavefunction(set, grid, t);
  const auto d = evaluate_derivative(set, grid, t);
  const cplx fd = (f.values[2] - f.values[0]) / (2 * h);
  CHECK(std::abs(d.values[1] - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
}

TEST_CASE("current equals Im(conj u u') / pi") {
  const auto model = make_model(3.3);
  const auto set = build_spectral_set_truncated(model, 500);
  const auto grid = SpatialGrid::lattice(model, 90);
  const TimeSpec t = reduce_time(2, 9);
  const auto f = evaluate_wavefunction(set, grid, t);
  const auto d = evaluate_derivative(set, grid, t);
  const auto j = current(set, grid, t);
  const auto both = evaluate_with_current(set, grid, t);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ref = std::imag(std::conj(f.values[i]) * d.values[i]) / oracle::pi;
    CHECK(j.values[i] == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
    CHECK(both.current.values[i] == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("density under tau -> 1 - tau") {
  const auto model = make_model(3.4);
  const auto set = build_spectral_set(model, 1e-6);
  const auto grid = SpatialGrid::lattice(model, 700);
  for (const auto& t : {reduce_time(1, 9), reduce_time(3, 10)}) {
    const auto a = density(evaluate_wavefunction(set, grid, t));
    const auto b = density(evaluate_wavefunction(set, grid, reflect(t)));
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    CHECK(m <= 2 * set.tail_bound);
    const auto ia = std::max_element(a.values.begin(), a.values.end()) - a.values.begin();
    const auto ib = std::max_element(b.values.begin(), b.values.end()) - b.values.begin();
    CHECK(ia == ib);
  }
}

TEST_CASE("symmetry identities") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(1.2, 8.0);
  for (int k = 0; k < 6; ++k) {
    const auto model = make_model(lam(rng));
    const auto set = build_spectral_set(model, 1e-6);
    const auto grid = SpatialGrid::lattice(model, 500);
    const auto rep = check_symmetries(set, grid, reduce_time(2 * k + 1, 20));
    CHECK(rep.ok());
  }
  const auto model = make_model(2.5);
  const auto rep = check_symmetries(build_spectral_set(model, 1e-6),
                                    SpatialGrid::lattice(model, 500), reduce_time(1, 4));
  REQUIRE(rep.quarter_mirror);
  CHECK(*rep.quarter_mirror <= rep.bound);
}

}
