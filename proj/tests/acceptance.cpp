// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "well_echo/analysis.hpp"
#include "well_echo/closedform.hpp"
#include "well_echo/evolution.hpp"
#include "well_echo/momentum.hpp"
#include "well_echo/spectral.hpp"

using namespace well;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Medians of the current over windows of width w inside [lo, hi].
std::vector<double> window_medians(const CurrentProfile& j, double lo, double hi, double w) {
  std::vector<double> out;
  for (double a = lo; a + w <= hi + 1e-12; a += w) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < j.grid.size(); ++i) {
      const double x = j.grid.points()[i];
      if (x >= a && x <= a + w) vals.push_back(j.values[i]);
    }
    if (!vals.empty()) out.push_back(median(vals));
  }
  return out;
}

double worst(const std::vector<double>& v, double target) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x - target));
  return m;
}

bool near_plateau(const PlateauReport& r, double lo, double hi, double value, double end_tol,
                  double value_tol, std::ostream& os) {
  for (const auto& p : r.plateaux) {
    if (std::abs(p.lo - lo) <= end_tol && std::abs(p.hi - hi) <= end_tol) {
      os << " plateau [" << p.lo << ", " << p.hi << "] value " << p.value;
      return std::abs(p.value - value) <= value_tol;
    }
  }
  os << " plateaux found:";
  for (const auto& p : r.plateaux) os << " [" << p.lo << ", " << p.hi << "]=" << p.value;
  return false;
}

// Plateau endpoints: the density approaches the plateau quadratically, so a
// 10 error_bound tolerance blurs the edge by about sqrt(tol) / pi.
constexpr double kEndTol = 1e-3;

Outcome plateau_quarter() {
  Outcome o;
  const auto model = make_model(1.5);
  const auto set = build_spectral_set(model, 1e-7);
  const auto grid = SpatialGrid::cusp_aligned(model, 6000);
  const auto rho = density(evaluate_wavefunction(set, grid, reduce_time(1, 4)));
  const double sup = sup_abs_diff(rho.values, density_quarter(model).sample(grid.points()));
  o.detail << "sup|series-closed| = " << sup;
  o.require(sup <= 1e-6, "sup-norm <= 1e-6");
  const auto r = detect_plateaux(rho);
  o.require(near_plateau(r, 0.5, 1.0, 1.0, kEndTol, 1e-6, o.detail), "plateau [0.5,1] = 1");
  return o;
}

Outcome plateau_eighth() {
  Outcome o;
  const auto model = make_model(1.5);
  const auto set = build_spectral_set(model, 1e-7);
  const auto grid = SpatialGrid::cusp_aligned(model, 6000);
  const auto field = evaluate_wavefunction(set, grid, reduce_time(1, 8));
  const auto rho = density(field);
  const double sup = sup_abs_diff(rho.values, density_eighth(model).sample(grid.points()));
  o.detail << "sup|series-closed| = " << sup;
  o.require(sup <= 1e-6, "sup-norm <= 1e-6");
  const auto r = detect_plateaux(rho);
  o.require(near_plateau(r, 0.25, 0.5, 0.25, kEndTol, 1e-6, o.detail), "plateau [0.25,0.5] = 0.25");
  const auto cusps = detect_cusps(rho);
  o.detail << " cusps:";
  for (const double x : cusps.positions()) o.detail << ' ' << x;
  for (const double x : {0.25, 0.5, 0.75, 1.0, 1.25}) {
    bool hit = false;
    for (const auto& c : cusps.cusps) hit |= std::abs(c.position - x) <= cusps.step;
    o.require(hit, "cusp at " + std::to_string(x));
  }
  return o;
}

Outcome closed_form_oracle() {
  Outcome o;
  double worst_ratio = 0.0;
  for (const double lambda : {1.5, 2.5, 3.0, 5.5}) {
    const auto model = make_model(lambda);
    const auto set = build_spectral_set(model, 1e-6);
    const auto grid = SpatialGrid::cusp_aligned(model, 2000);
    const std::vector<std::pair<RationalTime, PiecewiseTrig>> cases{
        {reduce_time(1, 2), psi_half(model)},
        {reduce_time(1, 4), psi_quarter(model)},
        {reduce_time(1, 8), psi_eighth(model)}};
    for (const auto& [t, f] : cases) {
      const auto c = compare(evaluate_wavefunction(set, grid, t), sample_closed_form(f, grid, t));
      worst_ratio = std::max(worst_ratio, c.sup / c.bound);
      o.require(c.pass, "lambda " + std::to_string(lambda) + " tau " + time_label(t));
    }
  }
  o.detail << "max sup / error_bound = " << worst_ratio;
  return o;
}

Outcome current_quarter_medians() {
  Outcome o;
  {
    const auto model = make_model(1.5);
    const auto set = build_spectral_set(model, 1e-6);
    const auto j = current(set, SpatialGrid::lattice(model, 3000), reduce_time(1, 4));
    const double inside = worst(window_medians(j, 0.55, 0.95, 0.1), -1.0);
    auto outside = window_medians(j, 0.0, 0.45, 0.075);
    const auto right = window_medians(j, 1.05, 1.5, 0.075);
    outside.insert(outside.end(), right.begin(), right.end());
    const double out = worst(outside, 0.0);
    o.detail << "lambda 1.5: |median+1| " << inside << ", |median| outside " << out;
    o.require(inside <= 1e-3, "lambda 1.5 inside");
    o.require(out <= 1e-3, "lambda 1.5 outside");
  }
  {
    const auto model = make_model(2.5);
    const auto set = build_spectral_set(model, 1e-6);
    const auto j = current(set, SpatialGrid::lattice(model, 5000), reduce_time(1, 4));
    const double all = worst(window_medians(j, 0.0, 2.5, 0.1), 0.0);
    o.detail << "; lambda 2.5: |median| " << all;
    o.require(all <= 1e-3, "lambda 2.5");
  }
  return o;
}

Outcome fragmentation() {
  Outcome o;
  {
    const auto model = make_model(5.5);
    const auto set = build_spectral_set(model, 1e-7);
    const auto grid = SpatialGrid::cusp_aligned(model, 11000);
    const auto r = detect_fragments(density(evaluate_wavefunction(set, grid, reduce_time(1, 4))));
    o.detail << "5.5: " << r.count() << " parts";
    o.require(r.count() == 2, "lambda 5.5 two parts");
    for (const auto& f : r.fragments) {
      o.detail << " (m " << f.mass << ", d " << f.shape_distance << ")";
      o.require(std::abs(f.mass - 0.5) <= 1e-6, "mass 0.5");
      o.require(f.shape_distance <= 1e-5, "shape distance");
    }
  }
  {
    const auto model = make_model(8.0);
    const auto set = build_spectral_set(model, 1e-6);
    const auto grid = SpatialGrid::cusp_aligned(model, 8000);
    const auto r = detect_fragments(density(evaluate_wavefunction(set, grid, reduce_time(1, 8))));
    const double h = *grid.uniform_step();
    o.detail << "; 8: centroids";
    o.require(r.count() == 4, "lambda 8 four parts");
    const std::array<double, 4> expect{0.5, 3.5, 4.5, 7.5};
    for (std::size_t i = 0; i < r.count(); ++i) {
      o.detail << ' ' << r.fragments[i].centroid;
      if (i < 4) o.require(std::abs(r.fragments[i].centroid - expect[i]) <= h, "centroid");
    }
  }
  {
    const auto start = std::chrono::steady_clock::now();
    const auto model = make_model(20.0);
    const auto set = build_spectral_set(model, 1e-5);
    const auto grid = SpatialGrid::cusp_aligned(model, 16000);
    const auto r = detect_fragments(density(evaluate_wavefunction(set, grid, reduce_time(1, 32))));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.detail << "; 20: " << r.count() << " parts in " << secs << " s";
    o.require(r.count() == 16, "lambda 20 sixteen parts");
    o.require(secs <= 300.0, "runtime");
  }
  return o;
}

Outcome sum_rules() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  double g_err = 0.0;
  double direct_err = 0.0;
  double energy_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    double lambda = u(rng);
    while (lambda <= 1.0 || std::abs(lambda - std::round(lambda)) < 1e-6) lambda = u(rng);
    const auto model = make_model(lambda);
    const auto r = norm_and_energy_via_g(lambda);
    g_err = std::max({g_err, std::abs(r.norm - 1.0), std::abs(r.energy - 1.0)});
    direct_err = std::max(direct_err,
                          std::abs(measurement_distribution(model, 100000).partial_sum - 1.0));
    energy_err = std::max(energy_err,
                          std::abs(mean_energy(build_spectral_set_truncated(model, 100000)) - 1.0));
  }
  o.detail << "G rules " << g_err << ", direct sum " << direct_err << ", <H> " << energy_err;
  o.require(g_err <= 1e-10, "G sum rules");
  o.require(direct_err <= 1e-4, "direct sum");
  o.require(energy_err <= 1e-6, "<H>");
  return o;
}

Outcome divergent_variance() {
  Outcome o;
  for (const double lambda : {1.5, 2.5, 5.5}) {
    for (const std::int64_t n : {1000, 10000}) {
      const double ratio = second_moment_sum(lambda, 2 * n) / second_moment_sum(lambda, n);
      o.detail << " S(" << 2 * n << ")/S(" << n << ")=" << ratio;
      o.require(ratio >= 1.8 && ratio <= 2.2, "ratio");
    }
  }
  return o;
}

Outcome measurement() {
  Outcome o;
  for (const std::int64_t n0 : {2, 3, 5}) {
    const double p = probability(static_cast<double>(n0), n0);
    o.require(std::abs(p - 1.0 / n0) <= 1e-10, "P_n0");
  }
  double worst_sum = 0.0;
  for (const double lambda : {1.5, 2.5, 5.5, 20.0}) {
    worst_sum = std::max(
        worst_sum,
        std::abs(measurement_distribution(make_model(lambda), 100000).partial_sum - 1.0));
  }
  const auto arg = measurement_distribution(make_model(20.0), 1000).argmax();
  o.detail << "|sum P - 1| " << worst_sum << ", argmax at 20: " << arg;
  o.require(worst_sum <= 1e-4, "sum P_n");
  o.require(arg >= 19 && arg <= 21, "argmax");
  return o;
}

Outcome symmetries() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lam(1.05, 10.0);
  std::uniform_int_distribution<std::int64_t> den(2, 64);
  double ratio = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double lambda = lam(rng);
    const std::int64_t q = den(rng);
    const std::int64_t p = std::uniform_int_distribution<std::int64_t>(0, q - 1)(rng);
    const auto model = make_model(lambda);
    const auto set = build_spectral_set(model, 1e-6);
    const auto rep = check_symmetries(set, SpatialGrid::lattice(model, 1000), reduce_time(p, q));
    ratio = std::max({ratio, rep.density_reflection / rep.bound,
                      rep.current_reflection / rep.bound, rep.half_period_shift / rep.bound});
    o.require(rep.density_reflection <= rep.bound && rep.current_reflection <= rep.bound &&
                  rep.half_period_shift <= rep.bound,
              "lambda " + std::to_string(lambda) + " tau " + std::to_string(p) + "/" +
                  std::to_string(q));
  }
  o.detail << "max residual / (2 error_bound) = " << ratio;
  return o;
}

Outcome momentum_norms() {
  Outcome o;
  const double naive = momentum_norm(MomentumKind::naive_limit);
  const double truth = momentum_norm(MomentumKind::true_initial);
  o.detail << "naive " << naive << ", true " << truth;
  o.require(std::abs(naive - 2.0) <= 1e-5, "naive norm 2");
  o.require(std::abs(truth - 1.0) <= 1e-5, "true norm 1");
  return o;
}

Outcome conjecture() {
  Outcome o;
  const std::array<std::size_t, 6> expect{6, 3, 2, 3, 6, 1};
  o.detail << "counts";
  for (int p = 1; p <= 6; ++p) {
    const auto r = conjecture_scan(make_model(6.0), 12, p);
    o.detail << ' ' << r.count();
    if (r.count() != expect[static_cast<std::size_t>(p - 1)]) {
      o.pass = false;
      o.detail << " (p=" << p << " expected " << expect[static_cast<std::size_t>(p - 1)]
               << "; masses";
      for (const auto& f : r.fragments) o.detail << ' ' << f.mass;
      o.detail << ")";
    }
  }
  return o;
}

Outcome expectation_values() {
  Outcome o;
  std::vector<TimeSpec> taus;
  for (int k = 0; k < 200; ++k) taus.push_back(reduce_time(k, 200));
  double start_err = 0.0;
  double range_violation = 0.0;
  double min_product = 1e300;
  for (const double lambda : {1.5, 3.0, 5.5}) {
    const auto tr = expectations(build_spectral_set(make_model(lambda), 1e-5), taus);
    start_err = std::max({start_err, std::abs(tr.mean_xi[0] - 0.5), std::abs(tr.mean_p[0])});
    for (std::size_t i = 0; i < taus.size(); ++i) {
      range_violation = std::max({range_violation, 0.5 - tr.mean_xi[i],
                                  tr.mean_xi[i] - (lambda - 0.5)});
      min_product = std::min(min_product, tr.product[i]);
    }
  }
  o.detail << "tau=0 error " << start_err << ", range excess " << range_violation
           << ", min dx dp " << min_product;
  o.require(start_err <= 1e-6, "tau = 0");
  o.require(range_violation <= 1e-3, "<xi> range");
  o.require(min_product >= 0.5 - 1e-6, "uncertainty");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"plateau T/4 (lambda 3/2)", plateau_quarter},
      {"plateau and cusps T/8 (lambda 3/2)", plateau_eighth},
      {"closed-form oracle", closed_form_oracle},
      {"current T/4 interval medians", current_quarter_medians},
      {"fragmentation", fragmentation},
      {"sum rules", sum_rules},
      {"divergent energy variance", divergent_variance},
      {"measurement distribution", measurement},
      {"symmetries", symmetries},
      {"momentum norms", momentum_norms},
      {"fragment counts lambda 6, M 12", conjecture},
      {"expectation values", expectation_values},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
