#include "well_echo/analysis.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "well_echo/parallel.hpp"

namespace well {

namespace {

constexpr double kPi = std::numbers::pi;

double median(std::vector<double> v) {
  if (v.empty()) {
    return 0.0;
  }
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double max_spacing(const std::vector<double>& x) {
  double h = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    h = std::max(h, x[i] - x[i - 1]);
  }
  return h;
}

}  // namespace

// ---- plateaux

double default_plateau_tolerance(const DensityProfile& profile) {
  return profile.error_bound > 0.0 ? 10.0 * profile.error_bound : 1e-10;
}

PlateauReport detect_plateaux(const DensityProfile& profile, double tol, double min_width) {
  const auto& x = profile.grid.points();
  const auto& v = profile.values;
  if (!(min_width > 0.0) || !(tol >= 0.0)) {
    throw AnalysisError("plateau detection needs min_width > 0 and tol >= 0");
  }
  if (x.size() < 2 || max_spacing(x) > min_width / 20.0) {
    throw AnalysisError("grid too coarse for plateau detection: need spacing <= min_width / 20");
  }
  PlateauReport rep{{}, tol, min_width};
  std::size_t i = 0;
  while (i < x.size()) {
    double lo = v[i];
    double hi = v[i];
    std::size_t j = i;
    while (j + 1 < x.size()) {
      const double nlo = std::min(lo, v[j + 1]);
      const double nhi = std::max(hi, v[j + 1]);
      if (nhi - nlo > tol) {
        break;
      }
      lo = nlo;
      hi = nhi;
      ++j;
    }
    if (x[j] - x[i] >= min_width) {
      const double sum = std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(i),
                                         v.begin() + static_cast<std::ptrdiff_t>(j + 1), 0.0);
      const double mean = sum / static_cast<double>(j - i + 1);
      rep.plateaux.push_back({x[i], x[j], mean, std::max(hi - mean, mean - lo)});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return rep;
}

PlateauReport detect_plateaux(const DensityProfile& profile) {
  return detect_plateaux(profile, default_plateau_tolerance(profile));
}

// ---- cusps

namespace {

template <typename T>
std::vector<Cusp> second_difference_peaks(const std::vector<double>& x, const std::vector<T>& v,
                                          double floor, double kappa, double h) {
  const std::size_t n = x.size();
  std::vector<double> d2(n, 0.0);
  std::vector<double> active;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d2[i] = std::abs(v[i + 1] - 2.0 * v[i] + v[i - 1]);
    if (d2[i] > floor) {
      active.push_back(d2[i]);
    }
  }
  const double threshold = std::max(kappa * median(active), floor);
  std::vector<Cusp> out;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (d2[i] <= threshold) {
      ++i;
      continue;
    }
    // Cluster flagged samples separated by at most one quiet sample.
    std::size_t j = i;
    while (j + 2 < n && (d2[j + 1] > threshold || (j + 3 < n && d2[j + 2] > threshold))) {
      ++j;
    }
    double w = 0.0;
    double wx = 0.0;
    double peak = 0.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (d2[k] > threshold) {
        w += d2[k];
        wx += d2[k] * x[k];
        peak = std::max(peak, d2[k]);
      }
    }
    out.push_back({wx / w, 0.5 * h, peak / threshold});
    i = j + 1;
  }
  return out;
}

double require_uniform(const SpatialGrid& grid) {
  const auto h = grid.uniform_step();
  if (!h || grid.size() < 5) {
    throw AnalysisError("cusp detection needs a uniform grid with at least 5 points");
  }
  return *h;
}

}  // namespace

std::vector<double> CuspReport::positions() const {
  std::vector<double> out;
  for (const auto& c : cusps) {
    out.push_back(c.position);
  }
  return out;
}

std::vector<double> CuspReport::jump_positions() const {
  std::vector<double> out;
  for (const auto& c : derivative_jumps) {
    out.push_back(c.position);
  }
  return out;
}

CuspReport detect_cusps(const DensityProfile& profile, const CuspOptions& options) {
  const double h = require_uniform(profile.grid);
  const double peak = *std::max_element(profile.values.begin(), profile.values.end());
  const double floor = 8.0 * profile.error_bound * std::sqrt(std::max(peak, 0.0)) + 1e-14;
  CuspReport rep;
  rep.step = h;
  rep.cusps =
      second_difference_peaks(profile.grid.points(), profile.values, floor, options.kappa, h);
  return rep;
}

CuspReport detect_cusps(const WaveField& field, const CuspOptions& options) {
  CuspReport rep = detect_cusps(density(field), options);
  const double floor = 8.0 * field.error_bound + 1e-14;
  rep.derivative_jumps =
      second_difference_peaks(field.grid.points(), field.values, floor, options.kappa, rep.step);
  return rep;
}

// ---- fragments

double FragmentReport::total_mass() const {
  double m = 0.0;
  for (const auto& f : fragments) {
    m += f.mass;
  }
  return m;
}

bool FragmentReport::equal_masses(double tol) const {
  if (fragments.empty()) {
    return false;
  }
  const auto [lo, hi] = std::minmax_element(
      fragments.begin(), fragments.end(),
      [](const Fragment& a, const Fragment& b) { return a.mass < b.mass; });
  return hi->mass - lo->mass <= tol;
}

double default_zero_tolerance(const DensityProfile& profile) {
  return std::max(1e-10, 100.0 * profile.error_bound * profile.error_bound);
}

namespace {

double trapezoid_all(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  }
  return s;
}

double copy_value(double weight, double shift, double xi) {
  const double d = xi - shift;
  if (d <= 0.0 || d >= 1.0) {
    return 0.0;
  }
  const double s = std::sin(kPi * d);
  return 2.0 * weight * s * s;
}

struct Segment {
  std::vector<double> x;
  std::vector<double> v;
};

// Vertex of the parabola through three samples around a local minimum, if
// it reaches zero: two lobes touching between grid points.
std::optional<double> touching_zero(const std::vector<double>& x, const std::vector<double>& v,
                                    std::size_t k, double zero_tol) {
  const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
  const double y0 = v[k - 1], y1 = v[k], y2 = v[k + 1];
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (!(a > 0.0)) {
    return std::nullopt;
  }
  const double b = d01 - a * (x0 + x1);
  const double vertex = -b / (2.0 * a);
  const double floor = y1 + a * (vertex - x1) * (vertex - x1) + (2.0 * a * x1 + b) * (vertex - x1);
  // quartic terms of a double zero leave a residue far below the neighbours
  if (floor > zero_tol + 1e-3 * std::min(y0, y2) || vertex < x0 || vertex > x2) {
    return std::nullopt;
  }
  return vertex;
}

}  // namespace

FragmentReport detect_fragments(const DensityProfile& profile, double zero_tol,
                                std::optional<double> weight) {
  const auto& x = profile.grid.points();
  const auto& v = profile.values;
  FragmentReport rep;
  rep.zero_tol = zero_tol;
  std::vector<Segment> segments;
  for (std::size_t i = 0; i < x.size();) {
    if (v[i] <= zero_tol) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < x.size() && v[j + 1] > zero_tol) {
      ++j;
    }
    // Bounding zero samples close the quadrature; interior touching zeros
    // split the run.
    Segment seg;
    if (i > 0) {
      seg.x.push_back(x[i - 1]);
      seg.v.push_back(v[i - 1]);
    }
    for (std::size_t k = i; k <= j; ++k) {
      const bool interior = k > i && k < j;
      std::optional<double> zero;
      if (interior && v[k] <= v[k - 1] && v[k] < v[k + 1]) {
        zero = touching_zero(x, v, k, zero_tol);
      }
      if (!zero) {
        seg.x.push_back(x[k]);
        seg.v.push_back(v[k]);
        continue;
      }
      if (x[k] < *zero) {
        seg.x.push_back(x[k]);
        seg.v.push_back(v[k]);
      }
      seg.x.push_back(*zero);
      seg.v.push_back(0.0);
      segments.push_back(std::move(seg));
      seg = Segment{{*zero}, {0.0}};
      if (x[k] > *zero) {
        seg.x.push_back(x[k]);
        seg.v.push_back(v[k]);
      }
    }
    if (j + 1 < x.size()) {
      seg.x.push_back(x[j + 1]);
      seg.v.push_back(v[j + 1]);
    }
    segments.push_back(std::move(seg));
    i = j + 1;
  }
  rep.weight =
      weight.value_or(segments.empty() ? 0.0 : 1.0 / static_cast<double>(segments.size()));
  const double h = max_spacing(x);
  for (const auto& seg : segments) {
    Fragment f;
    f.lo = seg.x.front();
    f.hi = seg.x.back();
    f.mass = trapezoid_all(seg.x, seg.v);
    std::vector<double> xv(seg.x.size());
    for (std::size_t k = 0; k < seg.x.size(); ++k) {
      xv[k] = seg.x[k] * seg.v[k];
    }
    f.centroid = f.mass > 0.0 ? trapezoid_all(seg.x, xv) / f.mass : 0.5 * (f.lo + f.hi);

    auto distance2 = [&](double shift) {
      std::vector<double> diff(seg.x.size());
      for (std::size_t k = 0; k < seg.x.size(); ++k) {
        const double d = seg.v[k] - copy_value(rep.weight, shift, seg.x[k]);
        diff[k] = d * d;
      }
      return trapezoid_all(seg.x, diff);
    };
    const double guess = f.centroid - 0.5;
    const auto best = boost::math::tools::brent_find_minima(
        distance2, guess - std::max(0.05, 2.0 * h), guess + std::max(0.05, 2.0 * h), 50);
    // Brent pins a quadratic minimum only to sqrt(eps); the copy is
    // symmetric, so the centroid gives a sharper candidate.
    const double at_guess = distance2(guess);
    f.shift = at_guess <= best.second ? guess : best.first;
    f.shape_distance = std::sqrt(std::max(std::min(at_guess, best.second), 0.0));
    rep.fragments.push_back(f);
  }
  return rep;
}

FragmentReport detect_fragments(const DensityProfile& profile) {
  return detect_fragments(profile, default_zero_tolerance(profile));
}

FragmentReport conjecture_scan(const WellModel& model, std::int64_t m, std::int64_t p,
                               const ScanOptions& options) {
  if (m < 1 || p < 1 || p > m) {
    throw AnalysisError("conjecture scan needs 1 <= p <= M");
  }
  const auto set = build_spectral_set(model, options.epsilon);
  const auto grid = SpatialGrid::cusp_aligned(model, options.min_points, 2 * m);
  const auto prof = density(evaluate_wavefunction(set, grid, reduce_time(p, m)));
  return detect_fragments(prof, options.zero_tol.value_or(default_zero_tolerance(prof)));
}

ThresholdEstimate estimate_threshold(std::int64_t m, const std::vector<double>& lambdas,
                                     const ScanOptions& options) {
  ThresholdEstimate est;
  std::vector<bool> complete;
  for (const double l : lambdas) {
    const auto rep = conjecture_scan(make_model(l), m, 1, options);
    est.counts.emplace_back(l, rep.count());
    complete.push_back(rep.count() >= 2 && rep.equal_masses());
  }
  for (std::size_t i = complete.size(); i-- > 0;) {
    if (!complete[i]) {
      break;
    }
    est.lambda_c = lambdas[i];
  }
  return est;
}

// ---- expectations

ExpectationTrace expectations(const SpectralSet& set, const std::vector<TimeSpec>& tau,
                              const ExpectationOptions& options) {
  const WellModel model{set.lambda, 1.0};
  const auto grid = SpatialGrid::cusp_aligned(model, options.min_points, 8);
  const auto& x = grid.points();
  const std::size_t n = tau.size();
  ExpectationTrace tr;
  tr.tau.resize(n);
  tr.mean_xi.resize(n);
  tr.mean_p.resize(n);
  tr.delta_xi.resize(n);
  tr.delta_p.resize(n);
  tr.product.resize(n);
  // <p^2> in units (pi hbar / a)^2 equals <H> / E_1 and does not depend on time.
  const double p2 = mean_energy(set);

  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> w1(x.size());
    std::vector<double> w2(x.size());
    for (std::size_t k = begin; k < end; ++k) {
      const auto both = evaluate_with_current(set, grid, tau[k], options.smoothing);
      const auto rho = density(both.field);
      const auto& j = both.current;
      for (std::size_t i = 0; i < x.size(); ++i) {
        w1[i] = x[i] * rho.values[i];
        w2[i] = x[i] * x[i] * rho.values[i];
      }
      const double norm = trapezoid(grid, rho.values);
      const double m1 = trapezoid(grid, w1) / norm;
      const double m2 = trapezoid(grid, w2) / norm;
      const double mp = trapezoid(grid, j.values);
      tr.tau[k] = time_value(tau[k]);
      tr.mean_xi[k] = m1;
      tr.mean_p[k] = mp;
      tr.delta_xi[k] = std::sqrt(std::max(m2 - m1 * m1, 0.0));
      tr.delta_p[k] = std::sqrt(std::max(p2 - mp * mp, 0.0));
      tr.product[k] = kPi * tr.delta_xi[k] * tr.delta_p[k];
    }
  });

  const double centre = 0.5 * set.lambda;
  const double tol = options.rest_tolerance;
  std::size_t i = 0;
  while (i < n) {
    if (std::abs(tr.mean_xi[i] - centre) > tol || std::abs(tr.mean_p[i]) > tol) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && std::abs(tr.mean_xi[j + 1] - centre) <= tol &&
           std::abs(tr.mean_p[j + 1]) <= tol) {
      ++j;
    }
    if (j >= i + 2) {
      tr.rest_epochs.emplace_back(tr.tau[i], tr.tau[j]);
    }
    i = j + 1;
  }
  return tr;
}

Moments moments_double_sum(double lambda, std::int64_t n_max, const TimeSpec& tau) {
  if (n_max < 1 || n_max > 200) {
    throw AnalysisError("double-sum moments support 1 <= n_max <= 200");
  }
  const auto set = build_spectral_set_truncated(WellModel{lambda, 1.0}, n_max);
  const double t = time_value(tau);
  std::vector<cplx> b(static_cast<std::size_t>(n_max) + 1);
  for (std::int64_t k = 1; k <= n_max; ++k) {
    // n^2 tau reduced exactly for rational times
    double frac = 0.0;
    if (const auto* r = std::get_if<RationalTime>(&tau)) {
      frac = static_cast<double>((k * k % r->q()) * r->p() % r->q()) / static_cast<double>(r->q());
    } else {
      const double v = static_cast<double>(k * k) * t;
      frac = v - std::floor(v);
    }
    b[static_cast<std::size_t>(k)] = set.c(k) * std::polar(1.0, -2.0 * kPi * frac);
  }
  const double pi2 = kPi * kPi;
  Moments out;
  double norm = 0.0;
  for (std::int64_t m = 1; m <= n_max; ++m) {
    const cplx bm = std::conj(b[static_cast<std::size_t>(m)]);
    const double md = static_cast<double>(m);
    for (std::int64_t k = 1; k <= n_max; ++k) {
      const cplx w = bm * b[static_cast<std::size_t>(k)];
      const double kd = static_cast<double>(k);
      if (m == k) {
        norm += w.real();
        out.mean_xi += w.real() * lambda / 2.0;
        out.mean_xi2 += w.real() * lambda * lambda * (1.0 / 3.0 - 1.0 / (2.0 * md * md * pi2));
        continue;
      }
      const double d = md * md - kd * kd;
      const double sign = ((m + k) % 2 == 0) ? 1.0 : -1.0;
      out.mean_xi2 += (w * (2.0 * lambda * lambda * sign / pi2 * 4.0 * md * kd / (d * d))).real();
      if ((m + k) % 2 == 1) {
        out.mean_xi += (w * (-8.0 * lambda * md * kd / (pi2 * d * d))).real();
        out.mean_p += (w * cplx(0.0, -4.0 * md * kd / (kPi * lambda * d))).real();
      }
    }
  }
  out.mean_xi /= norm;
  out.mean_xi2 /= norm;
  out.mean_p /= norm;
  return out;
}

// ---- comparison

WaveField sample_closed_form(const PiecewiseTrig& f, const SpatialGrid& grid, const TimeSpec& tau) {
  return WaveField{grid, f.sample(grid.points()), tau, 0.0, f.lambda(), 0};
}

DensityProfile sample_closed_form(const PiecewiseDensity& f, const SpatialGrid& grid,
                                  const TimeSpec& tau) {
  return DensityProfile{grid, f.sample(grid.points()), tau, f.lambda(), 0.0};
}

namespace {

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b) {
  if (!(a == b)) {
    throw AnalysisError("compare: profiles live on different grids");
  }
}

template <typename V>
Comparison deviation(const SpatialGrid& grid, const std::vector<V>& a, const std::vector<V>& b) {
  Comparison c;
  std::vector<double> sq(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    c.sup = std::max(c.sup, d);
    sq[i] = d * d;
  }
  c.l2 = std::sqrt(trapezoid(grid, sq));
  return c;
}

}  // namespace

Comparison compare(const WaveField& series, const WaveField& closed) {
  require_same_grid(series.grid, closed.grid);
  Comparison c = deviation(series.grid, series.values, closed.values);
  c.bound = series.error_bound + closed.error_bound;
  c.pass = c.sup <= c.bound;
  return c;
}

Comparison compare(const DensityProfile& series, const DensityProfile& closed) {
  require_same_grid(series.grid, closed.grid);
  Comparison c = deviation(series.grid, series.values, closed.values);
  // | |u + e|^2 - |u|^2 | <= 2 |u| eb + eb^2
  double peak = 0.0;
  for (const double v : closed.values) {
    peak = std::max(peak, v);
  }
  const double eb = series.error_bound + closed.error_bound;
  c.bound = eb * (2.0 * std::sqrt(peak) + eb);
  c.pass = c.sup <= c.bound;
  return c;
}

}  // namespace well
