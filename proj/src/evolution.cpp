#include "well_echo/evolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "well_echo/parallel.hpp"

namespace well {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::int64_t kPhaseTableLimit = std::int64_t{1} << 22;
constexpr std::int64_t kRealTimeMaxTerms = 90'000'000;  // n^2 exact in a double
constexpr std::int64_t kBlock = 4096;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// e^{-2 pi i k / q} for 0 <= k < q, symmetric so both halves are equally accurate.
cplx root_of_unity(std::int64_t k, std::int64_t q) {
  const std::int64_t kk = (2 * k > q) ? k - q : k;
  const double angle = -kTwoPi * static_cast<double>(kk) / static_cast<double>(q);
  return {std::cos(angle), std::sin(angle)};
}

__extension__ typedef unsigned __int128 u128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

// Time phases e^{-2 pi i n^2 tau} for a run of consecutive modes.
class PhaseSource {
 public:
  explicit PhaseSource(const TimeSpec& tau) {
    if (const auto* r = std::get_if<RationalTime>(&tau)) {
      rational_ = true;
      p_ = r->p();
      q_ = r->q();
      if (q_ <= kPhaseTableLimit) {
        table_.resize(static_cast<std::size_t>(q_));
        for (std::int64_t k = 0; k < q_; ++k) {
          table_[static_cast<std::size_t>(k)] = root_of_unity(k, q_);
        }
      }
    } else {
      real_ = std::get<double>(tau);
    }
  }

  bool rational() const { return rational_; }

  // Fills out[i] with the phase of mode first + i.
  void fill(std::int64_t first, std::size_t count, cplx* out) const {
    if (rational_) {
      // index(n) = p n^2 mod q, stepped with exact modular increments:
      // index(n+1) = index(n) + p (2n + 1), and that step grows by 2p.
      const auto q = static_cast<std::uint64_t>(q_);
      const auto p = static_cast<std::uint64_t>(p_);
      const std::uint64_t r = static_cast<std::uint64_t>(first) % q;
      std::uint64_t idx = mulmod(mulmod(r, r, q), p, q);
      std::uint64_t step = mulmod(p, (2 * r + 1) % q, q);
      const std::uint64_t step2 = mulmod(2 % q, p, q);
      for (std::size_t i = 0; i < count; ++i) {
        out[i] = table_.empty() ? root_of_unity(static_cast<std::int64_t>(idx), q_)
                                : table_[static_cast<std::size_t>(idx)];
        idx += step;
        if (idx >= q) {
          idx -= q;
        }
        step += step2;
        if (step >= q) {
          step -= q;
        }
      }
      return;
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto n = first + static_cast<std::int64_t>(i);
      // frac(n^2 tau) from an exact two-product so large n keep their phase.
      const double n2 = static_cast<double>(n) * static_cast<double>(n);
      const double hi = n2 * real_;
      const double lo = std::fma(n2, real_, -hi);
      double f = (hi - std::floor(hi)) + lo;
      f -= std::floor(f);
      const double angle = -kTwoPi * f;
      out[i] = {std::cos(angle), std::sin(angle)};
    }
  }

 private:
  bool rational_ = false;
  std::int64_t p_ = 0;
  std::int64_t q_ = 1;
  double real_ = 0.0;
  std::vector<cplx> table_;
};

double sigma_factor(std::int64_t n, std::int64_t n_max, Smoothing smoothing) {
  if (smoothing == Smoothing::none) {
    return 1.0;
  }
  const double x = kPi * static_cast<double>(n) / static_cast<double>(n_max);
  return std::sin(x) / x;
}

struct Request {
  bool value = true;
  bool derivative = false;
  Smoothing smoothing = Smoothing::none;
};

struct Samples {
  std::vector<cplx> value;
  std::vector<cplx> derivative;
};

void check_inputs(const SpectralSet& set, const SpatialGrid& grid, const TimeSpec& tau) {
  if (grid.lambda() != set.lambda) {
    throw ModelError("grid and spectral set disagree on lambda");
  }
  for (const double x : grid.points()) {
    if (!(x >= 0.0 && x <= set.lambda)) {
      throw ModelError("grid point outside [0, lambda]");
    }
  }
  if (std::holds_alternative<double>(tau)) {
    if (set.n_max > kRealTimeMaxTerms) {
      throw ModelError("real-time evaluation supports n_max < 9e7; use a rational time");
    }
    const double t = std::get<double>(tau);
    if (!std::isfinite(t)) {
      throw ModelError("time must be finite");
    }
  }
}

// Lattice + rational time: bucket c_n phase_n by n mod 2M, then one FFT.
Samples synthesize_lattice(const SpectralSet& set, const SpatialGrid& grid, const TimeSpec& tau,
                           const Request& req) {
  const auto& lat = *grid.lattice_info();
  const std::int64_t period = 2 * lat.divisions;
  const auto P = static_cast<std::size_t>(period);
  const PhaseSource phases(tau);

  std::vector<cplx> fold_v(req.value ? P : 0);
  std::vector<cplx> fold_d(req.derivative ? P : 0);
  std::vector<cplx> ph(static_cast<std::size_t>(kBlock));
  std::int64_t s = 1 % period;
  for (std::int64_t first = 1; first <= set.n_max; first += kBlock) {
    const auto count = static_cast<std::size_t>(std::min(kBlock, set.n_max - first + 1));
    phases.fill(first, count, ph.data());
    for (std::size_t i = 0; i < count; ++i) {
      const std::int64_t n = first + static_cast<std::int64_t>(i);
      const cplx a = set.c(n) * ph[i];
      if (req.value) {
        fold_v[static_cast<std::size_t>(s)] += a;
      }
      if (req.derivative) {
        fold_d[static_cast<std::size_t>(s)] +=
            a * (static_cast<double>(n) * sigma_factor(n, set.n_max, req.smoothing));
      }
      if (++s == period) {
        s = 0;
      }
    }
  }

  auto transform = [P](std::vector<cplx>& data) {
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      plan = fftw_plan_dft_1d(static_cast<int>(P), ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  };

  const double norm = std::sqrt(2.0 / set.lambda);
  Samples out;
  const std::size_t n_pts = grid.size();
  if (req.value) {
    transform(fold_v);
    out.value.resize(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) {
      const auto j = static_cast<std::size_t>(lat.indices[i]);
      const cplx fp = fold_v[j];
      const cplx fm = fold_v[(P - j) % P];
      // sum_s C_s sin(2 pi s j / P) = (F_j - F_{-j}) / 2i
      out.value[i] = norm * (fp - fm) / cplx(0.0, 2.0);
    }
  }
  if (req.derivative) {
    transform(fold_d);
    out.derivative.resize(n_pts);
    const double dnorm = norm * kPi / set.lambda;
    for (std::size_t i = 0; i < n_pts; ++i) {
      const auto j = static_cast<std::size_t>(lat.indices[i]);
      out.derivative[i] = dnorm * 0.5 * (fold_d[j] + fold_d[(P - j) % P]);
    }
  }
  return out;
}

// Arbitrary points: per-point sums, blocks of modes share one phase fill.
Samples synthesize_direct(const SpectralSet& set, const SpatialGrid& grid, const TimeSpec& tau,
                          const Request& req) {
  const PhaseSource phases(tau);
  const std::size_t n_pts = grid.size();
  Samples out;
  if (req.value) {
    out.value.assign(n_pts, cplx{});
  }
  if (req.derivative) {
    out.derivative.assign(n_pts, cplx{});
  }
  const double norm = std::sqrt(2.0 / set.lambda);
  const double dnorm = norm * kPi / set.lambda;

  parallel_for(n_pts, [&](std::size_t begin, std::size_t end) {
    std::vector<cplx> ph(static_cast<std::size_t>(kBlock));
    std::vector<cplx> av(static_cast<std::size_t>(kBlock));
    std::vector<cplx> ad(static_cast<std::size_t>(kBlock));
    std::vector<cplx> acc_v(end - begin);
    std::vector<cplx> acc_d(end - begin);
    for (std::int64_t first = 1; first <= set.n_max; first += kBlock) {
      const auto count = static_cast<std::size_t>(std::min(kBlock, set.n_max - first + 1));
      phases.fill(first, count, ph.data());
      for (std::size_t i = 0; i < count; ++i) {
        const std::int64_t n = first + static_cast<std::int64_t>(i);
        av[i] = set.c(n) * ph[i];
        ad[i] = av[i] * (static_cast<double>(n) * sigma_factor(n, set.n_max, req.smoothing));
      }
      for (std::size_t k = begin; k < end; ++k) {
        const double theta = kPi * grid.points()[k] / set.lambda;
        const double start = std::fmod(static_cast<double>(first) * theta, kTwoPi);
        cplx z{std::cos(start), std::sin(start)};
        const cplx w{std::cos(theta), std::sin(theta)};
        cplx sv{};
        cplx sd{};
        for (std::size_t i = 0; i < count; ++i) {
          sv += av[i] * z.imag();
          sd += ad[i] * z.real();
          z *= w;
        }
        acc_v[k - begin] += sv;
        acc_d[k - begin] += sd;
      }
    }
    for (std::size_t k = begin; k < end; ++k) {
      if (req.value) {
        out.value[k] = norm * acc_v[k - begin];
      }
      if (req.derivative) {
        out.derivative[k] = dnorm * acc_d[k - begin];
      }
    }
  });
  return out;
}

Samples synthesize(const SpectralSet& set, const SpatialGrid& grid, const TimeSpec& tau,
                   const Request& req) {
  check_inputs(set, grid, tau);
  if (grid.empty()) {
    return {};
  }
  if (grid.lattice_info() && std::holds_alternative<RationalTime>(tau)) {
    return synthesize_lattice(set, grid, tau, req);
  }
  return synthesize_direct(set, grid, tau, req);
}

}  // namespace

WaveField evaluate_wavefunction(const SpectralSet& set, const SpatialGrid& grid,
                                const TimeSpec& tau) {
  auto samples = synthesize(set, grid, tau, Request{true, false, Smoothing::none});
  return WaveField{grid, std::move(samples.value), tau, set.tail_bound, set.lambda, set.n_max};
}

WaveField evaluate_derivative(const SpectralSet& set, const SpatialGrid& grid, const TimeSpec& tau,
                              Smoothing smoothing) {
  auto samples = synthesize(set, grid, tau, Request{false, true, smoothing});
  // No certified bound for the derivative series.
  return WaveField{grid,       std::move(samples.derivative),
                   tau,        std::numeric_limits<double>::infinity(),
                   set.lambda, set.n_max};
}

cplx evaluate_point(const SpectralSet& set, double xi, const TimeSpec& tau) {
  const auto grid = SpatialGrid::from_points(WellModel{set.lambda, 1.0}, {xi});
  return evaluate_wavefunction(set, grid, tau).values.front();
}

DensityProfile density(const WaveField& field) {
  DensityProfile d{field.grid, {}, field.time, field.lambda, field.error_bound};
  d.values.reserve(field.values.size());
  for (const auto& v : field.values) {
    d.values.push_back(std::norm(v));
  }
  return d;
}

FieldWithCurrent evaluate_with_current(const SpectralSet& set, const SpatialGrid& grid,
                                       const TimeSpec& tau, Smoothing smoothing) {
  auto samples = synthesize(set, grid, tau, Request{true, true, smoothing});
  CurrentProfile j{grid, {}, tau, set.lambda, smoothing, true};
  j.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    j.values[i] = std::imag(std::conj(samples.value[i]) * samples.derivative[i]) / kPi;
  }
  return {WaveField{grid, std::move(samples.value), tau, set.tail_bound, set.lambda, set.n_max},
          std::move(j)};
}

CurrentProfile current(const SpectralSet& set, const SpatialGrid& grid, const TimeSpec& tau,
                       Smoothing smoothing) {
  return evaluate_with_current(set, grid, tau, smoothing).current;
}

bool SymmetryReport::ok() const {
  bool good = half_period_shift <= bound && conjugation <= bound && density_reflection <= bound &&
              current_reflection <= bound;
  if (quarter_mirror) {
    good = good && *quarter_mirror <= bound;
  }
  if (density_mirror) {
    good = good && *density_mirror <= bound;
  }
  return good;
}

SymmetryReport check_symmetries(const SpectralSet& set, const SpatialGrid& grid,
                                const TimeSpec& tau) {
  const SpatialGrid mirror = grid.mirrored();
  const TimeSpec reflected = reflect(tau);
  const TimeSpec shifted = shift_half_period(tau);

  const auto base = synthesize(set, grid, tau, Request{true, true, Smoothing::none});
  const auto back = synthesize(set, grid, reflected, Request{true, true, Smoothing::none});
  const auto later = synthesize(set, grid, shifted, Request{true, false, Smoothing::none});
  const auto mirrored = synthesize(set, mirror, tau, Request{true, false, Smoothing::none});

  SymmetryReport rep;
  rep.bound = 2.0 * set.tail_bound;
  const std::size_t n = grid.size();
  bool quarter = false;
  if (const auto* r = std::get_if<RationalTime>(&tau)) {
    quarter = r->q() == 4;
  }
  double qm = 0.0;
  double dm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx psi = base.value[i];
    const cplx psi_mirror = mirrored.value[n - 1 - i];  // Psi(lambda - xi_i, tau)
    rep.half_period_shift = std::max(rep.half_period_shift, std::abs(later.value[i] + psi_mirror));
    rep.conjugation = std::max(rep.conjugation, std::abs(back.value[i] - std::conj(psi)));
    rep.density_reflection =
        std::max(rep.density_reflection, std::abs(std::norm(psi) - std::norm(back.value[i])));
    const double j_now = std::imag(std::conj(psi) * base.derivative[i]) / kPi;
    const double j_back = std::imag(std::conj(back.value[i]) * back.derivative[i]) / kPi;
    rep.current_reflection = std::max(rep.current_reflection, std::abs(j_now + j_back));
    if (quarter) {
      qm = std::max(qm, std::abs(psi + std::conj(psi_mirror)));
      dm = std::max(dm, std::abs(std::norm(psi) - std::norm(psi_mirror)));
    }
  }
  if (quarter) {
    rep.quarter_mirror = qm;
    rep.density_mirror = dm;
  }
  return rep;
}

double trapezoid(const SpatialGrid& grid, const std::vector<double>& values) {
  const auto& x = grid.points();
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    sum += 0.5 * (x[i] - x[i - 1]) * (values[i] + values[i - 1]);
  }
  return sum;
}

}  // namespace well
