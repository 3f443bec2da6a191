#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "well_echo/model.hpp"
#include "well_echo/spectral.hpp"

namespace well {

using cplx = std::complex<double>;

/// Samples of sqrt(a) Psi(xi, tau) from the truncated Gauss series.
struct WaveField {
  SpatialGrid grid;
  std::vector<cplx> values;
  TimeSpec time;
  double error_bound = 0.0;  // sup-norm, from SpectralSet::tail_bound
  double lambda = 0.0;
  std::int64_t n_max = 0;
};

/// a * rho samples.
struct DensityProfile {
  SpatialGrid grid;
  std::vector<double> values;
  TimeSpec time;
  double lambda = 0.0;
  double error_bound = 0.0;  // bound on the underlying sqrt(a) Psi; 0 for exact profiles
};

enum class Smoothing { none, sigma };

/// j_hat = j m a^2 / (pi hbar) samples. The truncated derivative series
/// rings near jumps, so comparisons should use interval medians.
struct CurrentProfile {
  SpatialGrid grid;
  std::vector<double> values;
  TimeSpec time;
  double lambda = 0.0;
  Smoothing smoothing = Smoothing::none;
  bool piecewise_constant_expected = true;
};

/// sqrt(a) Psi = sqrt(2/lambda) sum_n c_n e^{-2 pi i n^2 tau} sin(n pi xi / lambda).
///
/// Rational times take the phase from the q-th roots of unity indexed by
/// (n^2 p) mod q, so there is no phase drift at any n. On lattice grids the
/// series is folded by n mod 2M and synthesized with one FFT; other grids
/// are summed point by point. Real times use a compensated n^2 tau product
/// (lower accuracy path; needs n_max < 9e7).
WaveField evaluate_wavefunction(const SpectralSet& set, const SpatialGrid& grid,
                                const TimeSpec& tau);

/// sqrt(a) a d/dx Psi from the term-wise differentiated series, with
/// optional Lanczos sigma factors sinc(n / n_max).
WaveField evaluate_derivative(const SpectralSet& set, const SpatialGrid& grid, const TimeSpec& tau,
                              Smoothing smoothing = Smoothing::none);

cplx evaluate_point(const SpectralSet& set, double xi, const TimeSpec& tau);

DensityProfile density(const WaveField& field);

/// j_hat = Im(conj(u) u') / pi with u = sqrt(a) Psi, u' its xi-derivative.
CurrentProfile current(const SpectralSet& set, const SpatialGrid& grid, const TimeSpec& tau,
                       Smoothing smoothing = Smoothing::none);

struct FieldWithCurrent {
  WaveField field;
  CurrentProfile current;
};

/// Psi and j from one pass over the series.
FieldWithCurrent evaluate_with_current(const SpectralSet& set, const SpatialGrid& grid,
                                       const TimeSpec& tau, Smoothing smoothing = Smoothing::none);

struct SymmetryReport {
  double half_period_shift = 0.0;   // |Psi(xi, tau+1/2) + Psi(lambda-xi, tau)|
  double conjugation = 0.0;         // |Psi(xi, 1-tau) - conj Psi(xi, tau)|
  double density_reflection = 0.0;  // |rho(xi, tau) - rho(xi, 1-tau)|
  double current_reflection = 0.0;  // |j(xi, 1-tau) + j(xi, tau)|
  std::optional<double> quarter_mirror;  // |Psi(xi,1/4) + conj Psi(lambda-xi,1/4)|, tau = 1/4, 3/4
  std::optional<double> density_mirror;  // |rho(xi) - rho(lambda-xi)| at tau = 1/4, 3/4
  double bound = 0.0;                    // 2 * error_bound

  bool ok() const;
};

SymmetryReport check_symmetries(const SpectralSet& set, const SpatialGrid& grid,
                                const TimeSpec& tau);

/// Trapezoid integral of samples over the grid.
double trapezoid(const SpatialGrid& grid, const std::vector<double>& values);

}  // namespace well
