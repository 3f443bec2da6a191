#pragma once

#include <complex>
#include <optional>
#include <vector>

// Momentum amplitudes of the initial state on the half line, in units
// P = p / p0 with p0 = pi hbar / a; values are sqrt(p0) Phi, so that
// int |.|^2 dP is the norm.

namespace well {

using cplx = std::complex<double>;

enum class MomentumKind { true_initial, naive_limit };

/// (1 + e^{-i pi P}) / (pi (1 - P^2)); norm 1.
cplx momentum_true(double p);
/// (2 / (i pi)) sin(pi P) / (1 - P^2); norm 2. The naive lambda -> infinity
/// limit of the box amplitudes.
cplx momentum_naive(double p);

cplx momentum_amplitude(MomentumKind kind, double p);
/// d/dP of the amplitude.
cplx momentum_amplitude_derivative(MomentumKind kind, double p);

struct MomentumAmplitude {
  MomentumKind kind = MomentumKind::true_initial;
  std::vector<double> p;
  std::vector<cplx> values;
};

MomentumAmplitude sample_momentum(MomentumKind kind, const std::vector<double>& p);

/// int |amplitude|^2 dP: adaptive quadrature on |P| <= cutoff plus the
/// averaged analytic tail.
double momentum_norm(MomentumKind kind, double cutoff = 40.0);

/// <x> / a = (1/pi) int conj(A) i A' dP / norm. 1/2 for the true state;
/// 0 for the naive one.
double momentum_mean_position(MomentumKind kind, double cutoff = 40.0);

/// sqrt(a) Psi(xi, s) on the half line, s = t / T_1:
///   (i sqrt 2 / pi) int sin(pi k) / (k^2 - 1) e^{i pi k xi} e^{-2 pi i k^2 s} dk.
/// The k-range is [-cutoff, cutoff]; with no cutoff one is picked from
/// `tolerance`. Throws std::domain_error when the estimated tail exceeds
/// `tolerance`.
cplx halfline_wavefunction(double xi, double s, std::optional<double> cutoff = std::nullopt,
                           double tolerance = 1e-5);

/// Estimated magnitude of the discarded |k| > cutoff part (first
/// integration-by-parts term); infinite while a stationary point of the
/// phase lies beyond the cutoff.
double halfline_tail_estimate(double xi, double s, double cutoff);

}  // namespace well
