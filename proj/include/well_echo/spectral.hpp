#pragma once

#include <cstdint>
#include <vector>

#include "well_echo/model.hpp"

namespace well {

/// Radius around an integer lambda inside which c_n switches to its limit.
inline constexpr double kIntegerSwitch = 1e-9;

/// sin(pi n / lambda), accurate also when n / lambda is close to an integer.
double sin_pi_ratio(std::int64_t n, double lambda);

/// Overlap c_n = <psi_{lambda,n} | psi_1>
///   = (2 lambda^{3/2} / pi) sin(n pi / lambda) / (lambda^2 - n^2),
/// with c_{n0} = 1 / sqrt(n0) when |lambda - n0| < kIntegerSwitch.
double coefficient(double lambda, std::int64_t n);

/// Certified sup-norm bound on sqrt(a) |Psi_tail| after keeping n <= n_max:
///   (sqrt(2) / pi) ln((n_max + lambda) / (n_max - lambda)).
double tail_bound(double lambda, std::int64_t n_max);

struct SpectralSet {
  double lambda = 0.0;
  std::int64_t n_max = 0;
  std::vector<double> coefficients;  // c_1 .. c_{n_max}
  double tail_bound = 0.0;

  double c(std::int64_t n) const { return coefficients[static_cast<std::size_t>(n - 1)]; }
};

/// Smallest n_max > lambda whose tail bound is <= epsilon.
SpectralSet build_spectral_set(const WellModel& model, double epsilon);

/// Fixed truncation; tail_bound still certified for that n_max.
SpectralSet build_spectral_set_truncated(const WellModel& model, std::int64_t n_max);

/// E_{lambda,n} / E_1 = n^2 / lambda^2.
double eigenenergy(const WellModel& model, std::int64_t n);

/// P_n = c_n^2 (time independent).
double probability(double lambda, std::int64_t n);

struct MeasurementDistribution {
  std::vector<double> probabilities;  // P_1 .. P_{n_max}
  double partial_sum = 0.0;

  std::int64_t argmax() const;
};

MeasurementDistribution measurement_distribution(const WellModel& model, std::int64_t n_max);

/// <H> / E_1: direct sum over the set plus an analytic estimate of n > n_max.
double mean_energy(const SpectralSet& set);

/// Partial sums S(N) = sum_{n<=N} P_n (n^2/lambda^2)^2 of <H^2>/E_1^2.
double second_moment_sum(double lambda, std::int64_t n_max);

struct SecondMomentPartial {
  std::int64_t n = 0;
  double sum = 0.0;
};

/// S(N) at N = n_max/4, n_max/2, n_max; grows linearly since <H^2> diverges.
std::vector<SecondMomentPartial> second_moment_partial(const SpectralSet& set);

/// G(lambda, phi) = sum_n e^{2 i n phi} / (lambda^2 - n^2), closed form
///   pi cos(lambda (2|phi| - pi)) / (lambda sin(pi lambda)),  |phi| <= pi/2,
/// extended evenly with period pi. Throws ModelError for integer lambda.
double g_function_closed(double lambda, double phi);

/// Symmetric partial sum over |n| <= terms, including n = 0.
double g_function_series(double lambda, double phi, std::int64_t terms);

/// d/dlambda of the closed form at fixed phi.
double g_function_closed_dlambda(double lambda, double phi);

struct SumRuleCheck {
  double norm = 0.0;
  double energy = 0.0;   // <H> / E_1
  double bracket = 0.0;  // G(lambda,0) - G(lambda,pi/lambda); vanishes with Psi(a,0)
};

/// Norm and mean energy from the G-function sum rules.
SumRuleCheck norm_and_energy_via_g(double lambda);

}  // namespace well
