#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "well_echo/closedform.hpp"
#include "well_echo/evolution.hpp"

namespace well {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- plateaux

struct Plateau {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;  // mean of the samples
  double max_deviation = 0.0;
};

struct PlateauReport {
  std::vector<Plateau> plateaux;
  double tolerance = 0.0;
  double min_width = 0.0;
};

/// 10 * error_bound for series profiles, 1e-10 for exact ones.
double default_plateau_tolerance(const DensityProfile& profile);

/// Maximal runs of samples with max - min <= tol spanning at least
/// min_width. Needs spacing <= min_width / 20 (AnalysisError otherwise).
PlateauReport detect_plateaux(const DensityProfile& profile, double tol, double min_width = 0.05);
PlateauReport detect_plateaux(const DensityProfile& profile);

// ---- cusps

struct Cusp {
  double position = 0.0;
  double uncertainty = 0.0;  // half a grid step
  double strength = 0.0;     // peak second difference / threshold
};

struct CuspOptions {
  double kappa = 20.0;
};

struct CuspReport {
  std::vector<Cusp> cusps;             // from the density
  std::vector<Cusp> derivative_jumps;  // from Psi itself (only for WaveField input)
  double step = 0.0;

  std::vector<double> positions() const;
  std::vector<double> jump_positions() const;
};

/// Centered second differences of the density compared with kappa times
/// their median (taken over samples above the noise floor). Needs a
/// uniform grid.
CuspReport detect_cusps(const DensityProfile& profile, const CuspOptions& options = {});
/// Same on |Psi|^2, plus the same test on Psi: a kink of Psi does not show
/// in the density when Re(conj Psi dPsi) is continuous.
CuspReport detect_cusps(const WaveField& field, const CuspOptions& options = {});

// ---- fragments

struct Fragment {
  double lo = 0.0;
  double hi = 0.0;
  double mass = 0.0;
  double centroid = 0.0;
  double shape_distance = 0.0;  // L2, after the best translation
  double shift = 0.0;           // left edge of the matched copy
};

struct FragmentReport {
  std::vector<Fragment> fragments;
  double zero_tol = 0.0;
  double weight = 0.0;  // scale applied to the initial density in the shape test

  std::size_t count() const { return fragments.size(); }
  double total_mass() const;
  /// All masses within `tol` of each other.
  bool equal_masses(double tol = 1e-3) const;
};

/// max(1e-10, 100 error_bound^2).
double default_zero_tolerance(const DensityProfile& profile);

/// Connected components of {rho > zero_tol}. Shape distance is measured
/// against weight * 2 sin^2(pi (xi - s)) on [s, s+1]; weight defaults to
/// 1 / (number of components).
FragmentReport detect_fragments(const DensityProfile& profile, double zero_tol,
                                std::optional<double> weight = std::nullopt);
FragmentReport detect_fragments(const DensityProfile& profile);

struct ScanOptions {
  double epsilon = 1e-5;
  std::int64_t min_points = 4096;
  std::optional<double> zero_tol;
};

/// Series density at tau = p / M, fragment report.
FragmentReport conjecture_scan(const WellModel& model, std::int64_t m, std::int64_t p,
                               const ScanOptions& options = {});

/// Smallest lambda on the sweep from which every later sample is
/// completely fragmented at tau = 1/M (equal masses, >= 2 components).
struct ThresholdEstimate {
  std::optional<double> lambda_c;
  std::vector<std::pair<double, std::size_t>> counts;  // (lambda, components)
};

ThresholdEstimate estimate_threshold(std::int64_t m, const std::vector<double>& lambdas,
                                     const ScanOptions& options = {});

// ---- expectations

struct ExpectationTrace {
  std::vector<double> tau;
  std::vector<double> mean_xi;
  std::vector<double> mean_p;   // units pi hbar / a
  std::vector<double> delta_xi;
  std::vector<double> delta_p;
  std::vector<double> product;  // Delta x Delta p in units of hbar
  /// Spans [tau_lo, tau_hi] with <xi> = lambda/2 and <p> = 0.
  std::vector<std::pair<double, double>> rest_epochs;
};

struct ExpectationOptions {
  std::int64_t min_points = 4096;
  Smoothing smoothing = Smoothing::sigma;
  double rest_tolerance = 1e-4;
};

ExpectationTrace expectations(const SpectralSet& set, const std::vector<TimeSpec>& tau,
                              const ExpectationOptions& options = {});

struct Moments {
  double mean_xi = 0.0;
  double mean_xi2 = 0.0;
  double mean_p = 0.0;
};

/// Double sums over coefficient pairs, truncated at n_max (<= 200).
Moments moments_double_sum(double lambda, std::int64_t n_max, const TimeSpec& tau);

// ---- comparison

struct Comparison {
  double sup = 0.0;
  double l2 = 0.0;
  double bound = 0.0;
  bool pass = false;
};

WaveField sample_closed_form(const PiecewiseTrig& f, const SpatialGrid& grid, const TimeSpec& tau);
DensityProfile sample_closed_form(const PiecewiseDensity& f, const SpatialGrid& grid,
                                  const TimeSpec& tau);

/// Throws AnalysisError when the grids differ.
Comparison compare(const WaveField& series, const WaveField& closed);
Comparison compare(const DensityProfile& series, const DensityProfile& closed);

}  // namespace well
