#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Shared conventions for the suddenly-expanded infinite well.
//
// Everything is expressed in reduced units:
//   xi  = x / a          position, in [0, lambda]
//   tau = t / T          time as a fraction of the revival period T = lambda^2 T_1
//   a * rho              dimensionless density
//   j_hat = j m a^2 / (pi hbar)   dimensionless current
//   energies in units of E_1 (ground level of the original well)
// so the only free parameter is the expansion factor lambda and the time
// phase of eigenmode n is exp(-2 pi i n^2 tau).

namespace well {

/// Raised when a model or time precondition is violated.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct WellModel {
  double lambda = 2.0;
  double a = 1.0;  // always 1 in reduced units
};

/// Validates lambda and returns the reduced-unit model.
/// Rejects lambda <= 1: a sudden compression cannot carve out a zero of a
/// wavefunction that is finite on (lambda a, a).
WellModel make_model(double lambda);

/// Exact time p/q of the period, reduced modulo the period.
class RationalTime {
 public:
  RationalTime() = default;

  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }
  double value() const { return static_cast<double>(p_) / static_cast<double>(q_); }

  friend bool operator==(const RationalTime&, const RationalTime&) = default;

 private:
  friend RationalTime reduce_time(std::int64_t p, std::int64_t q);
  RationalTime(std::int64_t p, std::int64_t q) : p_(p), q_(q) {}

  std::int64_t p_ = 0;
  std::int64_t q_ = 1;
};

/// (p mod q, q) with gcd removed. Throws ModelError for q <= 0 or p < 0.
RationalTime reduce_time(std::int64_t p, std::int64_t q);

RationalTime operator+(const RationalTime& lhs, const RationalTime& rhs);
/// 1 - t, reduced (the time-reversal partner inside one period).
RationalTime reflect(const RationalTime& t);

/// Rational or real (irrational) time.
using TimeSpec = std::variant<RationalTime, double>;

double time_value(const TimeSpec& t);
std::string time_label(const TimeSpec& t);
TimeSpec shift_half_period(const TimeSpec& t);
TimeSpec reflect(const TimeSpec& t);

/// Parses "p/q", "p" or a decimal; decimals become real times.
TimeSpec parse_time(const std::string& text);

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

/// Best rational with denominator <= max_den matching x to 1e-12 (relative).
std::optional<Fraction> rational_approx(double x, std::int64_t max_den = 4096);

/// Explicit, strictly increasing list of sample points in [0, lambda].
///
/// Lattice grids (xi_j = lambda * j / M) additionally remember M and the
/// indices, which lets the evaluator fold the Gauss series by residues and
/// synthesize the whole lattice with one FFT.
class SpatialGrid {
 public:
  struct Lattice {
    std::int64_t divisions = 0;         // M
    std::vector<std::int64_t> indices;  // j for each point
  };

  SpatialGrid() = default;

  /// Arbitrary points; throws ModelError if not strictly increasing or
  /// outside [0, lambda].
  static SpatialGrid from_points(const WellModel& model, std::vector<double> points);

  /// All lattice points j = 0..M.
  static SpatialGrid lattice(const WellModel& model, std::int64_t divisions);

  /// Lattice with at least min_points + 1 points whose divisions are a
  /// multiple of `multiple_of`; when lambda = r/s is rational the
  /// divisions are also a multiple of 2r so the T/8 cusp abscissae
  /// {1, |lambda/2-1|, lambda/2, 3lambda/2-1 or 1+lambda/2, lambda-1}
  /// land exactly on grid points.
  static SpatialGrid cusp_aligned(const WellModel& model, std::int64_t min_points,
                                  std::int64_t multiple_of = 1);

  /// The given sorted points as a subset of the smallest lattice (M up to
  /// max_divisions) that contains all of them, if there is one.
  static std::optional<SpatialGrid> on_lattice(const WellModel& model,
                                               const std::vector<double>& points,
                                               std::int64_t max_divisions = 4096);

  /// Sub-grid of the points within [lo, hi]; keeps lattice metadata.
  SpatialGrid window(double lo, double hi) const;

  /// Points lambda - xi in increasing order (lattice preserved).
  SpatialGrid mirrored() const;

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  bool includes_endpoints() const;
  double lambda() const { return lambda_; }
  const std::optional<Lattice>& lattice_info() const { return lattice_; }

  /// Uniform spacing, if the points are equally spaced (relative 1e-9).
  std::optional<double> uniform_step() const;

  std::optional<std::size_t> index_of(double xi, double tol = 1e-12) const;

  friend bool operator==(const SpatialGrid& lhs, const SpatialGrid& rhs) {
    return lhs.lambda_ == rhs.lambda_ && lhs.points_ == rhs.points_;
  }

 private:
  double lambda_ = 0.0;
  std::vector<double> points_;
  std::optional<Lattice> lattice_;
};

}  // namespace well
