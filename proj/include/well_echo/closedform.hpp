#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "well_echo/model.hpp"

// Exact snapshots at tau = 1/2, 1/4, 1/8 and the fragmented profiles.
//
// Every closed form here is a sum of terms A sin(pi (xi - s)) restricted to
// sub-intervals of [0, lambda]. The step-function products are resolved into
// an explicit partition once, at construction.

namespace well {

using cplx = std::complex<double>;

/// amplitude * sin(pi (xi - shift))
struct TrigTerm {
  cplx amplitude;
  double shift = 0.0;
};

/// A term living on [lo, hi] (clipped to [0, lambda]).
struct SupportedTerm {
  double lo = 0.0;
  double hi = 0.0;
  TrigTerm term;
};

/// Piecewise trigonometric function on [0, lambda].
///
/// Interval i is (knots[i], knots[i+1]], the first one closed at 0. On each
/// interval the function equals alpha sin(pi xi) + beta cos(pi xi).
class PiecewiseTrig {
 public:
  struct Piece {
    cplx alpha;  // coefficient of sin(pi xi)
    cplx beta;   // coefficient of cos(pi xi)
    std::vector<TrigTerm> terms;
  };

  PiecewiseTrig() = default;
  /// `scale` multiplies every term (e.g. 1/sqrt(2) for the T/8 form).
  PiecewiseTrig(double lambda, const std::vector<SupportedTerm>& terms, double scale = 1.0);

  cplx operator()(double xi) const;
  /// d/dxi inside the interval containing xi (left limit at knots).
  cplx derivative(double xi) const;
  std::vector<cplx> sample(const std::vector<double>& xi) const;

  /// max over interior knots of |left limit - right limit|.
  double max_knot_jump() const;

  double lambda() const { return lambda_; }
  double scale() const { return scale_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t piece_index(double xi) const;

 private:
  double lambda_ = 0.0;
  double scale_ = 1.0;
  std::vector<double> knots_;
  std::vector<Piece> pieces_;
};

/// s sin^2(pi xi) + c cos^2(pi xi) + m sin(pi xi) cos(pi xi) per interval.
class PiecewiseDensity {
 public:
  struct Piece {
    double s = 0.0;
    double c = 0.0;
    double m = 0.0;
  };

  PiecewiseDensity() = default;
  PiecewiseDensity(double lambda, std::vector<double> knots, std::vector<Piece> pieces);

  double operator()(double xi) const;
  std::vector<double> sample(const std::vector<double>& xi) const;
  /// Exact integral over [lo, hi].
  double integral(double lo, double hi) const;
  double integral() const { return integral(0.0, lambda_); }
  double max_knot_jump() const;

  double lambda() const { return lambda_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  double lambda_ = 0.0;
  std::vector<double> knots_;
  std::vector<Piece> pieces_;
};

/// Piecewise constant on the same (lo, hi] convention.
class PiecewiseConstant {
 public:
  PiecewiseConstant() = default;
  PiecewiseConstant(double lambda, std::vector<double> knots, std::vector<double> values);

  double operator()(double xi) const;
  std::vector<double> sample(const std::vector<double>& xi) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

 private:
  double lambda_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// |f|^2 of a piecewise trigonometric function.
PiecewiseDensity density_of(const PiecewiseTrig& f);
/// Im(conj f f') / pi; exactly Im(alpha conj beta) on each piece.
PiecewiseConstant current_of(const PiecewiseTrig& f);

/// sqrt(a) Psi(xi, 1/2) = -sqrt(2) sin(pi (lambda - xi)) on [lambda-1, lambda].
PiecewiseTrig psi_half(const WellModel& model);

/// sqrt(a) Psi(xi, 1/4)
///   = e^{-i pi/4} th(1-xi) sin(pi xi) - e^{i pi/4} th(1-lambda+xi) sin(pi (lambda-xi)).
PiecewiseTrig psi_quarter(const WellModel& model);
PiecewiseDensity density_quarter(const WellModel& model);
/// sin(pi lambda) on (lambda-1, 1), zero elsewhere.
PiecewiseConstant current_quarter(const WellModel& model);

/// sqrt(a) Psi(xi, 1/8); scale() = 1/sqrt(2), i.e. the stored terms are
/// sqrt(2a) Psi = th(lambda/2-xi) f_< + th(xi-lambda/2) f_>
///              + e^{-i pi/4} [th(1-xi) sin(pi xi) - th(1-lambda+xi) sin(pi (xi-lambda))].
PiecewiseTrig psi_eighth(const WellModel& model);
PiecewiseDensity density_eighth(const WellModel& model);
/// (1/(2 sqrt 2)) [c1 sin(pi lambda/2) + c3 sin(3 pi lambda/2)] with the
/// step products c1, c3 picked by the side of lambda/2.
PiecewiseConstant current_eighth(const WellModel& model);

struct CuspSet {
  /// {1, |lambda/2 - 1|, lambda/2, x4, lambda - 1},
  /// x4 = 3 lambda/2 - 1 for lambda < 2 and 1 + lambda/2 otherwise.
  std::array<double, 5> abscissae{};
  /// Index pairs (i < j) that coincide within 1e-12.
  std::vector<std::pair<int, int>> degenerate;

  /// Distinct values in increasing order.
  std::vector<double> distinct() const;
};

CuspSet cusp_abscissae_eighth(const WellModel& model);

struct FragmentedDensity {
  int level = 0;            // N: time tau = 1 / 2^{N+1}
  bool conjecture = false;  // N >= 3 is an extrapolated pattern
  std::vector<double> centers;
  PiecewiseDensity density;
};

/// 2^{N-1} copies of the elementary pattern 2^{-N}[rho0(xi) + rho0(L - xi)],
/// L = lambda / 2^{N-1}, with rho0 = 2 sin^2(pi xi) on [0, 1].
/// Throws ModelError when lambda <= 2^N (evaluate the series instead).
FragmentedDensity fragmented_density(const WellModel& model, int level);

}  // namespace well
