#include "well_echo/momentum.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace well {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSwitch = 1e-4;  // Taylor window around P = +-1
const cplx kI{0.0, 1.0};

// Second-order expansions around P = s + d, s = +-1.
cplx true_near(double s, double d) {
  const double pi2 = kPi * kPi;
  if (s > 0) {
    return -0.5 * (kI + d * cplx(kPi / 2.0, -0.5) + d * d * cplx(-kPi / 4.0, 0.25 - pi2 / 6.0));
  }
  return 0.5 * (kI + d * cplx(kPi / 2.0, 0.5) + d * d * cplx(kPi / 4.0, 0.25 - pi2 / 6.0));
}

cplx true_near_derivative(double s, double d) {
  const double pi2 = kPi * kPi;
  if (s > 0) {
    return -0.5 * (cplx(kPi / 2.0, -0.5) + 2.0 * d * cplx(-kPi / 4.0, 0.25 - pi2 / 6.0));
  }
  return 0.5 * (cplx(kPi / 2.0, 0.5) + 2.0 * d * cplx(kPi / 4.0, 0.25 - pi2 / 6.0));
}

cplx naive_near(double s, double d) {
  const double q = 0.25 - kPi * kPi / 6.0;
  if (s > 0) {
    return -kI * (1.0 - d / 2.0 + d * d * q);
  }
  return kI * (1.0 + d / 2.0 + d * d * q);
}

cplx naive_near_derivative(double s, double d) {
  const double q = 0.25 - kPi * kPi / 6.0;
  if (s > 0) {
    return -kI * (-0.5 + 2.0 * d * q);
  }
  return kI * (0.5 + 2.0 * d * q);
}

// sin(pi k) / (k^2 - 1) with the removable points filled in.
double halfline_weight(double k) {
  for (const double s : {1.0, -1.0}) {
    const double d = k - s;
    if (std::abs(d) < kSwitch) {
      const double q = 0.25 - kPi * kPi / 6.0;
      return s > 0 ? -kPi / 2.0 * (1.0 - d / 2.0 + d * d * q)
                   : kPi / 2.0 * (1.0 + d / 2.0 + d * d * q);
    }
  }
  return std::sin(kPi * k) / ((k - 1.0) * (k + 1.0));
}

// Both sides of the averaged tail 2/(pi^2) int_X^inf dP / (P^2 - 1)^2.
double norm_tail(double x) {
  const double integral = x / (2.0 * (x * x - 1.0)) + 0.25 * std::log((x - 1.0) / (x + 1.0));
  return 2.0 * (2.0 / (kPi * kPi)) * integral;
}

template <typename F>
double integrate_panels(F f, double cutoff) {
  double sum = 0.0;
  const auto panels = static_cast<int>(std::ceil(2.0 * cutoff));
  const double w = 2.0 * cutoff / panels;
  for (int i = 0; i < panels; ++i) {
    const double a = -cutoff + i * w;
    sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, a + w, 10, 1e-14);
  }
  return sum;
}

}  // namespace

cplx momentum_true(double p) {
  for (const double s : {1.0, -1.0}) {
    if (std::abs(p - s) < kSwitch) {
      return true_near(s, p - s);
    }
  }
  const cplx phase = std::polar(1.0, -kPi * p);
  return (1.0 + phase) / (kPi * (1.0 - p) * (1.0 + p));
}

cplx momentum_naive(double p) {
  for (const double s : {1.0, -1.0}) {
    if (std::abs(p - s) < kSwitch) {
      return naive_near(s, p - s);
    }
  }
  return 2.0 / (kI * kPi) * std::sin(kPi * p) / ((1.0 - p) * (1.0 + p));
}

cplx momentum_amplitude(MomentumKind kind, double p) {
  return kind == MomentumKind::true_initial ? momentum_true(p) : momentum_naive(p);
}

cplx momentum_amplitude_derivative(MomentumKind kind, double p) {
  for (const double s : {1.0, -1.0}) {
    if (std::abs(p - s) < kSwitch) {
      return kind == MomentumKind::true_initial ? true_near_derivative(s, p - s)
                                                : naive_near_derivative(s, p - s);
    }
  }
  const double den = (1.0 - p) * (1.0 + p);
  if (kind == MomentumKind::true_initial) {
    const cplx e = std::polar(1.0, -kPi * p);
    return (-kI * kPi * e * den + 2.0 * p * (1.0 + e)) / (kPi * den * den);
  }
  const double num = kPi * std::cos(kPi * p) * den + 2.0 * p * std::sin(kPi * p);
  return 2.0 / (kI * kPi) * num / (den * den);
}

MomentumAmplitude sample_momentum(MomentumKind kind, const std::vector<double>& p) {
  MomentumAmplitude out{kind, p, {}};
  out.values.reserve(p.size());
  for (const double x : p) {
    out.values.push_back(momentum_amplitude(kind, x));
  }
  return out;
}

double momentum_norm(MomentumKind kind, double cutoff) {
  if (!(cutoff > 2.0)) {
    throw std::domain_error("momentum norm needs cutoff > 2");
  }
  const double inner =
      integrate_panels([kind](double p) { return std::norm(momentum_amplitude(kind, p)); }, cutoff);
  return inner + norm_tail(cutoff);
}

double momentum_mean_position(MomentumKind kind, double cutoff) {
  // x = i hbar d/dp = (i a / pi) d/dP
  const double num = integrate_panels(
      [kind](double p) {
        return std::real(std::conj(momentum_amplitude(kind, p)) * kI *
                         momentum_amplitude_derivative(kind, p));
      },
      cutoff);
  return num / (kPi * momentum_norm(kind, cutoff));
}

double halfline_tail_estimate(double xi, double s, double cutoff) {
  // Phase pi k (xi +- 1) - 2 pi k^2 s; slowest rate at the cutoff.
  double rate = 0.0;
  if (s > 0.0) {
    rate = kPi * (4.0 * cutoff * s - (xi + 1.0));
  } else {
    rate = kPi * std::abs(xi - 1.0);
  }
  if (!(rate > 0.0) || !(cutoff > 1.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return 2.0 * std::numbers::sqrt2 / kPi / ((cutoff * cutoff - 1.0) * rate);
}

cplx halfline_wavefunction(double xi, double s, std::optional<double> cutoff, double tolerance) {
  if (!(xi >= 0.0) || !(s >= 0.0) || !std::isfinite(xi) || !std::isfinite(s)) {
    throw std::domain_error("half-line wavefunction needs xi >= 0 and t >= 0");
  }
  double k_max = 0.0;
  if (cutoff) {
    k_max = *cutoff;
  } else {
    k_max = s > 0.0 ? std::max(4.0, 2.0 * (xi + 1.0) / (4.0 * s)) : 4.0;
    while (halfline_tail_estimate(xi, s, k_max) > 0.25 * tolerance && k_max < 1e5) {
      k_max *= 1.25;
    }
  }
  const double tail = halfline_tail_estimate(xi, s, k_max);
  if (tail > tolerance) {
    throw std::domain_error("half-line quadrature does not converge: cutoff " +
                            std::to_string(k_max) + " leaves a tail of about " +
                            std::to_string(tail));
  }
  const double omega = kPi * (xi + 1.0) + 4.0 * kPi * k_max * s;
  const auto panels = static_cast<std::int64_t>(std::ceil(2.0 * k_max * std::max(1.0, omega / kPi)));
  const double w = 2.0 * k_max / static_cast<double>(panels);
  auto f = [xi, s](double k) {
    const double phase = kPi * k * xi - 2.0 * kPi * k * k * s;
    return halfline_weight(k) * cplx(std::cos(phase), std::sin(phase));
  };
  cplx sum{};
  for (std::int64_t i = 0; i < panels; ++i) {
    const double a = -k_max + static_cast<double>(i) * w;
    sum += boost::math::quadrature::gauss<double, 30>::integrate(f, a, a + w);
  }
  return kI * std::numbers::sqrt2 / kPi * sum;
}

}  // namespace well
