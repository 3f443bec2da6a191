#include "well_echo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace well {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kMaxTerms = 400'000'000;

bool near_integer(double x, double tol) { return std::abs(x - std::nearbyint(x)) < tol; }

}  // namespace

double sin_pi_ratio(std::int64_t n, double lambda) {
  // n / lambda = k + r / lambda with |r| <= lambda / 2; fma keeps r exact to
  // one rounding, so sin stays accurate when n / lambda is nearly an integer.
  const double nd = static_cast<double>(n);
  const double k = std::nearbyint(nd / lambda);
  const double r = std::fma(-k, lambda, nd);
  const double s = std::sin(kPi * (r / lambda));
  const auto ki = static_cast<std::int64_t>(k);
  return (ki & 1) ? -s : s;
}

double coefficient(double lambda, std::int64_t n) {
  const double nd = static_cast<double>(n);
  if (std::abs(lambda - nd) < kIntegerSwitch) {
    return 1.0 / std::sqrt(nd);
  }
  const double pref = 2.0 * lambda * std::sqrt(lambda) / kPi;
  return pref * sin_pi_ratio(n, lambda) / ((lambda - nd) * (lambda + nd));
}

double tail_bound(double lambda, std::int64_t n_max) {
  const double n = static_cast<double>(n_max);
  if (!(n > lambda)) {
    throw ModelError("tail bound needs n_max > lambda");
  }
  return std::numbers::sqrt2 / kPi * std::log1p(2.0 * lambda / (n - lambda));
}

SpectralSet build_spectral_set_truncated(const WellModel& model, std::int64_t n_max) {
  if (n_max < 1 || n_max > kMaxTerms) {
    throw ModelError("n_max out of range");
  }
  SpectralSet set;
  set.lambda = model.lambda;
  set.n_max = n_max;
  set.coefficients.resize(static_cast<std::size_t>(n_max));
  for (std::int64_t n = 1; n <= n_max; ++n) {
    set.coefficients[static_cast<std::size_t>(n - 1)] = coefficient(model.lambda, n);
  }
  set.tail_bound = static_cast<double>(n_max) > model.lambda
                       ? tail_bound(model.lambda, n_max)
                       : std::numeric_limits<double>::infinity();
  return set;
}

SpectralSet build_spectral_set(const WellModel& model, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ModelError("epsilon must be positive");
  }
  const double lambda = model.lambda;
  const double l = kPi * epsilon / std::numbers::sqrt2;
  // tail_bound(N) <= eps  <=>  N >= lambda coth(l / 2)
  const double estimate = lambda / std::tanh(0.5 * l);
  if (estimate > static_cast<double>(kMaxTerms)) {
    throw ModelError("epsilon too small: would need more than 4e8 terms");
  }
  const auto first_above = static_cast<std::int64_t>(std::floor(lambda)) + 1;
  std::int64_t n = std::max(first_above, static_cast<std::int64_t>(std::ceil(estimate)));
  while (n - 1 >= first_above && tail_bound(lambda, n - 1) <= epsilon) {
    --n;
  }
  while (tail_bound(lambda, n) > epsilon) {
    ++n;
  }
  return build_spectral_set_truncated(model, n);
}

double eigenenergy(const WellModel& model, std::int64_t n) {
  const double nd = static_cast<double>(n);
  return nd * nd / (model.lambda * model.lambda);
}

double probability(double lambda, std::int64_t n) {
  const double c = coefficient(lambda, n);
  return c * c;
}

std::int64_t MeasurementDistribution::argmax() const {
  const auto it = std::max_element(probabilities.begin(), probabilities.end());
  return static_cast<std::int64_t>(it - probabilities.begin()) + 1;
}

MeasurementDistribution measurement_distribution(const WellModel& model, std::int64_t n_max) {
  if (n_max < 1) {
    throw ModelError("n_max must be >= 1");
  }
  MeasurementDistribution d;
  d.probabilities.resize(static_cast<std::size_t>(n_max));
  for (std::int64_t n = 1; n <= n_max; ++n) {
    d.probabilities[static_cast<std::size_t>(n - 1)] = probability(model.lambda, n);
  }
  // Smallest terms first.
  for (auto it = d.probabilities.rbegin(); it != d.probabilities.rend(); ++it) {
    d.partial_sum += *it;
  }
  return d;
}

double mean_energy(const SpectralSet& set) {
  const double lambda = set.lambda;
  const double l2 = lambda * lambda;
  double sum = 0.0;
  for (std::int64_t n = set.n_max; n >= 1; --n) {
    const double c = set.c(n);
    const double nd = static_cast<double>(n);
    sum += c * c * nd * nd / l2;
  }
  // n > n_max: P_n n^2/lambda^2 = (4 lambda/pi^2) sin^2(n pi/lambda) n^2/(n^2-lambda^2)^2;
  // sin^2 averages to 1/2, the smooth factor is integrated from n_max + 1/2.
  const double a = static_cast<double>(set.n_max) + 0.5;
  if (a > lambda) {
    const double integral =
        a / (2.0 * (a * a - l2)) + std::log1p(2.0 * lambda / (a - lambda)) / (4.0 * lambda);
    sum += 2.0 * lambda / (kPi * kPi) * integral;
  }
  return sum;
}

double second_moment_sum(double lambda, std::int64_t n_max) {
  const double l4 = std::pow(lambda, 4);
  double sum = 0.0;
  for (std::int64_t n = n_max; n >= 1; --n) {
    const double nd = static_cast<double>(n);
    sum += probability(lambda, n) * nd * nd * nd * nd / l4;
  }
  return sum;
}

std::vector<SecondMomentPartial> second_moment_partial(const SpectralSet& set) {
  const double l4 = std::pow(set.lambda, 4);
  std::vector<SecondMomentPartial> out;
  std::vector<std::int64_t> cuts{std::max<std::int64_t>(1, set.n_max / 4),
                                 std::max<std::int64_t>(1, set.n_max / 2), set.n_max};
  double sum = 0.0;
  std::int64_t n = 1;
  for (const auto cut : cuts) {
    for (; n <= cut; ++n) {
      const double c = set.c(n);
      const double nd = static_cast<double>(n);
      sum += c * c * nd * nd * nd * nd / l4;
    }
    out.push_back({cut, sum});
  }
  return out;
}

namespace {

void require_non_integer(double lambda) {
  if (near_integer(lambda, 1e-12)) {
    throw ModelError("G(lambda, phi) has a pole at integer lambda");
  }
}

// |phi| folded into [0, pi/2] using evenness and pi-periodicity.
double fold_phase(double phi) {
  const double r = phi - kPi * std::nearbyint(phi / kPi);
  return std::abs(r);
}

// sin(pi x), cos(pi x) after exact reduction of x to [-1/2, 1/2].
double sinpi(double x) {
  const double k = std::nearbyint(x);
  const double v = std::sin(kPi * (x - k));
  return std::fmod(std::abs(k), 2.0) == 1.0 ? -v : v;
}

double cospi(double x) {
  const double k = std::nearbyint(x);
  const double v = std::cos(kPi * (x - k));
  return std::fmod(std::abs(k), 2.0) == 1.0 ? -v : v;
}

// theta / pi = 2 |phi| / pi - 1 after folding, and lambda theta / pi.
struct Angle {
  double v;
  double lv;
};

Angle angle_of(double lambda, double phi) {
  const double v = 2.0 * fold_phase(phi) / kPi - 1.0;
  return {v, lambda * v};
}

double g_closed(double lambda, const Angle& a) {
  return kPi * cospi(a.lv) / (lambda * sinpi(lambda));
}

// Split into the part proportional to cos(lambda theta) and the rest so
// that differences can cancel exactly.
struct DerivParts {
  double sin_part;
  double cos_factor;
  double cos_value;
};

DerivParts g_dlambda_parts(double lambda, const Angle& a) {
  const double s = sinpi(lambda);
  const double c = cospi(lambda);
  const double den = lambda * lambda * s * s;
  return {kPi * (-kPi * a.v * sinpi(a.lv) * lambda * s) / den,
          -kPi * (s + kPi * lambda * c) / den, cospi(a.lv)};
}

}  // namespace

double g_function_closed(double lambda, double phi) {
  require_non_integer(lambda);
  return g_closed(lambda, angle_of(lambda, phi));
}

double g_function_series(double lambda, double phi, std::int64_t terms) {
  require_non_integer(lambda);
  const double l2 = lambda * lambda;
  double sum = 0.0;
  for (std::int64_t n = terms; n >= 1; --n) {
    const double nd = static_cast<double>(n);
    sum += 2.0 * std::cos(2.0 * nd * phi) / ((lambda - nd) * (lambda + nd));
  }
  return sum + 1.0 / l2;
}

double g_function_closed_dlambda(double lambda, double phi) {
  require_non_integer(lambda);
  const auto p = g_dlambda_parts(lambda, angle_of(lambda, phi));
  return p.sin_part + p.cos_factor * p.cos_value;
}

SumRuleCheck norm_and_energy_via_g(double lambda) {
  if (!(lambda > 1.0)) {
    throw ModelError("sum rules need lambda > 1");
  }
  require_non_integer(lambda);
  // phi = 0 and phi = pi / lambda; lambda theta / pi is then -lambda and
  // +-(2 - lambda), formed exactly.
  const Angle a0{-1.0, -lambda};
  const Angle a1 = lambda >= 2.0 ? Angle{2.0 / lambda - 1.0, 2.0 - lambda}
                                 : Angle{1.0 - 2.0 / lambda, lambda - 2.0};
  SumRuleCheck out;
  out.bracket = g_closed(lambda, a0) - g_closed(lambda, a1);
  const auto d0 = g_dlambda_parts(lambda, a0);
  const auto d1 = g_dlambda_parts(lambda, a1);
  const double derivative =
      (d0.sin_part - d1.sin_part) + d0.cos_factor * (d0.cos_value - d1.cos_value);
  out.norm = -lambda * lambda / (2.0 * kPi * kPi) * derivative;
  out.energy = -lambda / (kPi * kPi) * out.bracket + out.norm;
  return out;
}

}  // namespace well
