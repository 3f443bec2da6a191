#include "well_echo/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace well {

WellModel make_model(double lambda) {
  if (!std::isfinite(lambda)) {
    throw ModelError("lambda must be finite");
  }
  if (lambda < 1.0) {
    throw ModelError("compression impossible: lambda = " + std::to_string(lambda) +
                     " < 1; a sudden compression cannot produce a wavefunction that vanishes "
                     "on (lambda a, a)");
  }
  if (lambda == 1.0) {
    throw ModelError("degenerate expansion: lambda = 1 leaves the well unchanged");
  }
  return WellModel{lambda, 1.0};
}

RationalTime reduce_time(std::int64_t p, std::int64_t q) {
  if (q <= 0) {
    throw ModelError("time denominator must be positive");
  }
  if (p < 0) {
    throw ModelError("time numerator must be non-negative");
  }
  p %= q;
  if (p == 0) {
    return RationalTime(0, 1);
  }
  const std::int64_t g = std::gcd(p, q);
  return RationalTime(p / g, q / g);
}

RationalTime operator+(const RationalTime& lhs, const RationalTime& rhs) {
  const std::int64_t g = std::gcd(lhs.q(), rhs.q());
  const std::int64_t q = lhs.q() / g * rhs.q();
  return reduce_time(lhs.p() * (q / lhs.q()) + rhs.p() * (q / rhs.q()), q);
}

RationalTime reflect(const RationalTime& t) {
  return reduce_time(t.q() - t.p(), t.q());
}

double time_value(const TimeSpec& t) {
  return std::visit(
      [](const auto& v) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, RationalTime>) {
          return v.value();
        } else {
          return v;
        }
      },
      t);
}

std::string time_label(const TimeSpec& t) {
  if (const auto* r = std::get_if<RationalTime>(&t)) {
    return std::to_string(r->p()) + "/" + std::to_string(r->q());
  }
  std::ostringstream os;
  os.precision(17);
  os << std::get<double>(t);
  return os.str();
}

TimeSpec shift_half_period(const TimeSpec& t) {
  if (const auto* r = std::get_if<RationalTime>(&t)) {
    return *r + reduce_time(1, 2);
  }
  double v = std::get<double>(t) + 0.5;
  return v - std::floor(v);
}

TimeSpec reflect(const TimeSpec& t) {
  if (const auto* r = std::get_if<RationalTime>(&t)) {
    return reflect(*r);
  }
  double v = 1.0 - std::get<double>(t);
  return v - std::floor(v);
}

TimeSpec parse_time(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t used_p = 0;
      std::size_t used_q = 0;
      const std::string ps = text.substr(0, slash);
      const std::string qs = text.substr(slash + 1);
      const long long p = std::stoll(ps, &used_p);
      const long long q = std::stoll(qs, &used_q);
      if (used_p != ps.size() || used_q != qs.size()) {
        throw ModelError("malformed time '" + text + "'");
      }
      return reduce_time(p, q);
    }
    if (text.find_first_of(".eE") == std::string::npos) {
      std::size_t used = 0;
      const long long p = std::stoll(text, &used);
      if (used != text.size()) {
        throw ModelError("malformed time '" + text + "'");
      }
      return reduce_time(p, 1);
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v) || v < 0.0) {
      throw ModelError("malformed time '" + text + "'");
    }
    return v - std::floor(v);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ModelError*>(&e) != nullptr) {
      throw;
    }
    throw ModelError("malformed time '" + text + "'");
  }
}

std::optional<Fraction> rational_approx(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) {
    return std::nullopt;
  }
  // Continued-fraction convergents.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(r);
    if (std::abs(fl) > 1e15) {
      break;
    }
    const auto a = static_cast<std::int64_t>(fl);
    const std::int64_t h2 = a * h1 + h0;
    const std::int64_t k2 = a * k1 + k0;
    if (k2 > max_den) {
      break;
    }
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double approx = static_cast<double>(h1) / static_cast<double>(k1);
    if (std::abs(approx - x) <= 1e-12 * std::max(1.0, std::abs(x))) {
      return Fraction{h1, k1};
    }
    const double frac = r - fl;
    if (frac == 0.0) {
      break;
    }
    r = 1.0 / frac;
  }
  return std::nullopt;
}

namespace {

void validate_points(double lambda, const std::vector<double>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i] >= 0.0 && pts[i] <= lambda)) {
      throw ModelError("grid point " + std::to_string(pts[i]) + " outside [0, lambda]");
    }
    if (i > 0 && !(pts[i] > pts[i - 1])) {
      throw ModelError("grid points must be strictly increasing");
    }
  }
}

double lattice_point(double lambda, const std::optional<Fraction>& frac, std::int64_t j,
                     std::int64_t m) {
  if (j == 0) {
    return 0.0;
  }
  if (j == m) {
    return lambda;
  }
  if (frac) {
    // Correctly rounded r j / (s M): cusp abscissae come out bit-exact.
    return static_cast<double>(frac->num * j) / static_cast<double>(frac->den * m);
  }
  return lambda * static_cast<double>(j) / static_cast<double>(m);
}

}  // namespace

SpatialGrid SpatialGrid::from_points(const WellModel& model, std::vector<double> points) {
  validate_points(model.lambda, points);
  SpatialGrid g;
  g.lambda_ = model.lambda;
  g.points_ = std::move(points);
  return g;
}

SpatialGrid SpatialGrid::lattice(const WellModel& model, std::int64_t divisions) {
  if (divisions < 1) {
    throw ModelError("lattice needs at least one division");
  }
  const auto frac = rational_approx(model.lambda);
  SpatialGrid g;
  g.lambda_ = model.lambda;
  Lattice lat;
  lat.divisions = divisions;
  g.points_.reserve(static_cast<std::size_t>(divisions) + 1);
  lat.indices.reserve(static_cast<std::size_t>(divisions) + 1);
  for (std::int64_t j = 0; j <= divisions; ++j) {
    g.points_.push_back(lattice_point(model.lambda, frac, j, divisions));
    lat.indices.push_back(j);
  }
  g.lattice_ = std::move(lat);
  return g;
}

SpatialGrid SpatialGrid::cusp_aligned(const WellModel& model, std::int64_t min_points,
                                      std::int64_t multiple_of) {
  std::int64_t base = std::max<std::int64_t>(1, multiple_of);
  if (const auto frac = rational_approx(model.lambda)) {
    base = std::lcm(base, 2 * frac->num);
  }
  const std::int64_t m = std::max<std::int64_t>(1, (min_points + base - 1) / base) * base;
  return lattice(model, m);
}

std::optional<SpatialGrid> SpatialGrid::on_lattice(const WellModel& model,
                                                   const std::vector<double>& points,
                                                   std::int64_t max_divisions) {
  validate_points(model.lambda, points);
  const auto frac = rational_approx(model.lambda);
  for (std::int64_t m = 1; m <= max_divisions; ++m) {
    Lattice lat{m, {}};
    bool fits = true;
    for (const double x : points) {
      const double j = x / model.lambda * static_cast<double>(m);
      if (std::abs(j - std::nearbyint(j)) > 1e-9 * std::max(1.0, j)) {
        fits = false;
        break;
      }
      lat.indices.push_back(static_cast<std::int64_t>(std::nearbyint(j)));
    }
    if (!fits) {
      continue;
    }
    SpatialGrid g;
    g.lambda_ = model.lambda;
    for (const auto j : lat.indices) {
      g.points_.push_back(lattice_point(model.lambda, frac, j, m));
    }
    g.lattice_ = std::move(lat);
    return g;
  }
  return std::nullopt;
}

SpatialGrid SpatialGrid::window(double lo, double hi) const {
  SpatialGrid g;
  g.lambda_ = lambda_;
  std::optional<Lattice> lat;
  if (lattice_) {
    lat = Lattice{lattice_->divisions, {}};
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i] >= lo && points_[i] <= hi) {
      g.points_.push_back(points_[i]);
      if (lat) {
        lat->indices.push_back(lattice_->indices[i]);
      }
    }
  }
  g.lattice_ = std::move(lat);
  return g;
}

SpatialGrid SpatialGrid::mirrored() const {
  SpatialGrid g;
  g.lambda_ = lambda_;
  const std::size_t n = points_.size();
  g.points_.resize(n);
  if (lattice_) {
    const auto frac = rational_approx(lambda_);
    Lattice lat{lattice_->divisions, std::vector<std::int64_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t j = lattice_->divisions - lattice_->indices[n - 1 - i];
      lat.indices[i] = j;
      g.points_[i] = lattice_point(lambda_, frac, j, lattice_->divisions);
    }
    g.lattice_ = std::move(lat);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      g.points_[i] = std::clamp(lambda_ - points_[n - 1 - i], 0.0, lambda_);
    }
  }
  return g;
}

bool SpatialGrid::includes_endpoints() const {
  return !points_.empty() && points_.front() == 0.0 && points_.back() == lambda_;
}

std::optional<double> SpatialGrid::uniform_step() const {
  if (points_.size() < 2) {
    return std::nullopt;
  }
  const double h = (points_.back() - points_.front()) / static_cast<double>(points_.size() - 1);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (std::abs((points_[i] - points_[i - 1]) - h) > 1e-9 * std::max(h, 1e-300) + 1e-14) {
      return std::nullopt;
    }
  }
  return h;
}

std::optional<std::size_t> SpatialGrid::index_of(double xi, double tol) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), xi - tol);
  if (it != points_.end() && std::abs(*it - xi) <= tol) {
    return static_cast<std::size_t>(it - points_.begin());
  }
  return std::nullopt;
}

}  // namespace well
