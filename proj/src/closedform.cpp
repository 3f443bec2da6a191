#include "well_echo/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace well {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kKnotTol = 1e-12;

// sin(pi x) with the argument reduced first, so sin(pi n) is exactly 0.
double sinpi(double x) {
  const double k = std::nearbyint(x);
  const double s = std::sin(kPi * (x - k));
  return std::fmod(std::abs(k), 2.0) == 1.0 ? -s : s;
}

double cospi(double x) { return sinpi(x + 0.5); }

std::vector<double> make_knots(double lambda, std::vector<double> candidates) {
  std::vector<double> knots{0.0, lambda};
  for (const double c : candidates) {
    if (c > kKnotTol && c < lambda - kKnotTol) {
      knots.push_back(c);
    }
  }
  std::sort(knots.begin(), knots.end());
  std::vector<double> out;
  for (const double k : knots) {
    if (out.empty() || k - out.back() > kKnotTol) {
      out.push_back(k);
    }
  }
  if (out.back() != lambda) {
    out.back() = lambda;
  }
  return out;
}

std::size_t locate(const std::vector<double>& knots, double xi) {
  const auto it = std::lower_bound(knots.begin() + 1, knots.end(), xi);
  const auto idx = static_cast<std::size_t>(it - (knots.begin() + 1));
  return std::min(idx, knots.size() - 2);
}

cplx eval_terms(const std::vector<TrigTerm>& terms, double scale, double xi) {
  cplx v{};
  for (const auto& t : terms) {
    v += t.amplitude * sinpi(xi - t.shift);
  }
  return scale * v;
}

void require_expansion(const WellModel& model) {
  if (!(model.lambda > 1.0)) {
    throw ModelError("closed forms need lambda > 1");
  }
}

// theta(x) for the step products; x == 0 only happens at knots.
double th(double x) { return x > 0.0 ? 1.0 : 0.0; }

}  // namespace

PiecewiseTrig::PiecewiseTrig(double lambda, const std::vector<SupportedTerm>& terms, double scale)
    : lambda_(lambda), scale_(scale) {
  std::vector<double> cand;
  for (const auto& t : terms) {
    cand.push_back(t.lo);
    cand.push_back(t.hi);
  }
  knots_ = make_knots(lambda, cand);
  pieces_.resize(knots_.size() - 1);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double mid = 0.5 * (knots_[i] + knots_[i + 1]);
    auto& piece = pieces_[i];
    for (const auto& t : terms) {
      if (t.hi - t.lo > kKnotTol && mid > t.lo && mid < t.hi) {
        piece.terms.push_back(t.term);
        // A sin(pi (xi - s)) = A cos(pi s) sin(pi xi) - A sin(pi s) cos(pi xi)
        piece.alpha += scale * t.term.amplitude * cospi(t.term.shift);
        piece.beta -= scale * t.term.amplitude * sinpi(t.term.shift);
      }
    }
  }
}

std::size_t PiecewiseTrig::piece_index(double xi) const { return locate(knots_, xi); }

cplx PiecewiseTrig::operator()(double xi) const {
  return eval_terms(pieces_[piece_index(xi)].terms, scale_, xi);
}

cplx PiecewiseTrig::derivative(double xi) const {
  cplx v{};
  for (const auto& t : pieces_[piece_index(xi)].terms) {
    v += t.amplitude * (kPi * cospi(xi - t.shift));
  }
  return scale_ * v;
}

std::vector<cplx> PiecewiseTrig::sample(const std::vector<double>& xi) const {
  std::vector<cplx> out;
  out.reserve(xi.size());
  for (const double x : xi) {
    out.push_back((*this)(x));
  }
  return out;
}

double PiecewiseTrig::max_knot_jump() const {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < knots_.size(); ++i) {
    const double k = knots_[i];
    const cplx left = eval_terms(pieces_[i - 1].terms, scale_, k);
    const cplx right = eval_terms(pieces_[i].terms, scale_, k);
    worst = std::max(worst, std::abs(left - right));
  }
  return worst;
}

PiecewiseDensity::PiecewiseDensity(double lambda, std::vector<double> knots,
                                   std::vector<Piece> pieces)
    : lambda_(lambda), knots_(std::move(knots)), pieces_(std::move(pieces)) {
  if (knots_.size() != pieces_.size() + 1) {
    throw ModelError("piecewise density: knots and pieces disagree");
  }
}

namespace {

double eval_density_piece(const PiecewiseDensity::Piece& p, double xi) {
  const double s = sinpi(xi);
  const double c = cospi(xi);
  return p.s * s * s + p.c * c * c + p.m * s * c;
}

// Antiderivative of the three basis functions.
double primitive(const PiecewiseDensity::Piece& p, double x) {
  const double s2 = sinpi(2.0 * x) / (4.0 * kPi);
  const double sx = sinpi(x);
  return p.s * (0.5 * x - s2) + p.c * (0.5 * x + s2) + p.m * sx * sx / (2.0 * kPi);
}

}  // namespace

double PiecewiseDensity::operator()(double xi) const {
  return eval_density_piece(pieces_[locate(knots_, xi)], xi);
}

std::vector<double> PiecewiseDensity::sample(const std::vector<double>& xi) const {
  std::vector<double> out;
  out.reserve(xi.size());
  for (const double x : xi) {
    out.push_back((*this)(x));
  }
  return out;
}

double PiecewiseDensity::integral(double lo, double hi) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double a = std::max(lo, knots_[i]);
    const double b = std::min(hi, knots_[i + 1]);
    if (b > a) {
      sum += primitive(pieces_[i], b) - primitive(pieces_[i], a);
    }
  }
  return sum;
}

double PiecewiseDensity::max_knot_jump() const {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < knots_.size(); ++i) {
    const double k = knots_[i];
    worst = std::max(worst, std::abs(eval_density_piece(pieces_[i - 1], k) -
                                     eval_density_piece(pieces_[i], k)));
  }
  return worst;
}

PiecewiseConstant::PiecewiseConstant(double lambda, std::vector<double> knots,
                                     std::vector<double> values)
    : lambda_(lambda), knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() != values_.size() + 1) {
    throw ModelError("piecewise constant: knots and values disagree");
  }
}

double PiecewiseConstant::operator()(double xi) const { return values_[locate(knots_, xi)]; }

std::vector<double> PiecewiseConstant::sample(const std::vector<double>& xi) const {
  std::vector<double> out;
  out.reserve(xi.size());
  for (const double x : xi) {
    out.push_back((*this)(x));
  }
  return out;
}

PiecewiseDensity density_of(const PiecewiseTrig& f) {
  std::vector<PiecewiseDensity::Piece> pieces;
  for (const auto& p : f.pieces()) {
    pieces.push_back({std::norm(p.alpha), std::norm(p.beta),
                      2.0 * std::real(p.alpha * std::conj(p.beta))});
  }
  return PiecewiseDensity(f.lambda(), f.knots(), std::move(pieces));
}

PiecewiseConstant current_of(const PiecewiseTrig& f) {
  std::vector<double> values;
  for (const auto& p : f.pieces()) {
    values.push_back(std::imag(p.alpha * std::conj(p.beta)));
  }
  return PiecewiseConstant(f.lambda(), f.knots(), std::move(values));
}

PiecewiseTrig psi_half(const WellModel& model) {
  require_expansion(model);
  const double l = model.lambda;
  // -sqrt2 sin(pi (l - xi)) = sqrt2 sin(pi (xi - l))
  return PiecewiseTrig(l, {{l - 1.0, l, {cplx(std::numbers::sqrt2, 0.0), l}}});
}

PiecewiseTrig psi_quarter(const WellModel& model) {
  require_expansion(model);
  const double l = model.lambda;
  const cplx em = std::polar(1.0, -kPi / 4.0);
  const cplx ep = std::polar(1.0, kPi / 4.0);
  // -e^{i pi/4} sin(pi (l - xi)) = e^{i pi/4} sin(pi (xi - l))
  return PiecewiseTrig(l, {{0.0, 1.0, {em, 0.0}}, {l - 1.0, l, {ep, l}}});
}

PiecewiseDensity density_quarter(const WellModel& model) { return density_of(psi_quarter(model)); }

PiecewiseConstant current_quarter(const WellModel& model) {
  require_expansion(model);
  const double l = model.lambda;
  if (l >= 2.0) {
    return PiecewiseConstant(l, {0.0, l}, {0.0});
  }
  return PiecewiseConstant(l, {0.0, l - 1.0, 1.0, l}, {0.0, sinpi(l), 0.0});
}

PiecewiseTrig psi_eighth(const WellModel& model) {
  require_expansion(model);
  const double l = model.lambda;
  const double h = 0.5 * l;
  const cplx one{1.0, 0.0};
  const cplx em = std::polar(1.0, -kPi / 4.0);
  const std::vector<SupportedTerm> terms{
      // f_<
      {0.0, std::min(h, 1.0 - h), {one, -h}},
      {std::max(0.0, h - 1.0), h, {one, h}},
      // f_>
      {h, std::min(l, 1.0 + h), {one, h}},
      {std::max(h, 3.0 * h - 1.0), l, {one, 3.0 * h}},
      {0.0, 1.0, {em, 0.0}},
      {l - 1.0, l, {-em, l}},
  };
  return PiecewiseTrig(l, terms, 1.0 / std::numbers::sqrt2);
}

PiecewiseDensity density_eighth(const WellModel& model) { return density_of(psi_eighth(model)); }

PiecewiseConstant current_eighth(const WellModel& model) {
  require_expansion(model);
  const double l = model.lambda;
  const double h = 0.5 * l;
  const auto knots =
      make_knots(l, {1.0, l - 1.0, h, 1.0 - h, h - 1.0, 1.0 + h, 3.0 * h - 1.0});
  const double s1 = sinpi(h);
  const double s3 = sinpi(3.0 * h);
  std::vector<double> k_out{0.0};
  std::vector<double> v_out;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double x = 0.5 * (knots[i] + knots[i + 1]);
    double c1 = 0.0;
    double c3 = 0.0;
    if (x < h) {
      c1 = th(1 - x) * (-th(1 - h - x) + th(1 - h + x)) + th(1 - h + x) * th(1 - l + x);
      c3 = th(1 - l + x) * th(1 - h - x);
    } else {
      c1 = th(1 + h - x) * (th(1 - x) + th(1 - l + x)) - th(1 - 3 * h + x) * th(1 - l + x);
      c3 = th(1 - x) * th(1 - 3 * h + x);
    }
    const double v = (c1 * s1 + c3 * s3) / (2.0 * std::numbers::sqrt2);
    if (!v_out.empty() && v == v_out.back()) {
      k_out.back() = knots[i + 1];
    } else {
      v_out.push_back(v);
      k_out.push_back(knots[i + 1]);
    }
  }
  return PiecewiseConstant(l, std::move(k_out), std::move(v_out));
}

std::vector<double> CuspSet::distinct() const {
  std::vector<double> v(abscissae.begin(), abscissae.end());
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (const double x : v) {
    if (out.empty() || x - out.back() > kKnotTol) {
      out.push_back(x);
    }
  }
  return out;
}

CuspSet cusp_abscissae_eighth(const WellModel& model) {
  require_expansion(model);
  const double l = model.lambda;
  CuspSet set;
  set.abscissae = {1.0, std::abs(0.5 * l - 1.0), 0.5 * l,
                   l < 2.0 ? 1.5 * l - 1.0 : 1.0 + 0.5 * l, l - 1.0};
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      if (std::abs(set.abscissae[static_cast<std::size_t>(i)] -
                   set.abscissae[static_cast<std::size_t>(j)]) <= kKnotTol) {
        set.degenerate.emplace_back(i, j);
      }
    }
  }
  return set;
}

FragmentedDensity fragmented_density(const WellModel& model, int level) {
  if (level < 1 || level > 30) {
    throw ModelError("fragmentation level must be in 1..30");
  }
  const double threshold = std::ldexp(1.0, level);
  if (!(model.lambda > threshold)) {
    throw ModelError("lambda = " + std::to_string(model.lambda) + " is not above the threshold " +
                     std::to_string(threshold) +
                     "; the pattern is not fragmented there, evaluate the series instead");
  }
  const double l = model.lambda;
  const std::int64_t copies = std::int64_t{1} << (level - 1);
  const double period = l / static_cast<double>(copies);
  const double weight = 2.0 / threshold;  // 2^{-N} rho0, rho0 = 2 sin^2

  struct Peak {
    double lo;
    double shift;
  };
  std::vector<Peak> peaks;
  FragmentedDensity out;
  out.level = level;
  out.conjecture = level >= 3;
  for (std::int64_t k = 0; k < copies; ++k) {
    const double left = static_cast<double>(k) * period;
    const double right = k + 1 == copies ? l : static_cast<double>(k + 1) * period;
    peaks.push_back({left, left});
    peaks.push_back({right - 1.0, right});
    out.centers.push_back(left + 0.5);
    out.centers.push_back(right - 0.5);
  }
  std::vector<double> cand;
  for (const auto& p : peaks) {
    cand.push_back(p.lo);
    cand.push_back(p.lo + 1.0);
  }
  auto knots = make_knots(l, cand);
  std::vector<PiecewiseDensity::Piece> pieces(knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double mid = 0.5 * (knots[i] + knots[i + 1]);
    for (const auto& p : peaks) {
      if (mid > p.lo && mid < p.lo + 1.0) {
        // weight sin^2(pi (xi - s)), expanded in sin/cos of pi xi
        const double cs = cospi(p.shift);
        const double ss = sinpi(p.shift);
        pieces[i].s += weight * cs * cs;
        pieces[i].c += weight * ss * ss;
        pieces[i].m -= 2.0 * weight * cs * ss;
      }
    }
  }
  out.density = PiecewiseDensity(l, std::move(knots), std::move(pieces));
  return out;
}

}  // namespace well
