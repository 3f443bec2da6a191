#include "well_echo/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <numeric>
#include <ostream>
#include <sstream>

#include "well_echo/analysis.hpp"
#include "well_echo/closedform.hpp"
#include "well_echo/output.hpp"
#include "well_echo/spectral.hpp"

#ifndef WELL_ECHO_VERSION
#define WELL_ECHO_VERSION "dev"
#endif

namespace well {

using ojson = nlohmann::ordered_json;

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  if (s == "svg") return Format::svg;
  throw UsageError("unknown format '" + s + "' (csv, json, svg)");
}

std::string extension(Format f) {
  switch (f) {
    case Format::csv: return "csv";
    case Format::json: return "json";
    case Format::svg: return "svg";
  }
  return "csv";
}

Detectors parse_detectors(const std::string& list) {
  Detectors d;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "plateaux" || item == "plateaus") {
      d.plateaux = true;
    } else if (item == "cusps") {
      d.cusps = true;
    } else if (item == "fragments") {
      d.fragments = true;
    } else if (item == "expectations") {
      d.expectations = true;
    } else {
      throw UsageError("unknown detector '" + item + "' (plateaux, cusps, fragments, expectations)");
    }
  }
  return d;
}

void validate(const RunConfig& config) {
  try {
    make_model(config.lambda);
    for (const double l : config.lambdas) {
      make_model(l);
    }
  } catch (const ModelError& e) {
    throw UsageError(e.what());
  }
  if (config.grid < 2) {
    throw UsageError("grid needs at least 2 divisions");
  }
  if (!(config.epsilon > 0.0) || !(config.epsilon < 1.0)) {
    throw UsageError("epsilon must lie in (0, 1)");
  }
  for (const double x : config.positions) {
    if (!(x >= 0.0 && x <= config.lambda)) {
      throw UsageError("position " + std::to_string(x) + " outside [0, lambda]");
    }
  }
  if (config.samples < 1) {
    throw UsageError("samples must be positive");
  }
  if (config.divisions < 1) {
    throw UsageError("M must be positive");
  }
  for (const auto p : config.numerators) {
    if (p < 1 || p > config.divisions) {
      throw UsageError("p must lie in 1..M");
    }
  }
}

std::string output_path(const std::string& out, Format format, const std::string& label,
                        std::size_t count) {
  namespace fs = std::filesystem;
  const fs::path p(out);
  const std::string ext = "." + extension(format);
  if (count <= 1) {
    return p.has_extension() ? out : out + ext;
  }
  std::string tag = label;
  std::replace(tag.begin(), tag.end(), '/', '-');
  const fs::path stem = p.has_extension() ? p.parent_path() / p.stem() : p;
  return stem.string() + "_" + tag + ext;
}

namespace {

void base_meta(Table& t, double lambda, const std::string& time, const SpectralSet& set) {
  t.add_meta("lambda", format_number(lambda));
  t.add_meta("time", time);
  t.add_meta("n_max", std::to_string(set.n_max));
  t.add_meta("error_bound", format_number(set.tail_bound));
  t.add_meta("version", WELL_ECHO_VERSION);
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? " " : "") + format_number(v[i]);
  }
  return out;
}

void emit(const std::string& path, Format format, const Table& t, const std::string& reports) {
  write_file(path, [&](std::ostream& os) {
    if (format == Format::json) {
      write_json(os, t, reports);
    } else {
      write_csv(os, t);
    }
  });
}

struct Snapshot {
  TimeSpec time;
  Table table;
  ojson reports = ojson::object();
};

Snapshot snapshot_at(const RunConfig& config, const SpectralSet& set, const SpatialGrid& grid,
                     const TimeSpec& t) {
  const auto both = evaluate_with_current(set, grid, t, config.smoothing);
  const auto rho = density(both.field);
  const auto& x = grid.points();
  std::vector<std::string> flags(x.size());
  auto add_flag = [&](std::size_t i, const char* f) {
    flags[i] += flags[i].empty() ? f : std::string(";") + f;
  };

  Snapshot s{t, {}, ojson::object()};
  base_meta(s.table, config.lambda, time_label(t), set);
  s.table.add_meta("smoothing", config.smoothing == Smoothing::sigma ? "sigma" : "none");

  if (config.detect.plateaux) {
    try {
      const auto rep = detect_plateaux(rho);
      ojson arr = ojson::array();
      std::vector<double> flat;
      for (const auto& p : rep.plateaux) {
        arr.push_back({{"lo", p.lo}, {"hi", p.hi}, {"value", p.value},
                       {"max_deviation", p.max_deviation}});
        flat.insert(flat.end(), {p.lo, p.hi, p.value});
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (x[i] >= p.lo && x[i] <= p.hi) add_flag(i, "plateau");
        }
      }
      s.reports["plateaux"] = {{"tolerance", rep.tolerance}, {"min_width", rep.min_width},
                               {"intervals", arr}};
      s.table.add_meta("plateaux", join_numbers(flat));
    } catch (const AnalysisError& e) {
      s.reports["plateaux"] = {{"error", e.what()}};
      s.table.add_meta("plateaux", std::string("error: ") + e.what());
    }
  }
  if (config.detect.cusps) {
    const auto rep = detect_cusps(both.field);
    auto mark = [&](const std::vector<Cusp>& cs) {
      ojson arr = ojson::array();
      for (const auto& c : cs) {
        arr.push_back({{"position", c.position}, {"uncertainty", c.uncertainty},
                       {"strength", c.strength}});
        const auto it = std::lower_bound(x.begin(), x.end(), c.position);
        std::size_t i = static_cast<std::size_t>(it - x.begin());
        if (i > 0 && (i == x.size() || c.position - x[i - 1] < x[i] - c.position)) --i;
        add_flag(i, "cusp");
      }
      return arr;
    };
    s.reports["cusps"] = mark(rep.cusps);
    s.reports["derivative_jumps"] = ojson::array();
    for (const auto& c : rep.derivative_jumps) {
      s.reports["derivative_jumps"].push_back(
          {{"position", c.position}, {"uncertainty", c.uncertainty}, {"strength", c.strength}});
    }
    s.table.add_meta("cusps", join_numbers(rep.positions()));
    s.table.add_meta("derivative_jumps", join_numbers(rep.jump_positions()));
  }
  if (config.detect.fragments) {
    const auto rep = detect_fragments(rho);
    ojson arr = ojson::array();
    std::vector<double> masses;
    for (const auto& f : rep.fragments) {
      arr.push_back({{"lo", f.lo}, {"hi", f.hi}, {"mass", f.mass}, {"centroid", f.centroid},
                     {"shape_distance", f.shape_distance}});
      masses.push_back(f.mass);
    }
    s.reports["fragments"] = {{"zero_tol", rep.zero_tol}, {"components", arr}};
    s.table.add_meta("fragments", std::to_string(rep.count()));
    s.table.add_meta("fragment_masses", join_numbers(masses));
  }
  if (config.detect.expectations) {
    const auto tr = expectations(set, {t});
    s.reports["expectations"] = {{"mean_xi", tr.mean_xi[0]}, {"mean_p", tr.mean_p[0]},
                                 {"delta_xi", tr.delta_xi[0]}, {"delta_p", tr.delta_p[0]},
                                 {"product_hbar", tr.product[0]}};
    s.table.add_meta("expectations", join_numbers({tr.mean_xi[0], tr.mean_p[0], tr.delta_xi[0],
                                                   tr.delta_p[0], tr.product[0]}));
  }

  s.table.add_column("xi", x);
  s.table.add_column("density", rho.values);
  s.table.add_column("current", both.current.values);
  s.table.text_name = "flag";
  s.table.text = std::move(flags);
  return s;
}

}  // namespace

std::vector<std::string> cmd_snapshot(const RunConfig& config, std::ostream& log) {
  validate(config);
  if (config.times.empty()) {
    throw UsageError("snapshot needs at least one --time");
  }
  const auto model = make_model(config.lambda);
  const auto set = build_spectral_set(model, config.epsilon);
  const auto grid = SpatialGrid::lattice(model, config.grid);
  log << "lambda " << config.lambda << ", n_max " << set.n_max << ", error bound "
      << set.tail_bound << '\n';

  std::vector<Snapshot> snaps;
  for (const auto& t : config.times) {
    snaps.push_back(snapshot_at(config, set, grid, t));
  }
  std::vector<std::string> written;
  if (config.format == Format::svg) {
    PlotSpec plot{"Density, lambda = " + format_number(config.lambda), "x / a", "a rho", {}};
    for (const auto& s : snaps) {
      plot.curves.push_back({"t = " + time_label(s.time) + " T", s.table.column("xi"),
                             s.table.column("density")});
    }
    const auto path = output_path(config.out, Format::svg, "", 1);
    write_file(path, [&](std::ostream& os) { write_svg(os, plot); });
    written.push_back(path);
  } else {
    for (const auto& s : snaps) {
      const auto path = output_path(config.out, config.format, time_label(s.time), snaps.size());
      emit(path, config.format, s.table, s.reports.dump());
      written.push_back(path);
    }
  }
  for (const auto& p : written) {
    log << "wrote " << p << '\n';
  }
  return written;
}

std::vector<std::string> cmd_timetrace(const RunConfig& config, std::ostream& log) {
  validate(config);
  if (config.positions.empty()) {
    throw UsageError("timetrace needs at least one --xi");
  }
  const auto model = make_model(config.lambda);
  const auto set = build_spectral_set(model, config.epsilon);
  const double l = config.lambda;
  std::vector<double> pts;
  for (const double x : config.positions) {
    pts.push_back(x);
    pts.push_back(l - x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  // Lattice points go through the folded FFT path, much cheaper per time.
  const auto grid =
      SpatialGrid::on_lattice(model, pts).value_or(SpatialGrid::from_points(model, pts));
  auto index = [&](double x) { return *grid.index_of(x, 1e-9); };

  const std::int64_t n = config.samples;
  const std::size_t np = config.positions.size();
  std::vector<double> tau;
  std::vector<std::vector<double>> rho(np), j(np), rho_r(np), j_r(np), j_p(np);
  for (std::int64_t k = 0; k <= n; ++k) {
    const auto t = reduce_time(k, n);
    const auto tr = reflect(t);
    // 1/2 - k/n = (n - 2k) / (2n)
    const auto tp = reduce_time(((n - 2 * k) % (2 * n) + 2 * n) % (2 * n), 2 * n);
    const auto a = evaluate_with_current(set, grid, t, config.smoothing);
    const auto b = evaluate_with_current(set, grid, tr, config.smoothing);
    const auto c = evaluate_with_current(set, grid, tp, config.smoothing);
    tau.push_back(static_cast<double>(k) / static_cast<double>(n));
    for (std::size_t q = 0; q < np; ++q) {
      const double x = config.positions[q];
      const std::size_t i = index(x);
      rho[q].push_back(std::norm(a.field.values[i]));
      j[q].push_back(a.current.values[i]);
      rho_r[q].push_back(std::norm(b.field.values[i]));
      j_r[q].push_back(b.current.values[i]);
      j_p[q].push_back(c.current.values[index(l - x)]);
    }
  }

  Table t;
  base_meta(t, l, "k/" + std::to_string(n), set);
  t.add_meta("positions", join_numbers(config.positions));
  t.add_meta("columns",
             "density(xi,tau) current(xi,tau) density(xi,1-tau) current(xi,1-tau) "
             "current(lambda-xi,1/2-tau)");
  t.add_column("tau", tau);
  for (std::size_t q = 0; q < np; ++q) {
    const std::string sfx = np > 1 ? "_" + format_number(config.positions[q]) : "";
    t.add_column("density" + sfx, rho[q]);
    t.add_column("current" + sfx, j[q]);
    t.add_column("density_reflected" + sfx, rho_r[q]);
    t.add_column("current_reflected" + sfx, j_r[q]);
    t.add_column("current_partner" + sfx, j_p[q]);
  }

  std::vector<std::string> written;
  if (config.format == Format::svg) {
    PlotSpec plot{"Density and current, lambda = " + format_number(l), "t / T", "", {}};
    for (std::size_t q = 0; q < np; ++q) {
      const std::string at = "x = " + format_number(config.positions[q]) + " a";
      plot.curves.push_back({"a rho, " + at, tau, rho[q]});
      plot.curves.push_back({"j, " + at, tau, j[q]});
    }
    const auto path = output_path(config.out, Format::svg, "", 1);
    write_file(path, [&](std::ostream& os) { write_svg(os, plot); });
    written.push_back(path);
  } else {
    const auto path = output_path(config.out, config.format, "", 1);
    emit(path, config.format, t, "");
    written.push_back(path);
  }
  for (const auto& p : written) {
    log << "wrote " << p << '\n';
  }
  return written;
}

namespace {

struct CheckList {
  ojson items = ojson::array();
  bool ok = true;

  void add(const std::string& name, double value, double tolerance, bool pass) {
    items.push_back({{"check", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}});
    ok = ok && pass;
  }
  void within(const std::string& name, double value, double target, double tolerance) {
    add(name, value, tolerance, std::abs(value - target) <= tolerance);
  }
};

bool is_integer(double l) { return std::abs(l - std::nearbyint(l)) < kIntegerSwitch; }

CheckList verify_lambda(double lambda, double epsilon) {
  CheckList c;
  const auto model = make_model(lambda);
  const auto set = build_spectral_set(model, epsilon);
  c.add("n_max", static_cast<double>(set.n_max), 0.0, true);

  if (is_integer(lambda)) {
    const auto n0 = static_cast<std::int64_t>(std::nearbyint(lambda));
    c.within("P_n0 = 1/n0", probability(lambda, n0), 1.0 / static_cast<double>(n0), 1e-10);
  } else {
    const auto g = norm_and_energy_via_g(lambda);
    c.within("sum rule norm", g.norm, 1.0, 1e-10);
    c.within("sum rule energy", g.energy, 1.0, 1e-10);
  }
  c.within("sum P_n (n <= 1e5)", measurement_distribution(model, 100000).partial_sum, 1.0, 1e-4);
  c.within("mean energy", mean_energy(set), 1.0, 1e-6);

  const auto grid = SpatialGrid::cusp_aligned(model, 2000, 8);
  struct Oracle {
    RationalTime t;
    PiecewiseTrig f;
  };
  for (const auto& o : {Oracle{reduce_time(1, 2), psi_half(model)},
                        Oracle{reduce_time(1, 4), psi_quarter(model)},
                        Oracle{reduce_time(1, 8), psi_eighth(model)}}) {
    const auto cmp = compare(evaluate_wavefunction(set, grid, o.t),
                             sample_closed_form(o.f, grid, o.t));
    c.add("closed form tau=" + time_label(o.t), cmp.sup, cmp.bound, cmp.pass);
  }
  for (const auto& t : {reduce_time(1, 3), reduce_time(2, 7), reduce_time(1, 5)}) {
    const auto rho = density(evaluate_wavefunction(set, grid, t));
    c.within("norm tau=" + time_label(t), trapezoid(grid, rho.values), 1.0,
             10.0 * set.tail_bound + 1e-5);
  }
  for (const auto& t : {reduce_time(1, 5), reduce_time(3, 7)}) {
    const auto rep = check_symmetries(set, grid, t);
    const double worst = std::max({rep.half_period_shift, rep.conjugation, rep.density_reflection,
                                   rep.current_reflection});
    c.add("symmetries tau=" + time_label(t), worst, rep.bound, rep.ok());
  }
  for (int level = 1; level <= 2; ++level) {
    if (lambda > std::ldexp(1.0, level)) {
      const auto t = reduce_time(1, std::int64_t{1} << (level + 1));
      const auto frag = fragmented_density(model, level);
      const auto cmp = compare(density(evaluate_wavefunction(set, grid, t)),
                               sample_closed_form(frag.density, grid, t));
      c.add("fragmented pattern tau=" + time_label(t), cmp.sup, cmp.bound, cmp.pass);
    }
  }
  return c;
}

}  // namespace

int cmd_verify(const RunConfig& config, std::ostream& report) {
  std::vector<double> lambdas = config.lambdas;
  if (lambdas.empty()) {
    lambdas = {1.5, 2.5, 3.0, 5.5, 8.0};
  }
  RunConfig checked = config;
  checked.lambdas = lambdas;
  validate(checked);
  ojson out;
  out["version"] = WELL_ECHO_VERSION;
  out["epsilon"] = config.epsilon;
  out["results"] = ojson::array();
  bool ok = true;
  for (const double l : lambdas) {
    const auto c = verify_lambda(l, config.epsilon);
    out["results"].push_back({{"lambda", l}, {"pass", c.ok}, {"checks", c.items}});
    ok = ok && c.ok;
  }
  out["pass"] = ok;
  report << out.dump(1) << '\n';
  return ok ? 0 : 1;
}

std::vector<std::string> cmd_scan(const RunConfig& config, std::ostream& log) {
  validate(config);
  std::vector<double> lambdas = config.lambdas.empty() ? std::vector<double>{config.lambda}
                                                       : config.lambdas;
  const std::int64_t m = config.divisions;
  std::vector<std::int64_t> ps = config.numerators;
  if (ps.empty()) {
    for (std::int64_t p = 1; p <= std::max<std::int64_t>(1, m / 2); ++p) ps.push_back(p);
  }

  std::vector<double> col_l, col_p, col_peaks, col_equal, col_mass, col_plat, col_gap;
  std::vector<bool> complete;
  for (const double l : lambdas) {
    const auto model = make_model(l);
    const auto set = build_spectral_set(model, config.epsilon);
    // The plateau test wants 20 samples per 0.05 a.
    const auto min_points = std::max<std::int64_t>(
        {config.grid, 2048, static_cast<std::int64_t>(std::ceil(400.0 * l)) + 1});
    const auto grid = SpatialGrid::cusp_aligned(model, min_points, 2 * m);
    bool first_complete = false;
    for (const auto p : ps) {
      const auto rho = density(evaluate_wavefunction(set, grid, reduce_time(p, m)));
      const auto frag = detect_fragments(rho);
      std::size_t plateaux = 0;
      std::size_t gaps = 0;
      for (const auto& pl : detect_plateaux(rho).plateaux) {
        (std::abs(pl.value) <= frag.zero_tol ? gaps : plateaux) += 1;
      }
      col_l.push_back(l);
      col_p.push_back(static_cast<double>(p));
      col_peaks.push_back(static_cast<double>(frag.count()));
      col_equal.push_back(frag.equal_masses() ? 1.0 : 0.0);
      col_mass.push_back(frag.total_mass());
      col_plat.push_back(static_cast<double>(plateaux));
      col_gap.push_back(static_cast<double>(gaps));
      if (p == 1) {
        first_complete = frag.count() >= 2 && frag.equal_masses();
      }
      log << "lambda " << l << " p/M " << p << "/" << m << ": " << frag.count() << " peaks\n";
    }
    complete.push_back(first_complete);
  }
  std::optional<double> lambda_c;
  for (std::size_t i = complete.size(); i-- > 0;) {
    if (!complete[i]) break;
    lambda_c = lambdas[i];
  }

  Table t;
  t.add_meta("M", std::to_string(m));
  t.add_meta("epsilon", format_number(config.epsilon));
  t.add_meta("lambda_c_estimate", lambda_c ? format_number(*lambda_c) : "none");
  t.add_meta("version", WELL_ECHO_VERSION);
  t.add_column("lambda", col_l);
  t.add_column("p", col_p);
  t.add_column("peaks", col_peaks);
  t.add_column("equal_masses", col_equal);
  t.add_column("total_mass", col_mass);
  t.add_column("plateaux", col_plat);
  t.add_column("zero_gaps", col_gap);
  log << "lambda_c estimate (tau = 1/" << m << "): "
      << (lambda_c ? format_number(*lambda_c) : std::string("none on this sweep")) << '\n';

  std::vector<std::string> written;
  const auto path = output_path(config.out, config.format, "", 1);
  if (config.format == Format::svg) {
    PlotSpec plot{"Peak count at t = p T / " + std::to_string(m), "lambda", "peaks", {}};
    for (const auto p : ps) {
      Curve c{"p = " + std::to_string(p), {}, {}};
      for (std::size_t i = 0; i < col_l.size(); ++i) {
        if (col_p[i] == static_cast<double>(p)) {
          c.x.push_back(col_l[i]);
          c.y.push_back(col_peaks[i]);
        }
      }
      plot.curves.push_back(std::move(c));
    }
    write_file(path, [&](std::ostream& os) { write_svg(os, plot); });
  } else {
    emit(path, config.format, t, "");
  }
  written.push_back(path);
  log << "wrote " << path << '\n';
  return written;
}

}  // namespace well
