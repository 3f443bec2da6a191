// well-echo: snapshots, time traces, checks and scans for the expanded well.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "well_echo/commands.hpp"

namespace {

struct Flags {
  double lambda = 1.5;
  std::vector<std::string> times;
  std::vector<double> real_times;
  std::int64_t grid = 1200;
  double epsilon = 1e-6;
  std::string format = "csv";
  std::string out = "well_echo";
  std::string detect;
  std::string smoothing = "none";
};

void common(CLI::App* app, Flags& f) {
  app->add_option("--lambda", f.lambda, "expansion factor (> 1)");
  app->add_option("--grid", f.grid, "number of divisions of [0, lambda]");
  app->add_option("--epsilon", f.epsilon, "certified sup-norm truncation error");
  app->add_option("--format", f.format, "csv, json or svg");
  app->add_option("--out", f.out, "output path (stem when several files are written)");
  app->add_option("--smoothing", f.smoothing, "none or sigma (current only)");
}

well::RunConfig to_config(const Flags& f) {
  well::RunConfig c;
  c.lambda = f.lambda;
  for (const auto& t : f.times) {
    try {
      c.times.push_back(well::parse_time(t));
    } catch (const well::ModelError& e) {
      throw well::UsageError(e.what());
    }
  }
  for (const double t : f.real_times) {
    if (!std::isfinite(t) || t < 0.0) {
      throw well::UsageError("--time-real needs a finite non-negative value");
    }
    c.times.push_back(t - std::floor(t));
  }
  c.grid = f.grid;
  c.epsilon = f.epsilon;
  c.format = well::parse_format(f.format);
  c.out = f.out;
  c.detect = well::parse_detectors(f.detect);
  if (f.smoothing == "sigma") {
    c.smoothing = well::Smoothing::sigma;
  } else if (f.smoothing != "none") {
    throw well::UsageError("--smoothing takes none or sigma");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle in a suddenly expanded infinite well: series evaluation and analysis"};
  app.set_version_flag("--version", WELL_ECHO_VERSION);
  app.require_subcommand(1);
  Flags f;

  auto* snap = app.add_subcommand("snapshot", "density and current profiles at given times");
  common(snap, f);
  snap->add_option("--time", f.times, "time as p/q of the period (repeatable)");
  snap->add_option("--time-real", f.real_times, "time as a real fraction of the period");
  snap->add_option("--detect", f.detect, "comma list: plateaux,cusps,fragments,expectations");

  std::vector<double> xi;
  std::int64_t samples = 200;
  auto* trace = app.add_subcommand("timetrace", "density and current over one period at fixed x");
  common(trace, f);
  trace->add_option("--xi", xi, "position x/a (repeatable)")->required();
  trace->add_option("--samples", samples, "number of time steps per period");

  std::vector<double> verify_lambdas;
  std::string report_path;
  auto* verify = app.add_subcommand("verify", "run the check suite; exit 1 on any failure");
  verify->add_option("--lambda", verify_lambdas, "expansion factors (repeatable)");
  verify->add_option("--epsilon", f.epsilon, "certified truncation error");
  verify->add_option("--out", report_path, "write the JSON report here instead of stdout");

  std::vector<double> scan_lambdas;
  std::string range;
  std::int64_t m = 12;
  std::vector<std::int64_t> ps;
  auto* scan = app.add_subcommand("scan", "peak counts at t = pT/M over a lambda sweep");
  common(scan, f);
  scan->add_option("--lambdas", scan_lambdas, "expansion factors (repeatable)");
  scan->add_option("--lambda-range", range, "lo:hi:step sweep");
  scan->add_option("--M", m, "time denominator");
  scan->add_option("--p", ps, "time numerators (default 1..M/2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto c = to_config(f);
    if (snap->parsed()) {
      well::cmd_snapshot(c, std::cerr);
    } else if (trace->parsed()) {
      c.positions = xi;
      c.samples = samples;
      well::cmd_timetrace(c, std::cerr);
    } else if (verify->parsed()) {
      c.lambdas = verify_lambdas;
      if (report_path.empty()) {
        return well::cmd_verify(c, std::cout);
      }
      std::ofstream os(report_path);
      if (!os) {
        std::cerr << "error: cannot open " << report_path << '\n';
        return 1;
      }
      return well::cmd_verify(c, os);
    } else if (scan->parsed()) {
      c.lambdas = scan_lambdas;
      if (!range.empty()) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || !(step > 0) ||
            hi < lo) {
          throw well::UsageError("--lambda-range expects lo:hi:step");
        }
        for (double l = lo; l <= hi + 1e-9 * step; l += step) {
          c.lambdas.push_back(std::round(l / step) * step);
        }
      }
      c.divisions = m;
      c.numerators = ps;
      well::cmd_scan(c, std::cerr);
    }
  } catch (const well::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const well::ModelError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
