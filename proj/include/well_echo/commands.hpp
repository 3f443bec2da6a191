#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "well_echo/evolution.hpp"
#include "well_echo/model.hpp"

namespace well {

/// Bad flags or values; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json, svg };

Format parse_format(const std::string& s);
std::string extension(Format f);

struct Detectors {
  bool plateaux = false;
  bool cusps = false;
  bool fragments = false;
  bool expectations = false;
};

/// Parses a comma list of plateaux,cusps,fragments,expectations.
Detectors parse_detectors(const std::string& list);

struct RunConfig {
  double lambda = 1.5;
  std::vector<TimeSpec> times;
  std::int64_t grid = 1200;
  double epsilon = 1e-6;
  Format format = Format::csv;
  std::string out = "well_echo";
  Detectors detect;
  Smoothing smoothing = Smoothing::none;

  // timetrace
  std::vector<double> positions;
  std::int64_t samples = 200;

  // scan
  std::vector<double> lambdas;
  std::int64_t divisions = 12;  // M
  std::vector<std::int64_t> numerators;
};

/// Checks the config against the model preconditions; throws UsageError.
void validate(const RunConfig& config);

/// Output file name for run `index` of `count`: `out` itself for a single
/// output, otherwise `<stem>_<label>.<ext>`.
std::string output_path(const std::string& out, Format format, const std::string& label,
                        std::size_t count);

/// Density and current snapshots, one CSV/JSON file per time or one SVG
/// with every time. Returns the files written.
std::vector<std::string> cmd_snapshot(const RunConfig& config, std::ostream& log);

/// rho and j at fixed positions over tau = k / samples, with the
/// tau -> 1 - tau and (xi, tau) -> (lambda - xi, 1/2 - tau) partner columns.
std::vector<std::string> cmd_timetrace(const RunConfig& config, std::ostream& log);

/// Full check suite over `config.lambdas` (default 1.5, 2.5, 3, 5.5, 8).
/// Writes a JSON report to `report`; returns 0 when every check passes, 1 otherwise.
int cmd_verify(const RunConfig& config, std::ostream& report);

/// Peak counts and plateaux at tau = p / M over the lambda sweep, plus a
/// threshold estimate. Returns the files written.
std::vector<std::string> cmd_scan(const RunConfig& config, std::ostream& log);

}  // namespace well
