#include "well_echo/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace well {

void Table::add_column(const std::string& name, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows()) {
    throw std::invalid_argument("column '" + name + "' has the wrong length");
  }
  names.push_back(name);
  columns.push_back(std::move(values));
}

const std::vector<double>& Table::column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw std::out_of_range("no column '" + name + "'");
  }
  return columns[static_cast<std::size_t>(it - names.begin())];
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_number(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    if (s == "nan") {
      return std::numeric_limits<double>::quiet_NaN();
    }
    if (s == "inf" || s == "-inf") {
      return s[0] == '-' ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
    }
    throw std::runtime_error("malformed number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) {
    out.push_back(cur);
  }
  if (!line.empty() && line.back() == sep) {
    out.emplace_back();
  }
  return out;
}

}  // namespace

void write_csv(std::ostream& os, const Table& table) {
  for (const auto& [k, v] : table.meta) {
    os << "# " << k << ": " << v << '\n';
  }
  for (std::size_t c = 0; c < table.names.size(); ++c) {
    os << (c ? "," : "") << table.names[c];
  }
  if (!table.text_name.empty()) {
    os << (table.names.empty() ? "" : ",") << table.text_name;
  }
  os << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      os << (c ? "," : "") << format_number(table.columns[c][r]);
    }
    if (!table.text_name.empty()) {
      os << (table.columns.empty() ? "" : ",") << table.text[r];
    }
    os << '\n';
  }
}

Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  bool header = false;
  std::size_t n_num = 0;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    if (!header && line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon != std::string::npos) {
        t.add_meta(line.substr(2, colon - 2), line.substr(colon + 2));
      }
      continue;
    }
    if (!header) {
      const auto cols = split(line, ',');
      for (const auto& c : cols) {
        if (c == "flag") {
          t.text_name = c;
        } else {
          t.names.push_back(c);
        }
      }
      n_num = t.names.size();
      t.columns.resize(n_num);
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    for (std::size_t c = 0; c < n_num; ++c) {
      t.columns[c].push_back(parse_number(cells.at(c)));
    }
    if (!t.text_name.empty()) {
      t.text.push_back(cells.size() > n_num ? cells[n_num] : "");
    }
  }
  return t;
}

void write_json(std::ostream& os, const Table& table, const std::string& reports_json) {
  nlohmann::ordered_json j;
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.meta) {
    j["meta"][k] = v;
  }
  j["data"] = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < table.names.size(); ++c) {
    j["data"][table.names[c]] = table.columns[c];
  }
  if (!table.text_name.empty()) {
    j["data"][table.text_name] = table.text;
  }
  if (!reports_json.empty()) {
    j["reports"] = nlohmann::ordered_json::parse(reports_json);
  }
  os << j.dump(1) << '\n';
}

Table read_json(std::istream& is) {
  const auto j = nlohmann::ordered_json::parse(is);
  Table t;
  for (const auto& [k, v] : j.at("meta").items()) {
    t.add_meta(k, v.get<std::string>());
  }
  for (const auto& [k, v] : j.at("data").items()) {
    if (k == "flag") {
      t.text_name = k;
      t.text = v.get<std::vector<std::string>>();
      continue;
    }
    std::vector<double> col;
    for (const auto& x : v) {
      col.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
    }
    t.add_column(k, std::move(col));
  }
  return t;
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round numbers for tick labels.
std::vector<double> ticks(double lo, double hi, int target) {
  const double span = hi - lo;
  if (!(span > 0.0)) {
    return {lo};
  }
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (f * mag >= raw) {
      step = f * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return out;
}

}  // namespace

void write_svg(std::ostream& os, const PlotSpec& plot) {
  constexpr double W = 720, H = 450, L = 70, R = 160, T = 40, B = 55;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& c : plot.curves) {
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) {
        continue;
      }
      xlo = std::min(xlo, c.x[i]);
      xhi = std::max(xhi, c.x[i]);
      ylo = std::min(ylo, c.y[i]);
      yhi = std::max(yhi, c.y[i]);
    }
  }
  if (!std::isfinite(xlo)) {
    xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  }
  if (yhi - ylo < 1e-12) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  const double pad = 0.05 * (yhi - ylo);
  ylo -= pad;
  yhi += pad;
  auto px = [&](double x) { return L + (x - xlo) / (xhi - xlo) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ylo) / (yhi - ylo) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  os << std::setprecision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"15\">" << escape_xml(plot.title) << "</text>\n"
     << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const double t : ticks(xlo, xhi, 8)) {
    os << "<line x1=\"" << px(t) << "\" y1=\"" << H - B << "\" x2=\"" << px(t) << "\" y2=\""
       << H - B + 5 << "\" stroke=\"black\"/>"
       << "<text x=\"" << px(t) << "\" y=\"" << H - B + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << t
       << "</text>\n";
  }
  for (const double t : ticks(ylo, yhi, 6)) {
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << L << "\" y2=\"" << py(t)
       << "\" stroke=\"black\"/>"
       << "<text x=\"" << L - 8 << "\" y=\"" << py(t) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << t
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << escape_xml(plot.x_label) << "</text>\n"
     << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 " << (T + H - B) / 2
     << ")\">" << escape_xml(plot.y_label) << "</text>\n";
  for (std::size_t k = 0; k < plot.curves.size(); ++k) {
    const auto& c = plot.curves[k];
    const char* color = colors[k % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (std::isfinite(c.x[i]) && std::isfinite(c.y[i])) {
        os << px(c.x[i]) << ',' << py(c.y[i]) << ' ';
      }
    }
    os << "\"/>\n";
    const double ly = T + 14 + 18 * static_cast<double>(k);
    os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 32
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>"
       << "<text x=\"" << W - R + 38 << "\" y=\"" << ly
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(c.label) << "</text>\n";
  }
  os << "</svg>\n";
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  fn(os);
  os.flush();
  if (!os) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

}  // namespace well
