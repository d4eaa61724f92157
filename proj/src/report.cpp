#include "aggmarket/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aggmarket {

std::size_t Column::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

ExperimentReport& ExperimentReport::add_numbers(std::string name,
                                                NumberColumn values) {
  columns.push_back({std::move(name), std::move(values)});
  return *this;
}

ExperimentReport& ExperimentReport::add_text(std::string name,
                                             TextColumn values) {
  columns.push_back({std::move(name), std::move(values)});
  return *this;
}

ExperimentReport& ExperimentReport::add_cells(std::string name,
                                              CellColumn values) {
  columns.push_back({std::move(name), std::move(values)});
  return *this;
}

const Column* ExperimentReport::find(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void ExperimentReport::validate() const {
  for (const auto& c : columns) {
    if (c.size() != rows()) {
      fail(Errc::DimensionMismatch, "column " + c.name + " has ragged length");
    }
  }
}

EmitFormat format_from_string(const std::string& s) {
  if (s == "csv") return EmitFormat::Csv;
  if (s == "json") return EmitFormat::Json;
  if (s == "svg") return EmitFormat::Svg;
  fail(Errc::InvalidSpec, "unknown format '" + s + "' (csv|json|svg)");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const ExperimentReport& report) {
  report.validate();
  std::string out;
  for (const auto& [k, v] : report.metadata) {
    out += "# " + k + "=" + v + "\n";
  }
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    if (c) out += ",";
    out += report.columns[c].name;
  }
  out += "\n";
  for (std::size_t r = 0; r < report.rows(); ++r) {
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      if (c) out += ",";
      const auto& data = report.columns[c].data;
      if (const auto* nums = std::get_if<NumberColumn>(&data)) {
        out += format_double((*nums)[r]);
      } else if (const auto* text = std::get_if<TextColumn>(&data)) {
        out += (*text)[r];
      } else {
        const auto& cell = std::get<CellColumn>(data)[r];
        if (cell) out += format_double(*cell);  // abstain -> empty field
      }
    }
    out += "\n";
  }
  return out;
}

std::string to_json_text(const ExperimentReport& report) {
  report.validate();
  nlohmann::json j;
  j["name"] = report.name;
  j["metadata"] = report.metadata;
  j["columns"] = nlohmann::json::array();
  for (const auto& col : report.columns) {
    nlohmann::json c;
    c["name"] = col.name;
    if (const auto* nums = std::get_if<NumberColumn>(&col.data)) {
      c["kind"] = "number";
      c["values"] = *nums;
    } else if (const auto* text = std::get_if<TextColumn>(&col.data)) {
      c["kind"] = "text";
      c["values"] = *text;
    } else {
      c["kind"] = "cell";
      auto values = nlohmann::json::array();
      for (const auto& v : std::get<CellColumn>(col.data)) {
        if (v) values.push_back(*v); else values.push_back(nullptr);
      }
      c["values"] = std::move(values);
    }
    j["columns"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::Parse, "malformed report json");
  ExperimentReport report;
  try {
    report.name = j.at("name").get<std::string>();
    for (auto it = j.at("metadata").begin(); it != j.at("metadata").end(); ++it) {
      report.metadata[it.key()] = it.value().get<std::string>();
    }
    for (const auto& c : j.at("columns")) {
      std::string kind = c.at("kind").get<std::string>();
      std::string name = c.at("name").get<std::string>();
      if (kind == "number") {
        report.add_numbers(name, c.at("values").get<NumberColumn>());
      } else if (kind == "text") {
        report.add_text(name, c.at("values").get<TextColumn>());
      } else if (kind == "cell") {
        CellColumn col;
        for (const auto& v : c.at("values")) {
          col.push_back(v.is_null() ? Cell{} : Cell{v.get<double>()});
        }
        report.add_cells(name, std::move(col));
      } else {
        fail(Errc::Parse, "unknown column kind " + kind);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Parse, std::string("report json: ") + e.what());
  }
  report.validate();
  return report;
}

namespace {

constexpr double kWidth = 860, kHeight = 540;
constexpr double kLeft = 70, kRight = 690, kTop = 45, kBottom = 495;

const char* kPalette[10] = {"#1f6fb4", "#d95532", "#3c9e4d", "#8c5bb0",
                            "#c7a42a", "#3ab0bf", "#d36ba4", "#6b7280",
                            "#7f5539", "#274c77"};

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Series {
  std::string name;
  std::vector<std::optional<double>> values;
};

std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  if (!(hi > lo)) hi = lo + 1.0;
  double raw = (hi - lo) / target;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  double first = std::ceil(lo / step) * step;
  for (double v = first; v <= hi + step * 1e-9; v += step) {
    ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  }
  return ticks;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string to_svg(const ExperimentReport& report) {
  report.validate();
  std::string chart = "line";
  if (auto it = report.metadata.find("chart"); it != report.metadata.end()) {
    chart = it->second;
  }
  bool log_x = false;
  if (auto it = report.metadata.find("x_scale"); it != report.metadata.end()) {
    log_x = it->second == "log";
  }

  // x data: the named x column, else the first numeric column (bar charts
  // use the first text column as categories).
  std::string x_name;
  if (auto it = report.metadata.find("x"); it != report.metadata.end()) {
    x_name = it->second;
  }
  const Column* x_col = nullptr;
  std::vector<std::string> categories;
  for (const auto& c : report.columns) {
    bool is_text = std::holds_alternative<TextColumn>(c.data);
    if (!x_name.empty() ? c.name == x_name : (chart == "bar" ? is_text : !is_text)) {
      x_col = &c;
      break;
    }
  }
  if (!x_col && !report.columns.empty()) x_col = &report.columns[0];

  std::vector<std::string> wanted;
  if (auto it = report.metadata.find("svg_series"); it != report.metadata.end()) {
    std::string cur;
    for (char ch : it->second + ",") {
      if (ch == ',') {
        if (!cur.empty()) wanted.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
  }
  std::vector<Series> series;
  for (const auto& c : report.columns) {
    if (&c == x_col) continue;
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) {
      continue;
    }
    if (const auto* nums = std::get_if<NumberColumn>(&c.data)) {
      Series s{c.name, {}};
      for (double v : *nums) s.values.emplace_back(v);
      series.push_back(std::move(s));
    } else if (const auto* cells = std::get_if<CellColumn>(&c.data)) {
      Series s{c.name, {}};
      for (const auto& v : *cells) s.values.push_back(v);
      series.push_back(std::move(s));
    }
  }

  std::vector<double> xs;
  if (chart == "bar") {
    if (x_col) {
      if (const auto* text = std::get_if<TextColumn>(&x_col->data)) {
        categories = *text;
      }
    }
    for (std::size_t i = 0; i < report.rows(); ++i) {
      xs.push_back(static_cast<double>(i));
    }
  } else if (x_col) {
    if (const auto* nums = std::get_if<NumberColumn>(&x_col->data)) {
      for (double v : *nums) xs.push_back(log_x ? std::log10(v) : v);
    }
  }

  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (!xs.empty()) {
    x_lo = *std::min_element(xs.begin(), xs.end());
    x_hi = *std::max_element(xs.begin(), xs.end());
  }
  bool first_y = true;
  for (const auto& s : series) {
    for (const auto& v : s.values) {
      if (!v || std::isnan(*v)) continue;
      y_lo = first_y ? *v : std::min(y_lo, *v);
      y_hi = first_y ? *v : std::max(y_hi, *v);
      first_y = false;
    }
  }
  if (chart == "bar") y_lo = std::min(y_lo, 0.0);
  if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
  if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
  double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  auto sx = [&](double x) {
    return kLeft + (x - x_lo) / (x_hi - x_lo) * (kRight - kLeft);
  };
  auto sy = [&](double y) {
    return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"16\">" << escape_xml(report.name) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << kRight - kLeft << "\" height=\"" << kBottom - kTop
      << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // y ticks and grid
  for (double tick : nice_ticks(y_lo, y_hi)) {
    double y = sy(tick);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << px(y) << "\" x2=\"" << kRight
        << "\" y2=\"" << px(y) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << px(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_double(tick) << "</text>\n";
  }
  // x ticks
  if (chart == "bar") {
    for (std::size_t i = 0; i < categories.size(); ++i) {
      double x = kLeft + (static_cast<double>(i) + 0.5) / categories.size() *
                             (kRight - kLeft);
      svg << "<text x=\"" << px(x) << "\" y=\"" << kBottom + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\">" << escape_xml(categories[i]) << "</text>\n";
    }
  } else if (log_x) {
    for (int d = static_cast<int>(std::ceil(x_lo)); d <= std::floor(x_hi); ++d) {
      double x = sx(d);
      svg << "<line x1=\"" << px(x) << "\" y1=\"" << kTop << "\" x2=\""
          << px(x) << "\" y2=\"" << kBottom << "\" stroke=\"#eee\"/>\n";
      svg << "<text x=\"" << px(x) << "\" y=\"" << kBottom + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\">1e" << d << "</text>\n";
    }
  } else {
    for (double tick : nice_ticks(x_lo, x_hi)) {
      double x = sx(tick);
      svg << "<text x=\"" << px(x) << "\" y=\"" << kBottom + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\">" << format_double(tick) << "</text>\n";
    }
  }
  // axis labels
  std::string xlabel = chart == "bar" ? (x_col ? x_col->name : "")
                                      : (x_col ? x_col->name : "index");
  std::string ylabel;
  if (auto it = report.metadata.find("ylabel"); it != report.metadata.end()) {
    ylabel = it->second;
  }
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" << escape_xml(xlabel) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (kTop + kBottom) / 2
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 " << (kTop + kBottom) / 2 << ")\" "
         "text-anchor=\"middle\">" << escape_xml(ylabel) << "</text>\n";

  // series
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % 10];
    if (chart == "bar") {
      std::size_t n_rows = report.rows();
      double group = (kRight - kLeft) / std::max<std::size_t>(n_rows, 1);
      double bar = group / (series.size() + 1);
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& v = series[s].values[r];
        if (!v || std::isnan(*v)) continue;
        double x = kLeft + group * r + bar * (s + 0.5);
        double y0 = sy(std::max(0.0, y_lo));
        double y1 = sy(*v);
        svg << "<rect x=\"" << px(x) << "\" y=\"" << px(std::min(y0, y1))
            << "\" width=\"" << px(bar * 0.9) << "\" height=\""
            << px(std::abs(y0 - y1)) << "\" fill=\"" << color << "\"/>\n";
      }
    } else if (chart == "scatter") {
      for (std::size_t r = 0; r < series[s].values.size() && r < xs.size(); ++r) {
        const auto& v = series[s].values[r];
        if (!v || std::isnan(*v)) continue;
        svg << "<circle cx=\"" << px(sx(xs[r])) << "\" cy=\"" << px(sy(*v))
            << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
      }
    } else {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\" points=\"";
      for (std::size_t r = 0; r < series[s].values.size() && r < xs.size(); ++r) {
        const auto& v = series[s].values[r];
        if (!v || std::isnan(*v)) continue;
        svg << px(sx(xs[r])) << "," << px(sy(*v)) << " ";
      }
      svg << "\"/>\n";
    }
    double ly = kTop + 16.0 * (s + 1);
    svg << "<rect x=\"" << kRight + 10 << "\" y=\"" << px(ly - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << kRight + 24 << "\" y=\"" << px(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape_xml(series[s].name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit(const ExperimentReport& report, EmitFormat format,
          const std::filesystem::path& path) {
  std::string payload;
  switch (format) {
    case EmitFormat::Csv: payload = to_csv(report); break;
    case EmitFormat::Json: payload = to_json_text(report); break;
    case EmitFormat::Svg: payload = to_svg(report); break;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write " + path.string());
  out << payload;
  if (!out) fail(Errc::Io, "write failed for " + path.string());
}

}  // namespace aggmarket
