#include "ccsched/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ccsched/errors.hpp"

namespace ccsched {

namespace {

constexpr std::array<std::string_view, 10> kFields = {
    "scheme", "K", "P_dB", "m", "alpha", "user_id", "gamma", "rate", "rate_stderr", "utility"};

double parse_double(std::string_view text, std::string_view field) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(std::string(field), "not a number: '" + std::string(text) + "'");
  return value;
}

int parse_int(std::string_view text, std::string_view field) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(std::string(field), "not an integer: '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string fixed2(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, ptr);
}

std::string tick_label(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, ptr);
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const ResultTable& table) {
  for (const auto& c : table.comments) out << "# " << c << '\n';
  out << kCsvHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.scheme << ',' << r.K << ',' << format_number(r.P_dB) << ',' << format_number(r.m) << ','
        << format_number(r.alpha) << ',' << r.user_id << ',' << format_number(r.gamma) << ','
        << format_number(r.rate) << ',' << format_number(r.rate_stderr) << ','
        << format_number(r.utility) << '\n';
  }
}

std::string to_csv(const ResultTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

ResultTable parse_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.comments.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw ConfigError("csv", "unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != kFields.size())
      throw ConfigError("csv", "expected 10 columns, got " + std::to_string(cells.size()));
    ResultRow r;
    r.scheme = std::string(cells[0]);
    r.K = parse_int(cells[1], "K");
    r.P_dB = parse_double(cells[2], "P_dB");
    r.m = parse_double(cells[3], "m");
    r.alpha = parse_double(cells[4], "alpha");
    r.user_id = parse_int(cells[5], "user_id");
    r.gamma = parse_double(cells[6], "gamma");
    r.rate = parse_double(cells[7], "rate");
    r.rate_stderr = parse_double(cells[8], "rate_stderr");
    r.utility = parse_double(cells[9], "utility");
    table.rows.push_back(std::move(r));
  }
  if (!header_seen) throw ConfigError("csv", "missing header row");
  return table;
}

ResultTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

double numeric_field(const ResultRow& row, std::string_view field) {
  if (field == "K") return row.K;
  if (field == "P_dB") return row.P_dB;
  if (field == "m") return row.m;
  if (field == "alpha") return row.alpha;
  if (field == "user_id") return row.user_id;
  if (field == "gamma") return row.gamma;
  if (field == "rate") return row.rate;
  if (field == "rate_stderr") return row.rate_stderr;
  if (field == "utility") return row.utility;
  if (field == "scheme") throw ConfigError("scheme", "field is not numeric");
  throw ConfigError(std::string(field), "unknown field");
}

std::string text_field(const ResultRow& row, std::string_view field) {
  if (field == "scheme") return row.scheme;
  if (field == "K") return std::to_string(row.K);
  if (field == "user_id") return std::to_string(row.user_id);
  return format_number(numeric_field(row, field));
}

std::string emit_plot(const std::vector<ResultRow>& rows, std::string_view x, std::string_view y,
                      std::string_view group_by) {
  // Validates all three field names before anything is drawn.
  const ResultRow probe;
  numeric_field(probe, x);
  numeric_field(probe, y);
  text_field(probe, group_by);
  if (rows.empty()) throw ConfigError("plot", "no rows to plot");

  struct Point {
    double x, y;
    std::string x_text, y_text;
  };
  std::map<std::string, std::vector<Point>> groups;
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& r : rows) {
    const double px = numeric_field(r, x);
    const double py = numeric_field(r, y);
    groups[text_field(r, group_by)].push_back({px, py, text_field(r, x), text_field(r, y)});
    x_lo = std::min(x_lo, px);
    x_hi = std::max(x_hi, px);
    y_lo = std::min(y_lo, py);
    y_hi = std::max(y_hi, py);
  }
  if (x_hi == x_lo) {
    x_lo -= 1.0;
    x_hi += 1.0;
  }
  if (y_hi == y_lo) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }

  constexpr double W = 720, H = 440, left = 80, right = 170, top = 30, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double v) { return top + ph - (v - y_lo) / (y_hi - y_lo) * ph; };
  constexpr std::array<std::string_view, 8> palette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                       "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
      << "<g stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\""
      << top + ph << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\"/>\n</g>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tx = x_lo + (x_hi - x_lo) * i / 4.0;
    const double ty = y_lo + (y_hi - y_lo) * i / 4.0;
    svg << "<text x=\"" << fixed2(sx(tx)) << "\" y=\"" << fixed2(top + ph + 18)
        << "\" text-anchor=\"middle\">" << tick_label(tx) << "</text>\n"
        << "<text x=\"" << fixed2(left - 6) << "\" y=\"" << fixed2(sy(ty) + 4)
        << "\" text-anchor=\"end\">" << tick_label(ty) << "</text>\n";
  }
  svg << "<text x=\"" << fixed2(left + pw / 2) << "\" y=\"" << fixed2(H - 15)
      << "\" text-anchor=\"middle\">" << escape_xml(x) << "</text>\n"
      << "<text x=\"20\" y=\"" << fixed2(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << fixed2(top + ph / 2) << ")\">" << escape_xml(y) << "</text>\n";

  std::size_t index = 0;
  for (auto& [name, points] : groups) {
    std::stable_sort(points.begin(), points.end(),
                     [](const Point& a, const Point& b) { return a.x < b.x; });
    const std::string_view color = palette[index % palette.size()];
    svg << "<g class=\"series\" data-group=\"" << escape_xml(name) << "\">\n";
    if (points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) svg << ' ';
        svg << fixed2(sx(points[i].x)) << ',' << fixed2(sy(points[i].y));
      }
      svg << "\"/>\n";
    }
    for (const auto& p : points) {
      svg << "<circle cx=\"" << fixed2(sx(p.x)) << "\" cy=\"" << fixed2(sy(p.y)) << "\" r=\"3\" fill=\""
          << color << "\" data-x=\"" << p.x_text << "\" data-y=\"" << p.y_text << "\"/>\n";
    }
    const double ly = top + 10 + 18.0 * static_cast<double>(index);
    svg << "<line x1=\"" << fixed2(left + pw + 15) << "\" y1=\"" << fixed2(ly) << "\" x2=\""
        << fixed2(left + pw + 35) << "\" y2=\"" << fixed2(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed2(left + pw + 40) << "\" y=\"" << fixed2(ly + 4) << "\">"
        << escape_xml(group_by) << '=' << escape_xml(name) << "</text>\n</g>\n";
    ++index;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ccsched
