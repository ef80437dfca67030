#pragma once

// Result tables: CSV emission/parsing and SVG line plots.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ccsched {

struct ResultRow {
  std::string scheme;
  int K = 0;
  double P_dB = 0.0;
  double m = 0.0;
  double alpha = 0.0;
  int user_id = 0;  // 1..K; 0 marks the per-run summary row
  double gamma = 0.0;
  double rate = 0.0;
  double rate_stderr = 0.0;
  double utility = 0.0;

  bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<ResultRow> rows;

  bool operator==(const ResultTable&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "scheme,K,P_dB,m,alpha,user_id,gamma,rate,rate_stderr,utility";

/// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

void write_csv(std::ostream& out, const ResultTable& table);
std::string to_csv(const ResultTable& table);
/// Throws ConfigError on malformed input.
ResultTable parse_csv(std::istream& in);
ResultTable parse_csv(const std::string& text);

/// Numeric value of a named column; throws ConfigError for unknown or
/// non-numeric fields.
double numeric_field(const ResultRow& row, std::string_view field);
/// Column value rendered as text (numbers via format_number).
std::string text_field(const ResultRow& row, std::string_view field);

/// One polyline per distinct `group_by` value (a lone point becomes a
/// marker). Every point also carries its exact CSV values as data attributes.
std::string emit_plot(const std::vector<ResultRow>& rows, std::string_view x, std::string_view y,
                      std::string_view group_by);

}  // namespace ccsched
