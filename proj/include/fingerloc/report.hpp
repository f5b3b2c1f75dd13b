#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fingerloc {

// Empirical CDF of per-sample errors. Points are (error, fraction of samples
// with error <= it) at each distinct error value, so the error column is
// strictly increasing and the last fraction is exactly 1.
struct ErrorCdf {
  std::vector<std::pair<double, double>> points;

  static ErrorCdf from_errors(std::span<const double> errors);
  void write_csv(std::ostream& out) const;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace fingerloc
