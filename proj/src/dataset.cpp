#include "fingerloc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fingerloc/error.hpp"
#include "fingerloc/report.hpp"
#include "fingerloc/rng.hpp"

namespace fingerloc {
namespace {

using nlohmann::json;

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos
                                                ? std::string_view::npos
                                                : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
    fields.emplace_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Reads lines, stripping '\r'. Returns false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& number) {
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty()) return true;
  }
  return false;
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ",";
    s += parts[i];
  }
  return s;
}

double parse_rssi(const std::string& field, std::size_t line,
                  const std::string& beacon) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  const auto result = std::from_chars(field.data(), end, value);
  if (field.empty() || result.ec != std::errc() || result.ptr != end) {
    throw RowError(line, "beacon " + beacon + ": '" + field + "' is not a number");
  }
  if (!(value >= kNoSignal && value <= 0.0)) {
    throw RowError(line, "beacon " + beacon + ": RSSI " + field +
                             " outside [-200, 0]");
  }
  return value;
}

void check_header(const std::vector<std::string>& header,
                  const std::vector<std::string>& expected) {
  if (header != expected) {
    throw DataError("schema mismatch: expected header '" + join(expected) +
                    "', got '" + join(header) + "'");
  }
}

std::vector<std::string> beacon_columns(const BeaconLayout& layout) {
  std::vector<std::string> ids;
  for (const Beacon& b : layout.beacons()) ids.push_back(b.id);
  return ids;
}

}  // namespace

// ---------------------------------------------------------------------------
// BeaconLayout

BeaconLayout::BeaconLayout(std::vector<Beacon> beacons, double cell_feet)
    : beacons_(std::move(beacons)), cell_feet_(cell_feet) {
  if (!(cell_feet_ > 0.0)) throw ConfigError("layout: cell_feet must be positive");
  std::set<std::string> seen;
  for (const Beacon& b : beacons_) {
    if (b.id.empty()) throw ConfigError("layout: empty beacon id");
    if (!seen.insert(b.id).second) {
      throw ConfigError("layout: duplicate beacon id '" + b.id + "'");
    }
    if (!(b.x >= 0.0 && b.x < kGridSize && b.y >= 0.0 && b.y < kGridSize)) {
      throw ConfigError("layout: beacon '" + b.id +
                        "' lies outside the 25 x 25 grid");
    }
  }
}

BeaconLayout BeaconLayout::from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.contains("grid")) {
      const auto grid = doc.at("grid").get<std::vector<int>>();
      if (grid != std::vector<int>{kGridSize, kGridSize}) {
        throw ConfigError("layout: only a 25 x 25 grid is supported");
      }
    }
    std::vector<Beacon> beacons;
    for (const json& b : doc.at("beacons")) {
      beacons.push_back({b.at("id").get<std::string>(), b.at("x").get<double>(),
                         b.at("y").get<double>()});
    }
    return BeaconLayout(std::move(beacons), doc.value("cell_feet", 10.0));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("layout: ") + e.what());
  }
}

BeaconLayout BeaconLayout::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("layout: cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return from_json(text.str());
}

std::string BeaconLayout::to_json() const {
  json doc;
  doc["grid"] = {kGridSize, kGridSize};
  doc["cell_feet"] = cell_feet_;
  doc["beacons"] = json::array();
  for (const Beacon& b : beacons_) {
    doc["beacons"].push_back({{"id", b.id}, {"x", b.x}, {"y", b.y}});
  }
  return doc.dump(2) + "\n";
}

BeaconLayout BeaconLayout::default_layout() {
  return BeaconLayout({{"b3001", 3, 9},
                       {"b3002", 7, 4},
                       {"b3003", 7, 12},
                       {"b3004", 11, 3},
                       {"b3005", 11, 8},
                       {"b3006", 11, 14},
                       {"b3007", 15, 4},
                       {"b3008", 15, 10},
                       {"b3009", 15, 16},
                       {"b3010", 19, 3},
                       {"b3011", 19, 9},
                       {"b3012", 19, 15},
                       {"b3013", 22, 10}},
                      10.0);
}

std::optional<std::size_t> BeaconLayout::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < beacons_.size(); ++i) {
    if (beacons_[i].id == id) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Labels

bool has_signal(std::span<const double> rssi) {
  return std::any_of(rssi.begin(), rssi.end(),
                     [](double v) { return v > kNoSignal; });
}

GridPoint decode_location_label(std::string_view label) {
  if (label.size() < 2 || label[0] < 'A' || label[0] > 'Y') {
    throw DataError("malformed location label '" + std::string(label) + "'");
  }
  int row = 0;
  const char* begin = label.data() + 1;
  const char* end = label.data() + label.size();
  const auto result = std::from_chars(begin, end, row);
  if (result.ec != std::errc() || result.ptr != end || *begin == '-' ||
      *begin == '+' || row >= kGridSize) {
    throw DataError("malformed location label '" + std::string(label) + "'");
  }
  return {static_cast<double>(label[0] - 'A'), static_cast<double>(row)};
}

std::string encode_location_label(int x, int y) {
  if (x < 0 || x >= kGridSize || y < 0 || y >= kGridSize) {
    throw DataError("location (" + std::to_string(x) + ", " + std::to_string(y) +
                    ") outside the grid");
  }
  std::string label(1, static_cast<char>('A' + x));
  if (y < 10) label += '0';
  label += std::to_string(y);
  return label;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<LabelledSample> parse_labelled_csv(std::istream& in,
                                               const BeaconLayout& layout) {
  std::string line;
  std::size_t number = 0;
  if (!next_line(in, line, number)) throw DataError("labelled CSV: missing header");
  std::vector<std::string> expected{"location", "date"};
  for (const std::string& id : beacon_columns(layout)) expected.push_back(id);
  std::vector<std::string> header = split_fields(line);
  // Augmented files carry a trailing provenance column; it is not a feature.
  const bool source_column = !header.empty() && header.back() == "source";
  if (source_column) header.pop_back();
  check_header(header, expected);
  if (source_column) expected.emplace_back("source");

  std::vector<LabelledSample> samples;
  while (next_line(in, line, number)) {
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != expected.size()) {
      throw RowError(number, "schema mismatch: expected " +
                                 std::to_string(expected.size()) + " columns, got " +
                                 std::to_string(fields.size()));
    }
    LabelledSample s;
    try {
      s.location = decode_location_label(fields[0]);
    } catch (const DataError& e) {
      throw RowError(number, e.what());
    }
    s.label = fields[0];
    s.timestamp = fields[1];
    s.rssi.reserve(layout.size());
    for (std::size_t b = 0; b < layout.size(); ++b) {
      s.rssi.push_back(parse_rssi(fields[b + 2], number, layout.beacons()[b].id));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<UnlabelledSample> parse_unlabelled_csv(std::istream& in,
                                                   const BeaconLayout& layout) {
  std::string line;
  std::size_t number = 0;
  if (!next_line(in, line, number)) throw DataError("unlabelled CSV: missing header");
  std::vector<std::string> expected{"date"};
  for (const std::string& id : beacon_columns(layout)) expected.push_back(id);
  std::vector<std::string> header = split_fields(line);
  const bool location_column = !header.empty() && header[0] == "location";
  if (location_column) header.erase(header.begin());
  check_header(header, expected);

  const std::size_t offset = location_column ? 1 : 0;
  std::vector<UnlabelledSample> samples;
  while (next_line(in, line, number)) {
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != expected.size() + offset) {
      throw RowError(number, "schema mismatch: expected " +
                                 std::to_string(expected.size() + offset) +
                                 " columns, got " + std::to_string(fields.size()));
    }
    if (location_column && !fields[0].empty() && fields[0] != "?") {
      throw RowError(number, "unlabelled row carries a location '" + fields[0] + "'");
    }
    UnlabelledSample s;
    s.timestamp = fields[offset];
    s.rssi.reserve(layout.size());
    for (std::size_t b = 0; b < layout.size(); ++b) {
      s.rssi.push_back(
          parse_rssi(fields[offset + 1 + b], number, layout.beacons()[b].id));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<LabelledSample> read_labelled_csv(const std::string& path,
                                              const BeaconLayout& layout) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read labelled data '" + path + "'");
  return parse_labelled_csv(in, layout);
}

std::vector<UnlabelledSample> read_unlabelled_csv(const std::string& path,
                                                  const BeaconLayout& layout) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read unlabelled data '" + path + "'");
  return parse_unlabelled_csv(in, layout);
}

void write_labelled_csv(std::ostream& out, std::span<const LabelledSample> samples,
                        const BeaconLayout& layout,
                        std::span<const std::string> sources) {
  if (!sources.empty() && sources.size() != samples.size()) {
    throw DataError("labelled CSV: one source per sample required");
  }
  out << "location,date";
  for (const Beacon& b : layout.beacons()) out << ',' << b.id;
  if (!sources.empty()) out << ",source";
  out << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const LabelledSample& s = samples[i];
    out << s.label << ',' << s.timestamp;
    for (double v : s.rssi) out << ',' << format_double(v);
    if (!sources.empty()) out << ',' << sources[i];
    out << '\n';
  }
}

void write_unlabelled_csv(std::ostream& out,
                          std::span<const UnlabelledSample> samples,
                          const BeaconLayout& layout) {
  out << "date";
  for (const Beacon& b : layout.beacons()) out << ',' << b.id;
  out << '\n';
  for (const UnlabelledSample& s : samples) {
    out << s.timestamp;
    for (double v : s.rssi) out << ',' << format_double(v);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Split, histogram

SplitIndices split_indices(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw ConfigError("split ratio must lie in [0, 1]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(std::span<std::size_t>(order));
  // The epsilon absorbs representation error such as 0.8 * 1420.
  const auto cut = std::min(
      n, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9)));
  SplitIndices idx;
  idx.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  idx.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  return idx;
}

Cell cell_of(const GridPoint& point) {
  auto clamp = [](double v) {
    return std::clamp(static_cast<int>(std::floor(v)), 0, kGridSize - 1);
  };
  return {clamp(point.x), clamp(point.y)};
}

std::size_t Histogram::total() const {
  std::size_t sum = 0;
  for (const auto& column : counts_)
    for (int c : column) sum += static_cast<std::size_t>(c);
  return sum;
}

Histogram sample_histogram(std::span<const LabelledSample> samples) {
  Histogram h;
  for (const LabelledSample& s : samples) {
    const Cell c = cell_of(s.location);
    ++h.at(c.x, c.y);
  }
  return h;
}

std::vector<CellSamples> find_underrepresented(
    std::span<const LabelledSample> samples, int threshold) {
  if (threshold < 1) throw ConfigError("under-representation threshold must be >= 1");
  std::map<Cell, std::vector<LabelledSample>> by_cell;
  for (const LabelledSample& s : samples) by_cell[cell_of(s.location)].push_back(s);
  std::vector<CellSamples> out;
  for (auto& [cell, group] : by_cell) {
    if (static_cast<int>(group.size()) < threshold) {
      out.push_back({cell, std::move(group)});
    }
  }
  return out;
}

}  // namespace fingerloc
