#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fingerloc {

inline constexpr double kNoSignal = -200.0;
inline constexpr int kGridSize = 25;

struct GridPoint {
  double x = 0.0;  // column
  double y = 0.0;  // row

  bool operator==(const GridPoint&) const = default;
};

struct Beacon {
  std::string id;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Beacon&) const = default;
};

// Ordered beacon set with floor coordinates in grid units.
class BeaconLayout {
 public:
  BeaconLayout() = default;
  // Throws ConfigError on duplicate ids or coordinates outside [0, 25).
  explicit BeaconLayout(std::vector<Beacon> beacons, double cell_feet = 10.0);

  static BeaconLayout from_json(std::string_view text);
  static BeaconLayout load(const std::string& path);
  std::string to_json() const;

  // Thirteen beacons spread over the 25 x 25 floor grid. Same content as
  // data/layout_default.json.
  static BeaconLayout default_layout();

  const std::vector<Beacon>& beacons() const { return beacons_; }
  std::size_t size() const { return beacons_.size(); }
  double cell_feet() const { return cell_feet_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  bool operator==(const BeaconLayout&) const = default;

 private:
  std::vector<Beacon> beacons_;
  double cell_feet_ = 10.0;
};

using RssiVector = std::vector<double>;

struct LabelledSample {
  RssiVector rssi;
  GridPoint location;
  std::string label;
  std::string timestamp;

  bool operator==(const LabelledSample&) const = default;
};

struct UnlabelledSample {
  RssiVector rssi;
  std::string timestamp;

  bool operator==(const UnlabelledSample&) const = default;
};

struct Dataset {
  BeaconLayout layout;
  std::vector<LabelledSample> labelled;
  std::vector<UnlabelledSample> unlabelled;
};

// True if any beacon reads above the no-signal value.
bool has_signal(std::span<const double> rssi);

// "O02" -> (14, 2): the letter A..Y picks the column, the digits the row.
// Throws DataError on malformed labels.
GridPoint decode_location_label(std::string_view label);
std::string encode_location_label(int x, int y);

// CSV readers. The header must be exactly `location,date,<beacon ids>` for
// labelled data and `date,<beacon ids>` for unlabelled data, beacon ids in
// layout order. A labelled file may end with a `source` column, which is
// ignored. An unlabelled file may carry a leading `location` column whose
// values are all empty or "?". Throws DataError / RowError.
std::vector<LabelledSample> parse_labelled_csv(std::istream& in,
                                               const BeaconLayout& layout);
std::vector<UnlabelledSample> parse_unlabelled_csv(std::istream& in,
                                                   const BeaconLayout& layout);

std::vector<LabelledSample> read_labelled_csv(const std::string& path,
                                              const BeaconLayout& layout);
std::vector<UnlabelledSample> read_unlabelled_csv(const std::string& path,
                                                  const BeaconLayout& layout);

// Writers. If `sources` is non-empty a trailing `source` column is added.
void write_labelled_csv(std::ostream& out, std::span<const LabelledSample> samples,
                        const BeaconLayout& layout,
                        std::span<const std::string> sources = {});
void write_unlabelled_csv(std::ostream& out,
                          std::span<const UnlabelledSample> samples,
                          const BeaconLayout& layout);

// Seeded shuffle, then the first floor(ratio * n) indices go to training.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
SplitIndices split_indices(std::size_t n, double ratio, std::uint64_t seed);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(std::span<const T> items,
                                                double ratio,
                                                std::uint64_t seed) {
  const SplitIndices idx = split_indices(items.size(), ratio, seed);
  std::pair<std::vector<T>, std::vector<T>> parts;
  parts.first.reserve(idx.train.size());
  parts.second.reserve(idx.test.size());
  for (std::size_t i : idx.train) parts.first.push_back(items[i]);
  for (std::size_t i : idx.test) parts.second.push_back(items[i]);
  return parts;
}

struct Cell {
  int x = 0;
  int y = 0;

  auto operator<=>(const Cell&) const = default;
};

Cell cell_of(const GridPoint& point);

// Per-cell sample counts, indexed [x][y].
class Histogram {
 public:
  int count(int x, int y) const { return counts_[x][y]; }
  int& at(int x, int y) { return counts_[x][y]; }
  std::size_t total() const;

 private:
  std::array<std::array<int, kGridSize>, kGridSize> counts_{};
};

Histogram sample_histogram(std::span<const LabelledSample> samples);

struct CellSamples {
  Cell cell;
  std::vector<LabelledSample> samples;  // dataset order
};

// Cells with at least one and fewer than `threshold` samples, ordered by
// (x, y).
std::vector<CellSamples> find_underrepresented(
    std::span<const LabelledSample> samples, int threshold);

}  // namespace fingerloc
