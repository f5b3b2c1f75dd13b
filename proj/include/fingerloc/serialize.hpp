#pragma once

#include <string>
#include <string_view>

#include "fingerloc/network.hpp"

namespace fingerloc {

inline constexpr int kNetworkFormatVersion = 1;

// Text form: one JSON line (layer specs, parameters as base64 little-endian
// doubles) followed by "sha256 <hex>\n" over the JSON line's bytes.
std::string save_network(const Network& network);

// Throws DataError if the text does not match what save_network writes.
Network load_network(std::string_view bytes);

}  // namespace fingerloc
