#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fingerloc::detail {

std::string base64_encode(std::string_view bytes);
// nullopt on characters outside the standard alphabet or bad padding.
std::optional<std::string> base64_decode(std::string_view text);

}  // namespace fingerloc::detail
