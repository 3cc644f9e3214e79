#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tot {

std::string base64_encode(std::string_view in);
std::string base64_decode(std::string_view in);  // throws std::invalid_argument on bad input

// Shortest round-trip decimal representation (std::to_chars). Byte-stable.
std::string fmt_double(double v);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

bool contains(std::string_view haystack, std::string_view needle);
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

}  // namespace tot
