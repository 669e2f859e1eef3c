#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace anycap::strings {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool istarts_with(std::string_view s, std::string_view prefix);
bool is_blank(std::string_view s);
/// Splits on '\n'; a trailing '\r' is stripped from each line.
std::vector<std::string_view> lines(std::string_view s);
std::vector<std::string_view> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace anycap::strings
