#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace clickcast::detail {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

/// Lowercased maximal runs of ASCII alphanumerics.
std::vector<std::string> word_tokens(std::string_view s);

/// Case-insensitive find; returns npos when absent.
std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from = 0);

}  // namespace clickcast::detail
