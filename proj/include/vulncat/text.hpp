#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vulncat {

/// Strips leading/trailing whitespace and collapses internal runs to one space.
std::string normalize_whitespace(std::string_view text);

std::string_view trim(std::string_view text);

/// Levenshtein distance (unit cost insert, delete, substitute).
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Splits on `separator` at parenthesis depth zero. Pieces are trimmed.
/// Returns nullopt when the parentheses are unbalanced.
std::optional<std::vector<std::string>> split_top_level(std::string_view text, char separator);

std::string join(const std::vector<std::string>& parts, std::string_view glue);

}  // namespace vulncat
