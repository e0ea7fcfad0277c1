#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rfsearch {

// Tag literals of the structured completion format.
inline constexpr std::string_view kThinkingOpen = "<thinking>";
inline constexpr std::string_view kThinkingClose = "</thinking>";
inline constexpr std::string_view kSolutionOpen = "<solution>";
inline constexpr std::string_view kSolutionClose = "</solution>";

std::string trim(std::string_view s);

// Removes every ASCII whitespace character.
std::string strip_all_whitespace(std::string_view s);

std::string strip_commas(std::string_view s);

// Full-string numeric parse after trimming; nullopt unless the whole token is
// a finite decimal number.
std::optional<double> parse_number(std::string_view s);

// Canonical decimal rendering: integers without a point, otherwise up to six
// fractional digits with trailing zeros removed.
std::string format_number(double v);

// Trailing-zero-trimmed fixed formatting with at most `max_decimals` digits.
std::string format_metric(double v, int max_decimals = 3);

std::size_t count_occurrences(std::string_view text, std::string_view needle);

// First span strictly between open/close, or nullopt when not properly paired.
std::optional<std::string> between_tags(std::string_view text, std::string_view open,
                                        std::string_view close);

// Splits on runs of '\n' and drops lines that trim to empty.
std::vector<std::string> nonempty_lines(std::string_view block);

std::vector<std::string> split_whitespace(std::string_view s);

}  // namespace rfsearch
