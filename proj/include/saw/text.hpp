#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace saw {

// Byte-level helpers shared by tokenization, normalization, and parsing.
// All operate on UTF-8 byte strings; case folding is ASCII-only.

bool is_space_byte(char c);

std::string trim(std::string_view s);

// Collapses every run of whitespace (space, tab, newline, ...) to one space.
// Does not trim; combine with trim() for field normalization.
std::string collapse_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Splits on '\n'; a trailing newline does not produce an empty final line.
std::vector<std::string> split_lines(std::string_view s);

// Splits on any whitespace run; never yields empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

}  // namespace saw
