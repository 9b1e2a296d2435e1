#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace factmine {

// Decodes UTF-8 into Unicode scalar values. Malformed bytes become U+FFFD.
std::u32string utf8_decode(std::string_view s);

std::string utf8_encode(std::u32string_view cps);
std::string utf8_encode_one(char32_t cp);

// ASCII whitespace plus the ideographic space U+3000.
bool is_space_char(char32_t cp);

std::string trim(std::string_view s);

// Splits on a single separator character, keeping empty fields.
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace factmine
