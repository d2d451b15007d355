#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hokcm::utf8 {

/// Decodes UTF-8 into code points. Throws hokcm::Error on malformed input.
std::u32string decode(std::string_view text);

std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);

/// Splits text into one UTF-8 string per code point.
std::vector<std::string> split_chars(std::string_view text);

/// Number of code points.
std::size_t length(std::string_view text);

bool is_space(char32_t cp);
bool is_digit(char32_t cp);
bool is_punct(char32_t cp);
/// Letters that can appear in romanized Hokkien (Tai-lo/POJ), including ⁿ.
bool is_latin_letter(char32_t cp);
/// Combining diacritics (tone marks) used by romanized Hokkien.
bool is_combining(char32_t cp);
bool is_roman_numeral(char32_t cp);
bool is_han(char32_t cp);

/// Punctuation, digits and whitespace carry no language.
inline bool is_language_independent(char32_t cp) {
  return is_punct(cp) || is_digit(cp) || is_space(cp);
}

/// First code point of a UTF-8 string, or 0 when empty.
char32_t first(std::string_view text);

}  // namespace hokcm::utf8
