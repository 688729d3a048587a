#pragma once

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers. Only the case mappings needed for Latin, Greek and Cyrillic
// lyrics are implemented; everything else passes through unchanged.
namespace lyricgenre::text {

/// Decodes UTF-8. Invalid sequences decode to U+FFFD, one per offending byte.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

char32_t fold_case(char32_t cp);
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);
inline bool is_word_char(char32_t cp) { return is_letter(cp) || is_digit(cp); }

std::string fold_case(std::string_view s);
std::string trim(std::string_view s);
/// Trims and replaces every run of whitespace with a single ASCII space.
std::string collapse_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

/// Runs of letters/digits. Used to compare word content across transforms.
std::vector<std::string> word_runs(std::string_view s);

std::size_t codepoint_length(std::string_view s);

}  // namespace lyricgenre::text
