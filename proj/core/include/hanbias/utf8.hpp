#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hanbias::utf8 {

/// Decodes one code point starting at byte offset `pos` and advances `pos`
/// past it. Invalid sequences decode as U+FFFD and consume one byte, so the
/// scan always terminates.
char32_t decode_next(std::string_view text, std::size_t& pos);

/// All code points of `text` in order.
std::vector<char32_t> decode(std::string_view text);

/// Byte offset of every code point in `text`, plus a final entry at
/// text.size(). offsets.size() == #code points + 1.
std::vector<std::size_t> code_point_offsets(std::string_view text);

std::string encode(char32_t cp);

std::size_t count_code_points(std::string_view text);

/// Unicode whitespace (White_Space property).
bool is_whitespace(char32_t cp);

}  // namespace hanbias::utf8
