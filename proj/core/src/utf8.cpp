#include "hanbias/utf8.hpp"

namespace hanbias::utf8 {

namespace {
constexpr char32_t kReplacement = 0xFFFD;

inline bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }
}  // namespace

char32_t decode_next(std::string_view text, std::size_t& pos) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  unsigned char b0 = bytes[pos];
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    if (pos + 1 < n && is_continuation(bytes[pos + 1])) {
      char32_t cp = (char32_t(b0 & 0x1F) << 6) | (bytes[pos + 1] & 0x3F);
      pos += 2;
      return cp < 0x80 ? kReplacement : cp;  // reject overlong forms
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    if (pos + 2 < n && is_continuation(bytes[pos + 1]) &&
        is_continuation(bytes[pos + 2])) {
      char32_t cp = (char32_t(b0 & 0x0F) << 12) |
                    (char32_t(bytes[pos + 1] & 0x3F) << 6) |
                    (bytes[pos + 2] & 0x3F);
      pos += 3;
      if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return kReplacement;
      return cp;
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    if (pos + 3 < n && is_continuation(bytes[pos + 1]) &&
        is_continuation(bytes[pos + 2]) && is_continuation(bytes[pos + 3])) {
      char32_t cp = (char32_t(b0 & 0x07) << 18) |
                    (char32_t(bytes[pos + 1] & 0x3F) << 12) |
                    (char32_t(bytes[pos + 2] & 0x3F) << 6) |
                    (bytes[pos + 3] & 0x3F);
      pos += 4;
      return (cp < 0x10000 || cp > 0x10FFFF) ? kReplacement : cp;
    }
  }
  ++pos;
  return kReplacement;
}

std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) out.push_back(decode_next(text, pos));
  return out;
}

std::vector<std::size_t> code_point_offsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  std::size_t pos = 0;
  while (pos < text.size()) {
    offsets.push_back(pos);
    decode_next(text, pos);
  }
  offsets.push_back(text.size());
  return offsets;
}

std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(char(cp));
  } else if (cp < 0x800) {
    out.push_back(char(0xC0 | (cp >> 6)));
    out.push_back(char(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(char(0xE0 | (cp >> 12)));
    out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(char(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(char(0xF0 | (cp >> 18)));
    out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(char(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::size_t count_code_points(std::string_view text) {
  std::size_t n = 0, pos = 0;
  while (pos < text.size()) {
    decode_next(text, pos);
    ++n;
  }
  return n;
}

bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

}  // namespace hanbias::utf8
