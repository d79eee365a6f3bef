#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hanbias {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Digest of a file's content as 16 lowercase hex digits. Throws on I/O error.
std::string file_digest_hex(const std::string& path);

std::string to_hex(std::uint64_t value);

}  // namespace hanbias
