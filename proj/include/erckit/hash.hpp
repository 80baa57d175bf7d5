#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace erckit {

// FNV-1a, 64 bit. Used for feature hashing, vector-file keys and config
// hashes; must stay stable across platforms and releases.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

/// 16 hex digit key of a text; the vector-file embedder looks rows up by this.
inline std::string text_key(std::string_view text) {
  return to_hex(fnv1a64(text));
}

}  // namespace erckit
