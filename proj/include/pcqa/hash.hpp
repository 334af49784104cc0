#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace pcqa {

constexpr uint64_t kFnvInit = 0xcbf29ce484222325ULL;

inline uint64_t fnv1a64(const void* data, std::size_t len, uint64_t h = kFnvInit) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(uint64_t value, uint64_t h) { return fnv1a64(&value, sizeof(value), h); }

inline uint64_t fnv1a64(double value, uint64_t h) {
  uint64_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  return fnv1a64(bits, h);
}

inline std::string hex16(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace pcqa
