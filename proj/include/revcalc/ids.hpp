#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace revcalc {

// Variables are plain naturals; the frontend interns surface names.
using Var = std::uint32_t;

struct RevId {
  std::uint32_t value = 0;
  auto operator<=>(const RevId&) const = default;
};

struct LocId {
  std::uint32_t value = 0;
  auto operator<=>(const LocId&) const = default;
};

// 64-bit mix (splitmix64 finalizer); used for structural hashes throughout.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)));
}

}  // namespace revcalc

template <>
struct std::hash<revcalc::RevId> {
  std::size_t operator()(const revcalc::RevId& r) const noexcept {
    return static_cast<std::size_t>(revcalc::mix64(r.value));
  }
};

template <>
struct std::hash<revcalc::LocId> {
  std::size_t operator()(const revcalc::LocId& l) const noexcept {
    return static_cast<std::size_t>(revcalc::mix64(l.value ^ 0x517cc1b727220a95ull));
  }
};
