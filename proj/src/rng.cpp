// SPDX-License-Identifier: Apache-2.0
#include "whichpath/rng.hpp"

#include <cmath>
#include <numbers>

namespace whichpath::rng {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t Stream::next_u64() {
  ++counter_;
  return mix64(key_ + kGolden * counter_);
}

double Stream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Stream::gaussian() {
  const double u1 = uniform_pos();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive(std::uint64_t seed, std::string_view label) {
  // FNV-1a over the label, folded into the seed, then finalized.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return mix64(seed ^ mix64(h));
}

std::uint64_t derive(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  return mix64(derive(seed, label) + kGolden * (index + 1));
}

}  // namespace whichpath::rng
