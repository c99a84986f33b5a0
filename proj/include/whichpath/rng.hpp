// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

namespace whichpath::rng {

/// Counter-based pseudo-random stream: every output is a pure function of
/// (key, counter), so fixed seeds give bit-identical sequences on any
/// platform. Splitting is done by deriving child keys, never by sharing
/// stream state.
class Stream {
public:
  explicit Stream(std::uint64_t seed) : key_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos();

  /// Standard normal via Box-Muller (two uniforms per call, no cached spare).
  double gaussian();

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Derive an independent child seed from a parent seed and a purpose label.
std::uint64_t derive(std::uint64_t seed, std::string_view label);

/// Indexed variant for per-item streams (per molecule, per trial, ...).
std::uint64_t derive(std::uint64_t seed, std::string_view label, std::uint64_t index);

}  // namespace whichpath::rng
