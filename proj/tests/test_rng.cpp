// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "whichpath/rng.hpp"

using whichpath::rng::derive;
using whichpath::rng::Stream;

TEST_CASE("same seed reproduces the sequence exactly") {
  Stream a(12345);
  Stream b(12345);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived seeds differ by label and index") {
  const auto base = derive(7, "detector");
  CHECK(base != derive(7, "observer"));
  CHECK(derive(7, "mol", 1) != derive(7, "mol", 2));
  CHECK(derive(7, "mol", 1) == derive(7, "mol", 1));
  CHECK(derive(8, "mol", 1) != derive(7, "mol", 1));
}

TEST_CASE("uniform stays in [0,1) and uniform_pos in (0,1]") {
  Stream s(99);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = s.uniform_pos();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("gaussian has roughly standard moments") {
  Stream s(2024);
  const int n = 200000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = s.gaussian();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}
