#pragma once

#include <random>

#include "f4nls/grid.hpp"
#include "f4nls/wave.hpp"

namespace f4nls::testing {

// Large enough box that the sech^2 tails vanish to roundoff; small N keeps
// the dense solves fast.
inline GridPtr small_grid(int n = 512) { return make_grid(96.0, n); }

inline RealField random_field(const GridPtr& g, std::uint64_t seed, double cutoff = 2.0, double width = 10.0) {
  std::mt19937_64 gen(seed);
  return random_smooth_field(g, cutoff, width, gen);
}

inline ComplexField random_pair(const GridPtr& g, std::uint64_t seed) {
  return from_pair(random_field(g, seed), random_field(g, seed + 1000));
}

}  // namespace f4nls::testing
