#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hypflow/random.hpp"

namespace testing_support {

// Seeded stable pairs (A, B) of matching size n in {2, 3, 4}. Entries stay
// small and the abscissa sits in [-2, -1], which keeps e^{-B tau} e^{A tau}
// well conditioned over the sampled crossing times.
inline std::vector<std::pair<hypflow::Matrix, hypflow::Matrix>> stable_pairs(std::size_t count, std::uint64_t seed) {
  hypflow::Rng rng(seed);
  std::vector<std::pair<hypflow::Matrix, hypflow::Matrix>> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 2 + i % 3;
    hypflow::Matrix a = hypflow::random_stable_matrix(rng, n, 0.5, 1.0, 2.0);
    hypflow::Matrix b = hypflow::random_stable_matrix(rng, n, 0.5, 1.0, 2.0);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

}  // namespace testing_support
