#pragma once

#include <random>

#include "frag/operators.hpp"

namespace frag::test {

inline Vector random_nonnegative(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = unit(rng);
  // Sparse vectors exercise single-column behavior.
  if (unit(rng) < 0.3) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (unit(rng) < 0.8) v(i) = 0.0;
    }
  }
  return v;
}

inline Vector random_signed(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = unit(rng);
  return v;
}

}  // namespace frag::test
