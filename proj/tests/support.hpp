#pragma once

#include <cmath>
#include <filesystem>

#include "dimbench/numerics.hpp"
#include "dimbench/random.hpp"

namespace dimbench::testing {

inline Matrix random_matrix(RandomStream& rng, Index rows, Index cols, double scale = 1.0) {
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = scale * rng.gaussian();
  }
  return M;
}

inline Matrix random_symmetric(RandomStream& rng, Index n) {
  const Matrix A = random_matrix(rng, n, n);
  return (A + A.transpose()) / 2.0;
}

inline std::filesystem::path source_dir() { return DIMBENCH_SOURCE_DIR; }

}  // namespace dimbench::testing
