#pragma once

#include <qipsim/types.hpp>

#include <doctest.h>

namespace qipsim::testutil {

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  REQUIRE(a.size() == b.size());
  return (a - b).cwiseAbs().maxCoeff();
}

// Distance between vectors that ignores a global phase: min over phases of
// the Euclidean distance, computed as sqrt(2 - 2|<a|b>|) for unit vectors.
inline double phase_free_distance(const Vector& a, const Vector& b) {
  REQUIRE(a.size() == b.size());
  const double overlap = std::abs(a.dot(b));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap));
}

}  // namespace qipsim::testutil
