#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "qipsim/types.hpp"

namespace qipsim {

/// Named, seedable random generator used everywhere randomness is needed.
/// Reports that involve randomness always print name and seed so runs can be
/// reproduced exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  const std::string& name() const { return name_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  /// Uniform integer in [0, bound).
  std::uint64_t integer(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  /// Standard complex Gaussian (real and imaginary parts N(0,1)).
  cplx gaussian() {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(engine_);
    const double im = n(engine_);
    return {re, im};
  }

  /// Haar-random pure state amplitudes.
  Vector unit_vector(Eigen::Index dim);

  /// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
  Matrix unitary(Eigen::Index dim);

  /// Random full-rank density matrix G G^dag / tr(G G^dag).
  Matrix density(Eigen::Index dim);

  /// Random rank-r orthogonal projector.
  Matrix projector(Eigen::Index dim, Eigen::Index rank);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::string name_ = "mt19937-64";
  std::mt19937_64 engine_;
};

}  // namespace qipsim
