#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "matmean/spd.hpp"

namespace matmean {

/// Seeded generator of test matrices. Same seed, same sequence.
class SpdSampler {
 public:
  explicit SpdSampler(std::uint64_t seed) : rng_(seed) {}

  /// Q diag(exp(u_i)) Q^T with Haar-like Q and u_i uniform in
  /// [-log_spread, log_spread].
  SpdMatrix spd(int dim, double log_spread = 1.0);

  /// Gaussian matrix rescaled so its condition number stays below ~1e3.
  Matrix invertible(int dim);

  /// base^1/2 exp(S) base^1/2 with S symmetric and spectral radius exactly
  /// `radius`, so R(base, result) = exp(radius).
  SpdMatrix near(const SpdMatrix& base, double radius);

  /// n matrices around a random base with pairwise R at most max_r.
  std::vector<SpdMatrix> cluster(int n, int dim, double max_r);

  /// One cluster drawn like `cluster`, then contracted toward its base: entry
  /// j keeps the same base and directions with pairwise R at most bounds[j].
  std::vector<std::vector<SpdMatrix>> cluster_path(int n, int dim,
                                                   std::span<const double> bounds);

  std::mt19937_64& engine() { return rng_; }

 private:
  Matrix gaussian(int rows, int cols);
  Matrix orthogonal(int dim);

  std::mt19937_64 rng_;
};

}  // namespace matmean
