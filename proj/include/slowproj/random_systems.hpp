#pragma once

#include <random>

#include "slowproj/spectral.hpp"

namespace slowproj {

/// Deterministic uniform double in [0, 1); avoids the
/// implementation-defined std distributions so seeded runs are
/// reproducible byte for byte.
double uniform01(std::mt19937_64& rng);

/// Uniform in [lo, hi).
double uniform(std::mt19937_64& rng, double lo, double hi);

/// Standard normal via Box-Muller.
double gaussian(std::mt19937_64& rng);

Complex complex_gaussian(std::mt19937_64& rng);

struct RandomSystemOptions {
  Eigen::Index min_dim = 2;
  Eigen::Index max_dim = 8;
  double re_min = -3.0;
  double re_max = -0.5;
  double im_span = 2.0;
  double min_re_separation = 0.15;
  double max_vector_condition = 30.0;
  bool real_entries = false;
};

/// Stable diagonalizable system built as V diag(lambda) V^{-1} with
/// well-separated eigenvalue real parts and a moderately conditioned
/// eigenvector matrix. With real_entries, eigenvalues and eigenvectors
/// come in conjugate pairs and the matrix is real.
LinearSystem random_stable_system(std::mt19937_64& rng,
                                  const RandomSystemOptions& opts = {});

/// Stable normal system U diag(lambda) U^dagger with unitary U.
LinearSystem random_normal_system(std::mt19937_64& rng,
                                  const RandomSystemOptions& opts = {});

/// Slow-mode count that respects conjugate-pair atomicity for the given
/// spectrum; uniform over the valid choices in [1, dim].
Eigen::Index random_valid_slow_count(std::mt19937_64& rng, const SpectralData& data);

ComplexVector random_vector(std::mt19937_64& rng, Eigen::Index dim);

}  // namespace slowproj
