#pragma once

#include <array>

#include "slowproj/spectral.hpp"

namespace slowproj {

/// Two-dimensional shear system [[-1, gamma], [0, -alpha]].
struct ShearParams {
  double alpha = 5.0;
  double gamma = 1.0;
};

/// Three-component Grad moment system at one wave number.
struct GradParams {
  double epsilon = 0.1;
  double k = 1.0;
};

/// Analytic mode data of the Grad-3 operator: the acoustic pair, the
/// generalized diffusion mode, the coefficients a_j = lambda_j / k and
/// b_j = 3 (1 + eps lambda_j) / (4 eps k), and the eigenvector matrix Q
/// with columns ordered (lambda_ac, conj(lambda_ac), lambda_diff).
struct GradModeData {
  Complex lambda_ac;
  double lambda_diff = 0.0;
  std::array<Complex, 3> a{};
  std::array<Complex, 3> b{};
  ComplexMatrix q;
};

/// Reduced (p, u) model obtained by restricting to the acoustic pair:
/// d(p, u)/dt = T (p, u) with T = H Lambda H^{-1}.
struct GradReducedModel {
  ComplexMatrix h;
  ComplexMatrix lambda;
  ComplexMatrix transport;
};

LinearSystem shear2d(const ShearParams& params);

/// Closed form of the dynamically optimal projection for the shear
/// system with n = 1: [[1, gamma / (1 + alpha)], [0, 0]].
ComplexMatrix shear2d_dop_reference(const ShearParams& params);

LinearSystem grad3(const GradParams& params);

GradModeData grad3_modes(const GradParams& params);

GradReducedModel grad3_reduced(const GradParams& params);

/// Unit vector orthogonal (in the Hermitian inner product) to both
/// acoustic eigenvectors; the off-manifold initial condition used in the
/// trajectory comparisons.
ComplexVector grad3_slow_orthogonal_complement(const GradParams& params);

}  // namespace slowproj
