#pragma once

#include <map>
#include <string>

#include "slowproj/linalg.hpp"

namespace slowproj {

/// Strict stability threshold: every integral over [0, inf) used by the
/// projection formulas requires Re(lambda) < -kStabilityTol.
constexpr double kStabilityTol = 1e-10;

/// Downstream consumers refuse eigenvector matrices worse conditioned
/// than this (near-defective operator).
constexpr double kDefectiveCondition = 1e8;

struct LinearSystem {
  Eigen::Index dim = 0;
  ComplexMatrix matrix;
  std::string label;
  std::map<std::string, double> params;
};

/// Validates shape and finiteness and fills in the dimension.
LinearSystem make_system(ComplexMatrix matrix, std::string label = {},
                         std::map<std::string, double> params = {});

struct SpectralData {
  LinearSystem system;
  EigenDecomposition decomposition;
  bool stable = false;
  double spectral_abscissa = 0.0;
};

/// The n slowest eigenpairs. Columns of `vectors` are unit-norm
/// eigenvectors in ambient coordinates, ordered like the eigenvalues
/// (descending real part). `gap` is Re(lambda_n) - Re(lambda_{n+1}),
/// +infinity when the basis spans the whole space.
struct SlowBasis {
  ComplexVector eigenvalues;
  ComplexMatrix vectors;
  double gap = 0.0;

  Eigen::Index count() const { return eigenvalues.size(); }
  Eigen::Index ambient_dim() const { return vectors.rows(); }
};

SpectralData analyze(const LinearSystem& system);

/// Returns normally iff the spectral abscissa is below -1e-10; otherwise
/// throws UnstableError carrying the offending eigenvalue.
void assert_stable(const SpectralData& data);

/// Selects the n slowest eigenpairs. Throws ConjugatePairSplitError when
/// the selection would take one member of a complex-conjugate pair
/// without the other.
SlowBasis slow_basis(const SpectralData& data, Eigen::Index n);

/// Frobenius norm of [L, adjoint(L)]; zero (within roundoff) iff normal.
double non_normality(const LinearSystem& system);

/// Max over Re(lambda); does not gate on eigenvector conditioning.
double spectral_abscissa(const LinearSystem& system);

}  // namespace slowproj
