#pragma once

#include "slowproj/spectral.hpp"

namespace slowproj {

enum class ProjectionMethod { DOP, Orthogonal, Riesz };

const char* to_string(ProjectionMethod method);

/// Spectrally-weighted Gramian of a slow basis,
///   G_ij = inner(x_i, x_j) / (lambda_i + conj(lambda_j)).
/// Hermitian by construction and negative semi-definite for stable modes.
struct Gramian {
  ComplexMatrix entries;
  double condition = 0.0;

  Eigen::Index count() const { return entries.rows(); }
  bool ill_conditioned() const { return condition > 1e10; }
};

struct ProjectionOperator {
  ProjectionMethod method = ProjectionMethod::DOP;
  ComplexMatrix matrix;
  SlowBasis basis;

  ComplexVector apply(const ComplexVector& x) const { return matrix * x; }
};

/// Biorthogonal dual set of the slow basis: inner(x_k, theta_i) = delta_ik
/// and P x = sum_i x_i * inner(x, theta_i). Columns are the theta_i.
struct DualBasis {
  ComplexMatrix vectors;
};

Gramian gramian(const SlowBasis& basis);

/// I_j(x0) = inner((L + conj(lambda_j) I)^{-1} x0, x_j), the resolvent
/// pairing that drives the transient part of the cumulative error.
ComplexVector interaction_vector(const LinearSystem& system, const SlowBasis& basis,
                                 const ComplexVector& x0);

/// Solves G^T xi = interaction for the optimal slow-manifold coordinates.
/// Factorization-based; one step of iterative refinement keeps the
/// residual at the 1e-10 * |I| level even for poorly scaled Gramians.
ComplexVector minimizer(const Gramian& gramian, const ComplexVector& interaction);

/// Reduces any basis of an invariant subspace to canonical eigenpairs of
/// the operator (sorted, unit-norm). Bases that are already eigenpair
/// lists pass through unchanged; spans that are not invariant under the
/// operator are rejected with NonInvariantBasisError.
SlowBasis canonicalize_eigenbasis(const LinearSystem& system, const SlowBasis& basis);

/// Assembles the dynamically optimal projection as a dense matrix by
/// applying the minimizer construction to every standard basis vector.
ProjectionOperator dop_matrix(const LinearSystem& system, const SlowBasis& basis);

/// P = X (X^* X)^{-1} X^*, the Euclidean-orthogonal projector onto the
/// basis span.
ProjectionOperator orthogonal_projection(const SlowBasis& basis);

/// Spectral (Riesz) projection onto the n slowest modes, built from left
/// eigenvectors; the unique projection onto that span commuting with L.
ProjectionOperator riesz_projection(const SpectralData& data, Eigen::Index n);

DualBasis dop_dual_set(const LinearSystem& system, const SlowBasis& basis,
                       const Gramian& gramian);

}  // namespace slowproj
