#pragma once

#include <complex>

#include <Eigen/Dense>

#include "slowproj/errors.hpp"

namespace slowproj {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Dense eigensolvers below are meant for small operators only.
constexpr Eigen::Index kMaxDim = 64;

/// Result of eig(). Eigenvalues are sorted by descending real part
/// (slowest mode first); ties are broken by descending imaginary part,
/// then by the input ordering. Columns of right_vectors are the matching
/// unit-norm eigenvectors and vector_condition is the 2-norm condition
/// number of the eigenvector matrix.
struct EigenDecomposition {
  ComplexVector values;
  ComplexMatrix right_vectors;
  double vector_condition = 0.0;
};

/// Inner product with the convention inner(u, v) = sum_j u_j * conj(v_j).
Complex inner(const ComplexVector& u, const ComplexVector& v);

/// Conjugate transpose.
ComplexMatrix adjoint(const ComplexMatrix& a);

/// Commutator a*b - b*a of two square matrices of equal size.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

EigenDecomposition eig(const ComplexMatrix& a);

/// Solves a*x = b by LU factorization with partial pivoting. Throws
/// SingularError when a pivot falls below 1e-12 * frobenius(a).
ComplexVector solve(const ComplexMatrix& a, const ComplexVector& b);

/// Multi-right-hand-side variant of solve(); columns of b are solved
/// against one shared factorization.
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partially pivoted LU with the same singularity guard as solve().
Eigen::PartialPivLU<ComplexMatrix> checked_lu(const ComplexMatrix& a);

bool all_finite(const ComplexMatrix& a);

}  // namespace slowproj
