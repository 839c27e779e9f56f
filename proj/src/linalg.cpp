#include "slowproj/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace slowproj {

Complex inner(const ComplexVector& u, const ComplexVector& v) {
  if (u.size() != v.size()) {
    throw ShapeMismatchError("inner: vector dimensions differ");
  }
  // Eigen's dot() conjugates the first argument; the convention here
  // conjugates the second.
  return v.dot(u);
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ShapeMismatchError("commutator: operands must be square and of equal size");
  }
  return a * b - b * a;
}

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) {
        return false;
      }
    }
  }
  return true;
}

namespace {

// Rotates v so that its largest-magnitude entry is real and positive.
void canonicalize_phase(Eigen::Ref<ComplexVector> v) {
  Eigen::Index arg_max = 0;
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best) {
      best = m;
      arg_max = i;
    }
  }
  if (best == 0.0) return;
  v *= std::conj(v(arg_max)) / best;
}

// Descending real part, then (within near-equal real parts) descending
// imaginary part, then input index. The secondary pass groups real parts
// that agree within a tolerance so that floating-point noise cannot
// scramble conjugate pairs.
std::vector<Eigen::Index> sorted_order(const ComplexVector& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values(a).real() != values(b).real()) return values(a).real() > values(b).real();
    if (values(a).imag() != values(b).imag()) return values(a).imag() > values(b).imag();
    return a < b;
  });

  double scale = 1.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) scale = std::max(scale, std::abs(values(i)));
  const double tie_tol = 1e-10 * scale;

  std::size_t group_start = 0;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    const bool closes_group =
        i == order.size() ||
        std::abs(values(order[group_start]).real() - values(order[i]).real()) > tie_tol;
    if (closes_group) {
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(group_start),
                order.begin() + static_cast<std::ptrdiff_t>(i),
                [&](Eigen::Index a, Eigen::Index b) {
                  if (values(a).imag() != values(b).imag())
                    return values(a).imag() > values(b).imag();
                  return a < b;
                });
      group_start = i;
    }
  }
  return order;
}

}  // namespace

EigenDecomposition eig(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw NonSquareError("eig: matrix must be square");
  }
  if (a.rows() < 1 || a.rows() > kMaxDim) {
    throw OutOfRangeError("eig: dimension must be in [1, 64]");
  }
  if (!all_finite(a)) {
    throw NumericalFailureError("eig: matrix has non-finite entries");
  }

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailureError("eig: iteration did not converge");
  }

  const auto order = sorted_order(solver.eigenvalues());

  EigenDecomposition out;
  const Eigen::Index d = a.rows();
  out.values.resize(d);
  out.right_vectors.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    out.values(j) = solver.eigenvalues()(order[static_cast<std::size_t>(j)]);
    ComplexVector v = solver.eigenvectors().col(order[static_cast<std::size_t>(j)]);
    canonicalize_phase(v);
    const double norm = v.norm();
    if (norm == 0.0) {
      throw NumericalFailureError("eig: zero eigenvector returned");
    }
    out.right_vectors.col(j) = v / norm;
  }

  const double matrix_norm = a.norm();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double residual = (a * out.right_vectors.col(j) - out.values(j) * out.right_vectors.col(j)).norm();
    if (residual > 1e-10 * std::max(matrix_norm, 1e-300)) {
      throw NumericalFailureError("eig: eigenpair residual exceeds tolerance");
    }
  }

  Eigen::JacobiSVD<ComplexMatrix> svd(out.right_vectors);
  const double smin = svd.singularValues()(d - 1);
  out.vector_condition =
      smin > 0.0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
  return out;
}

Eigen::PartialPivLU<ComplexMatrix> checked_lu(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw NonSquareError("solve: matrix must be square");
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double floor = 1e-12 * a.norm();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (std::abs(lu.matrixLU()(i, i)) <= floor) {
      throw SingularError("solve: pivot below 1e-12 * |A|");
    }
  }
  return lu;
}

ComplexVector solve(const ComplexMatrix& a, const ComplexVector& b) {
  if (a.rows() != b.size()) {
    throw ShapeMismatchError("solve: right-hand side dimension differs");
  }
  return checked_lu(a).solve(b);
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeMismatchError("solve: right-hand side dimension differs");
  }
  return checked_lu(a).solve(b);
}

}  // namespace slowproj
