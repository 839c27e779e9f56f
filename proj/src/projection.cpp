#include "slowproj/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace slowproj {

const char* to_string(ProjectionMethod method) {
  switch (method) {
    case ProjectionMethod::DOP: return "dop";
    case ProjectionMethod::Orthogonal: return "orth";
    case ProjectionMethod::Riesz: return "riesz";
  }
  return "unknown";
}

namespace {

void require_stable_modes(const SlowBasis& basis) {
  for (Eigen::Index j = 0; j < basis.count(); ++j) {
    if (basis.eigenvalues(j).real() >= -kStabilityTol) {
      throw UnstableError(basis.eigenvalues(j));
    }
  }
}

ComplexMatrix resolvent_shift(const LinearSystem& system, Complex lambda) {
  return system.matrix +
         std::conj(lambda) * ComplexMatrix::Identity(system.dim, system.dim);
}

bool is_eigenbasis(const LinearSystem& system, const SlowBasis& basis) {
  const double op_scale = std::max(system.matrix.norm(), 1.0);
  for (Eigen::Index j = 0; j < basis.count(); ++j) {
    const ComplexVector& v = basis.vectors.col(j);
    const double vnorm = v.norm();
    if (vnorm == 0.0) return false;
    if ((system.matrix * v - basis.eigenvalues(j) * v).norm() / vnorm >
        1e-8 * op_scale) {
      return false;
    }
  }
  return true;
}

}  // namespace

Gramian gramian(const SlowBasis& basis) {
  const Eigen::Index n = basis.count();
  Gramian g;
  g.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double denom = 2.0 * basis.eigenvalues(i).real();
    if (std::abs(denom) < 1e-14) {
      throw UnstableError(basis.eigenvalues(i));
    }
    g.entries(i, i) =
        inner(basis.vectors.col(i), basis.vectors.col(i)).real() / denom;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex shift = basis.eigenvalues(i) + std::conj(basis.eigenvalues(j));
      if (std::abs(shift) < 1e-14) {
        throw UnstableError(basis.eigenvalues(i));
      }
      g.entries(i, j) = inner(basis.vectors.col(i), basis.vectors.col(j)) / shift;
      g.entries(j, i) = std::conj(g.entries(i, j));
    }
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g.entries);
  const auto& mu = es.eigenvalues();
  if (mu(n - 1) > 1e-8 * std::max(1.0, g.entries.norm())) {
    throw NumericalFailureError("gramian: matrix is not negative semi-definite");
  }
  double mu_min = std::numeric_limits<double>::infinity();
  double mu_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    mu_min = std::min(mu_min, std::abs(mu(i)));
    mu_max = std::max(mu_max, std::abs(mu(i)));
  }
  g.condition = mu_min > 0.0 ? mu_max / mu_min : std::numeric_limits<double>::infinity();
  return g;
}

ComplexVector interaction_vector(const LinearSystem& system, const SlowBasis& basis,
                                 const ComplexVector& x0) {
  if (x0.size() != system.dim || basis.ambient_dim() != system.dim) {
    throw ShapeMismatchError("interaction_vector: dimension mismatch");
  }
  require_stable_modes(basis);
  ComplexVector out(basis.count());
  for (Eigen::Index j = 0; j < basis.count(); ++j) {
    out(j) = inner(solve(resolvent_shift(system, basis.eigenvalues(j)), x0),
                   basis.vectors.col(j));
  }
  return out;
}

ComplexVector minimizer(const Gramian& gramian, const ComplexVector& interaction) {
  if (interaction.size() != gramian.count()) {
    throw ShapeMismatchError("minimizer: interaction vector has wrong length");
  }
  const ComplexMatrix gt = gramian.entries.transpose();
  auto lu = checked_lu(gt);
  ComplexVector xi = lu.solve(interaction);
  xi += lu.solve(interaction - gt * xi);
  const double residual = (gt * xi - interaction).norm();
  if (residual > 1e-10 * std::max(interaction.norm(), 1e-300)) {
    throw NumericalFailureError("minimizer: residual exceeds 1e-10 * |I|");
  }
  return xi;
}

SlowBasis canonicalize_eigenbasis(const LinearSystem& system, const SlowBasis& basis) {
  const Eigen::Index n = basis.count();
  if (basis.ambient_dim() != system.dim) {
    throw ShapeMismatchError("canonicalize_eigenbasis: ambient dimension mismatch");
  }
  const double op_scale = std::max(system.matrix.norm(), 1.0);
  if (is_eigenbasis(system, basis)) return basis;

  // General basis of the same span: recover the restriction of L to the
  // span, take its eigenpairs, and map them back to ambient coordinates.
  const ComplexMatrix& b = basis.vectors;
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(b);
  if (qr.rank() < n) {
    throw RankDeficientError("canonicalize_eigenbasis: basis vectors are dependent");
  }
  const ComplexMatrix restriction = qr.solve(system.matrix * b);
  const double invariance_residual = (system.matrix * b - b * restriction).norm();
  if (invariance_residual > 1e-8 * op_scale * b.norm()) {
    throw NonInvariantBasisError(
        "canonicalize_eigenbasis: span is not invariant under the operator");
  }

  const EigenDecomposition small = eig(restriction);

  SlowBasis canonical;
  canonical.eigenvalues = small.values;
  canonical.vectors = b * small.right_vectors;
  canonical.gap = basis.gap;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double norm = canonical.vectors.col(j).norm();
    if (norm <= 1e-14) {
      throw RankDeficientError("canonicalize_eigenbasis: degenerate recombination");
    }
    canonical.vectors.col(j) /= norm;
    const double residual = (system.matrix * canonical.vectors.col(j) -
                             canonical.eigenvalues(j) * canonical.vectors.col(j))
                                .norm();
    if (residual > 1e-7 * op_scale) {
      throw NonInvariantBasisError(
          "canonicalize_eigenbasis: recovered vectors are not eigenvectors");
    }
  }

  // The recombination cannot change the selected eigenvalue multiset.
  ComplexVector before = basis.eigenvalues;
  ComplexVector after = canonical.eigenvalues;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    bool found = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!used[static_cast<std::size_t>(j)] &&
          std::abs(before(i) - after(j)) <= 1e-6 * op_scale) {
        used[static_cast<std::size_t>(j)] = true;
        found = true;
        break;
      }
    }
    if (!found) {
      throw NonInvariantBasisError(
          "canonicalize_eigenbasis: eigenvalue multiset changed under recombination");
    }
  }
  return canonical;
}

ProjectionOperator dop_matrix(const LinearSystem& system, const SlowBasis& basis) {
  const SlowBasis canonical = canonicalize_eigenbasis(system, basis);
  require_stable_modes(canonical);
  const Eigen::Index d = system.dim;
  const Eigen::Index n = canonical.count();

  const Gramian g = gramian(canonical);
  auto gt_lu = checked_lu(g.entries.transpose());

  // Column k of the interaction block is I(e_k); assembling P column by
  // column is the matrix form of applying the functional construction to
  // each standard basis vector.
  ComplexMatrix interactions(n, d);
  const ComplexMatrix identity = ComplexMatrix::Identity(d, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    const ComplexMatrix resolvent_cols =
        solve(resolvent_shift(system, canonical.eigenvalues(j)), identity);
    interactions.row(j) = canonical.vectors.col(j).adjoint() * resolvent_cols;
  }

  ProjectionOperator op;
  op.method = ProjectionMethod::DOP;
  op.basis = canonical;
  op.matrix = canonical.vectors * gt_lu.solve(interactions);
  return op;
}

ProjectionOperator orthogonal_projection(const SlowBasis& basis) {
  const Eigen::Index n = basis.count();
  const ComplexMatrix& x = basis.vectors;
  Eigen::JacobiSVD<ComplexMatrix> svd(x);
  if (svd.singularValues()(n - 1) <= 1e-10) {
    throw RankDeficientError("orthogonal_projection: basis vectors are dependent");
  }
  const ComplexMatrix gram = x.adjoint() * x;
  ProjectionOperator op;
  op.method = ProjectionMethod::Orthogonal;
  op.basis = basis;
  op.matrix = x * gram.llt().solve(x.adjoint());
  return op;
}

ProjectionOperator riesz_projection(const SpectralData& data, Eigen::Index n) {
  const Eigen::Index d = data.system.dim;
  if (n < 1 || n > d) {
    throw OutOfRangeError("riesz_projection: n must be in [1, dim]");
  }
  if (data.decomposition.vector_condition > kDefectiveCondition) {
    throw NearDefectiveError("riesz_projection: near-defective eigenvector matrix");
  }
  if (n < d) {
    const double gap =
        data.decomposition.values(n - 1).real() - data.decomposition.values(n).real();
    if (gap <= kStabilityTol) {
      throw GapTooSmallError("riesz_projection: slow set not separated from the rest");
    }
  }

  // Rows of V^{-1} are (conjugated) left eigenvectors; keeping the slow
  // block of V * V^{-1} gives the spectral projector.
  const ComplexMatrix& v = data.decomposition.right_vectors;
  const ComplexMatrix v_inv = solve(v, ComplexMatrix(ComplexMatrix::Identity(d, d)));

  ProjectionOperator op;
  op.method = ProjectionMethod::Riesz;
  op.basis = slow_basis(data, n);
  op.matrix = v.leftCols(n) * v_inv.topRows(n);
  return op;
}

DualBasis dop_dual_set(const LinearSystem& system, const SlowBasis& basis,
                       const Gramian& gramian) {
  const Eigen::Index n = basis.count();
  const Eigen::Index d = system.dim;
  if (gramian.count() != n) {
    throw ShapeMismatchError("dop_dual_set: gramian size differs from basis");
  }
  require_stable_modes(basis);
  // Biorthogonality against the passed basis only holds for eigenpair
  // lists; recombined spans must go through dop_matrix instead.
  if (!is_eigenbasis(system, basis)) {
    throw NonInvariantBasisError("dop_dual_set: basis vectors are not eigenvectors");
  }

  // r_j = (L^dagger + lambda_j I)^{-1} x_j.
  ComplexMatrix r(d, n);
  const ComplexMatrix l_adj = adjoint(system.matrix);
  for (Eigen::Index j = 0; j < n; ++j) {
    r.col(j) = solve(
        l_adj + basis.eigenvalues(j) * ComplexMatrix::Identity(d, d),
        ComplexVector(basis.vectors.col(j)));
  }

  // theta_i = sum_j conj([(G^T)^{-1}]_ij) r_j. The conjugate on the
  // coefficient is what makes inner(x_k, theta_i) = delta_ik under the
  // second-argument-conjugating inner product.
  auto g_lu = checked_lu(gramian.entries);
  DualBasis dual;
  dual.vectors.resize(d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ComplexVector unit = ComplexVector::Zero(n);
    unit(i) = 1.0;
    const ComplexVector col_i = g_lu.solve(unit);  // i-th column of G^{-1}
    dual.vectors.col(i) = r * col_i.conjugate();
  }
  return dual;
}

}  // namespace slowproj
