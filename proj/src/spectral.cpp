#include "slowproj/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace slowproj {

LinearSystem make_system(ComplexMatrix matrix, std::string label,
                         std::map<std::string, double> params) {
  if (matrix.rows() != matrix.cols()) {
    throw NonSquareError("make_system: matrix must be square");
  }
  if (matrix.rows() < 1 || matrix.rows() > kMaxDim) {
    throw OutOfRangeError("make_system: dimension must be in [1, 64]");
  }
  if (!all_finite(matrix)) {
    throw BadParamsError("make_system: matrix has non-finite entries");
  }
  LinearSystem sys;
  sys.dim = matrix.rows();
  sys.matrix = std::move(matrix);
  sys.label = std::move(label);
  sys.params = std::move(params);
  return sys;
}

SpectralData analyze(const LinearSystem& system) {
  if (system.dim > kMaxDim) {
    throw OutOfRangeError("analyze: dimension must be at most 64");
  }
  SpectralData data;
  data.system = system;
  data.decomposition = eig(system.matrix);
  if (data.decomposition.vector_condition > kDefectiveCondition) {
    throw NearDefectiveError("analyze: eigenvector matrix condition exceeds 1e8");
  }
  data.spectral_abscissa = data.decomposition.values(0).real();
  data.stable = data.spectral_abscissa < -kStabilityTol;
  return data;
}

void assert_stable(const SpectralData& data) {
  if (data.spectral_abscissa >= -kStabilityTol) {
    throw UnstableError(data.decomposition.values(0));
  }
}

namespace {

// Checks that the leading selection [0, n) does not cut a complex-conjugate
// pair. Pairing is only demanded where a conjugate partner actually exists
// in the spectrum; complex-entried operators without conjugation symmetry
// are not constrained.
void check_conjugate_closure(const ComplexVector& values, Eigen::Index n) {
  const Eigen::Index d = values.size();
  double scale = 1.0;
  for (Eigen::Index i = 0; i < d; ++i) scale = std::max(scale, std::abs(values(i)));
  const double tol = 1e-10 * scale;

  std::vector<bool> matched(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (matched[static_cast<std::size_t>(i)]) continue;
    if (std::abs(values(i).imag()) <= tol) continue;
    const Complex target = std::conj(values(i));

    Eigen::Index partner = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || matched[static_cast<std::size_t>(j)]) continue;
      const double dist = std::abs(values(j) - target);
      if (dist <= best) {
        best = dist;
        partner = j;
      }
    }
    if (partner >= 0) {
      matched[static_cast<std::size_t>(i)] = true;
      matched[static_cast<std::size_t>(partner)] = true;
      continue;
    }

    for (Eigen::Index j = n; j < d; ++j) {
      if (std::abs(values(j) - target) <= tol) {
        throw ConjugatePairSplitError(
            "slow_basis: selection cuts a complex-conjugate pair");
      }
    }
    matched[static_cast<std::size_t>(i)] = true;
  }
}

}  // namespace

SlowBasis slow_basis(const SpectralData& data, Eigen::Index n) {
  const Eigen::Index d = data.system.dim;
  if (n < 1 || n > d) {
    throw OutOfRangeError("slow_basis: n must be in [1, dim]");
  }
  if (!data.stable) {
    throw UnstableError(data.decomposition.values(0));
  }
  check_conjugate_closure(data.decomposition.values, n);

  SlowBasis basis;
  basis.eigenvalues = data.decomposition.values.head(n);
  basis.vectors = data.decomposition.right_vectors.leftCols(n);
  basis.gap = n == d ? std::numeric_limits<double>::infinity()
                     : data.decomposition.values(n - 1).real() -
                           data.decomposition.values(n).real();

  Eigen::JacobiSVD<ComplexMatrix> svd(basis.vectors);
  if (svd.singularValues()(n - 1) <= 1e-10) {
    throw NearDefectiveError("slow_basis: selected eigenvectors are nearly dependent");
  }
  return basis;
}

double non_normality(const LinearSystem& system) {
  return commutator(system.matrix, adjoint(system.matrix)).norm();
}

double spectral_abscissa(const LinearSystem& system) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(system.matrix,
                                                  /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailureError("spectral_abscissa: eigensolver did not converge");
  }
  double abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < system.dim; ++i) {
    abscissa = std::max(abscissa, solver.eigenvalues()(i).real());
  }
  return abscissa;
}

}  // namespace slowproj
