#include "slowproj/models.hpp"

#include <cmath>
#include <string>

namespace slowproj {

namespace {

constexpr Complex kI{0.0, 1.0};

void validate(const ShearParams& p) {
  if (!(p.alpha > 1.0) || !(p.gamma >= 0.0) || !std::isfinite(p.alpha) ||
      !std::isfinite(p.gamma)) {
    throw BadParamsError("shear2d: require alpha > 1 and gamma >= 0");
  }
}

void validate(const GradParams& p) {
  if (!(p.epsilon > 0.0) || !(p.k > 0.0) || !std::isfinite(p.epsilon) ||
      !std::isfinite(p.k)) {
    throw BadParamsError("grad3: require epsilon > 0 and k > 0");
  }
}

}  // namespace

LinearSystem shear2d(const ShearParams& params) {
  validate(params);
  ComplexMatrix m(2, 2);
  m << -1.0, params.gamma, 0.0, -params.alpha;
  return make_system(std::move(m), "shear2d",
                     {{"alpha", params.alpha}, {"gamma", params.gamma}});
}

ComplexMatrix shear2d_dop_reference(const ShearParams& params) {
  validate(params);
  ComplexMatrix p(2, 2);
  p << 1.0, params.gamma / (1.0 + params.alpha), 0.0, 0.0;
  return p;
}

LinearSystem grad3(const GradParams& params) {
  validate(params);
  const double eps = params.epsilon;
  const double k = params.k;
  ComplexMatrix m(3, 3);
  m << 0.0, -5.0 * kI * k / 3.0, 0.0,
      -kI * k, 0.0, -kI * k,
      0.0, -4.0 * kI * k / 3.0, Complex(-1.0 / eps, 0.0);
  return make_system(std::move(m), "grad3", {{"epsilon", eps}, {"k", k}});
}

GradModeData grad3_modes(const GradParams& params) {
  validate(params);
  const double eps = params.epsilon;
  const double k = params.k;

  // Roots of the (monic form of the) characteristic cubic
  //   lambda^3 + lambda^2 / eps + 3 k^2 lambda + 5 k^2 / (3 eps) = 0
  // via a companion-matrix eigensolve.
  ComplexMatrix companion = ComplexMatrix::Zero(3, 3);
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(0, 2) = -5.0 * k * k / (3.0 * eps);
  companion(1, 2) = -3.0 * k * k;
  companion(2, 2) = -1.0 / eps;
  const EigenDecomposition roots = eig(companion);

  const double scale = std::max({1.0, std::abs(roots.values(0)), std::abs(roots.values(1)),
                                 std::abs(roots.values(2))});
  Complex lambda_ac{};
  Complex lambda_ac_conj{};
  double lambda_diff = 0.0;
  int real_count = 0;
  int positive_imag = 0;
  for (Eigen::Index i = 0; i < 3; ++i) {
    const Complex root = roots.values(i);
    if (std::abs(root.imag()) <= 1e-9 * scale) {
      ++real_count;
      lambda_diff = root.real();
    } else if (root.imag() > 0.0) {
      ++positive_imag;
      lambda_ac = root;
    } else {
      lambda_ac_conj = root;
    }
  }
  if (real_count != 1 || positive_imag != 1 ||
      std::abs(lambda_ac_conj - std::conj(lambda_ac)) > 1e-9 * scale) {
    throw DegenerateSpectrumError("grad3_modes: expected one real root and one complex pair");
  }

  GradModeData data;
  data.lambda_ac = lambda_ac;
  data.lambda_diff = lambda_diff;
  const std::array<Complex, 3> lambdas{lambda_ac, std::conj(lambda_ac),
                                       Complex(lambda_diff, 0.0)};
  data.q.resize(3, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    data.a[j] = lambdas[j] / k;
    data.b[j] = 3.0 * (1.0 + eps * lambdas[j]) / (4.0 * eps * k);
    data.q(0, col) = -1.0 - data.a[j] * data.b[j];
    data.q(1, col) = kI * data.b[j];
    data.q(2, col) = 1.0;
  }
  return data;
}

GradReducedModel grad3_reduced(const GradParams& params) {
  const GradModeData modes = grad3_modes(params);

  GradReducedModel model;
  model.h.resize(2, 2);
  model.h << modes.q(0, 0), modes.q(0, 1), modes.q(1, 0), modes.q(1, 1);
  model.lambda = ComplexMatrix::Zero(2, 2);
  model.lambda(0, 0) = modes.lambda_ac;
  model.lambda(1, 1) = std::conj(modes.lambda_ac);
  // T = H Lambda H^{-1}, via a solve on the transposed system.
  model.transport = solve(ComplexMatrix(model.h.transpose()),
                          ComplexMatrix((model.h * model.lambda).transpose()))
                        .transpose();
  return model;
}

ComplexVector grad3_slow_orthogonal_complement(const GradParams& params) {
  const GradModeData modes = grad3_modes(params);
  const ComplexVector q1 = modes.q.col(0).conjugate();
  const ComplexVector q2 = modes.q.col(1).conjugate();

  // Bilinear cross product of the conjugated acoustic columns is
  // Hermitian-orthogonal to both of them.
  ComplexVector v(3);
  v(0) = q1(1) * q2(2) - q1(2) * q2(1);
  v(1) = q1(2) * q2(0) - q1(0) * q2(2);
  v(2) = q1(0) * q2(1) - q1(1) * q2(0);
  const double norm = v.norm();
  if (norm <= 1e-14) {
    throw DegenerateSpectrumError(
        "grad3_slow_orthogonal_complement: acoustic modes are parallel");
  }
  v /= norm;

  // Deterministic phase: largest-magnitude component real positive.
  Eigen::Index arg_max = 0;
  for (Eigen::Index i = 1; i < 3; ++i) {
    if (std::abs(v(i)) > std::abs(v(arg_max))) arg_max = i;
  }
  v *= std::conj(v(arg_max)) / std::abs(v(arg_max));
  return v;
}

}  // namespace slowproj
