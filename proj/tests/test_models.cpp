#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slowproj/models.hpp"
#include "slowproj/projection.hpp"
#include "slowproj/trajectory.hpp"
#include "support/test_utils.hpp"

using namespace slowproj;
using namespace slowproj::testing;

TEST_CASE("shear2d matrix and parameter validation") {
  const LinearSystem s = shear2d({5.0, 1.0});
  CHECK((s.matrix - mat2(-1, 1, 0, -5)).norm() == 0.0);

  const LinearSystem flat = shear2d({2.0, 0.0});
  CHECK(non_normality(flat) == 0.0);

  const auto d = eig(shear2d({3.0, 2.0}).matrix);
  CHECK(near(d.values(0), Complex(-1.0), 1e-13));
  CHECK(near(d.values(1), Complex(-3.0), 1e-13));

  CHECK_THROWS_AS(shear2d({1.0, 1.0}), BadParamsError);
  CHECK_THROWS_AS(shear2d({5.0, -0.1}), BadParamsError);
}

TEST_CASE("shear dop reference matches the generic construction") {
  for (const auto& [alpha, gamma] :
       {std::pair{5.0, 1.0}, std::pair{4.0, 0.0}, std::pair{3.0, 2.0}}) {
    const ComplexMatrix reference = shear2d_dop_reference({alpha, gamma});
    const LinearSystem system = shear2d({alpha, gamma});
    const ProjectionOperator dop = dop_matrix(system, slow_basis(analyze(system), 1));
    CHECK((dop.matrix - reference).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(near(shear2d_dop_reference({5.0, 1.0})(0, 1), Complex(1.0 / 6.0), 1e-16));
  CHECK(near(shear2d_dop_reference({3.0, 2.0})(0, 1), Complex(0.5), 1e-16));
  CHECK((shear2d_dop_reference({4.0, 0.0}) - mat2(1, 0, 0, 0)).norm() == 0.0);
}

TEST_CASE("grad3 matrix entries and characteristic polynomial") {
  const double eps = 0.1;
  const double k = 1.0;
  const LinearSystem s = grad3({eps, k});
  CHECK(near(s.matrix(2, 2), Complex(-10.0), 1e-15));

  // coefficient-by-coefficient: det(L - t I) = -t^3 + tr t^2 - m t + det
  // must match -t^3 - t^2 / eps - 3 k^2 t - 5 k^2 / (3 eps)
  const Complex trace = s.matrix.trace();
  CHECK(near(trace, Complex(-1.0 / eps), 1e-14));
  Complex minor_sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      minor_sum += s.matrix(i, i) * s.matrix(j, j) - s.matrix(i, j) * s.matrix(j, i);
    }
  }
  CHECK(near(minor_sum, Complex(3.0 * k * k), 1e-14));
  CHECK(near(s.matrix.determinant(), Complex(-5.0 * k * k / (3.0 * eps)), 1e-14));

  CHECK_THROWS_AS(grad3({0.0, 1.0}), BadParamsError);
  CHECK_THROWS_AS(grad3({0.1, 0.0}), BadParamsError);
}

TEST_CASE("grad3 modes classify the spectrum and satisfy the cubic") {
  const GradParams params{0.1, 1.0};
  const GradModeData modes = grad3_modes(params);
  CHECK(modes.lambda_ac.imag() > 0.0);

  auto cubic = [&](Complex r) {
    return -r * r * r - r * r / params.epsilon - 3.0 * params.k * params.k * r -
           5.0 * params.k * params.k / (3.0 * params.epsilon);
  };
  const Complex roots[] = {modes.lambda_ac, std::conj(modes.lambda_ac),
                           Complex(modes.lambda_diff, 0.0)};
  for (const Complex r : roots) {
    CHECK(std::abs(cubic(r)) <= 1e-9 * (1.0 + std::pow(std::abs(r), 3.0)));
  }

  // Q columns are eigenvectors of L_k
  const ComplexMatrix l = grad3(params).matrix;
  for (Eigen::Index j = 0; j < 3; ++j) {
    const Complex lambda = roots[j];
    CHECK((l * modes.q.col(j) - lambda * modes.q.col(j)).norm() <= 1e-8 * l.norm());
  }
}

TEST_CASE("grad3 accumulation limits at large wave number") {
  const double eps = 0.1;
  const GradModeData fast = grad3_modes({eps, 50.0});
  CHECK(std::abs(fast.lambda_ac.real() + 20.0 / 9.0) <= 0.02 * (20.0 / 9.0));
  CHECK(std::abs(fast.lambda_diff + 50.0 / 9.0) <= 0.02 * (50.0 / 9.0));

  // monotone approach of the acoustic real part through k = 5, 10, 50
  double previous_gap = 1e300;
  for (const double k : {5.0, 10.0, 50.0}) {
    const GradModeData modes = grad3_modes({eps, k});
    const double gap = std::abs(modes.lambda_ac.real() + 20.0 / 9.0);
    CHECK(gap < previous_gap);
    previous_gap = gap;
  }
}

TEST_CASE("grad3 spectrum is conjugation-closed and stable across the grid") {
  for (const double eps : {0.05, 0.1, 0.5}) {
    for (const double k : {0.5, 1.0, 5.0, 50.0}) {
      const SpectralData data = analyze(grad3({eps, k}));
      CHECK(data.stable);
      const auto& values = data.decomposition.values;
      for (Eigen::Index i = 0; i < 3; ++i) {
        double closest = 1e300;
        for (Eigen::Index j = 0; j < 3; ++j) {
          closest = std::min(closest, std::abs(values(j) - std::conj(values(i))));
        }
        CHECK(closest <= 1e-9);
      }
    }
  }
}

TEST_CASE("grad3 reduced model") {
  const GradParams params{0.1, 1.0};
  const GradReducedModel model = grad3_reduced(params);
  const GradModeData modes = grad3_modes(params);

  const auto t_eig = eig(model.transport);
  CHECK(near(t_eig.values(0), modes.lambda_ac, 1e-9));
  CHECK(near(t_eig.values(1), std::conj(modes.lambda_ac), 1e-9));

  // conjugate-pair symmetry: real diagonal, purely imaginary off-diagonal
  CHECK(std::abs(model.transport(0, 0).imag()) <= 1e-9);
  CHECK(std::abs(model.transport(1, 1).imag()) <= 1e-9);
  CHECK(std::abs(model.transport(0, 1).real()) <= 1e-9);
  CHECK(std::abs(model.transport(1, 0).real()) <= 1e-9);

  // the pressure row of T is the exact transport -5/3 i k
  CHECK(near(model.transport(0, 1), Complex(0.0, -5.0 / 3.0 * params.k), 1e-9));
}

TEST_CASE("reduced (p, u) trajectory matches the acoustic part of the full solution") {
  const GradParams params{0.1, 1.0};
  const GradReducedModel model = grad3_reduced(params);
  const SpectralData data = analyze(grad3(params));
  const SlowBasis acoustic = slow_basis(data, 2);

  // start on the slow manifold and compare (p, u) components
  ComplexVector xi0(2);
  xi0 << Complex(0.3, -0.2), Complex(0.1, 0.4);
  const TimeGrid grid = make_grid(8.0, 100);
  const Trajectory reduced_full = propagate_reduced(acoustic, xi0, grid);

  // integrate d(p,u)/dt = T (p,u) with the independent step integrator
  const LinearSystem pu_system = make_system(model.transport, "grad3_reduced");
  ComplexVector pu0(2);
  pu0 << reduced_full.states[0](0), reduced_full.states[0](1);
  const Trajectory pu = propagate_full_rk(pu_system, pu0, grid);

  for (Eigen::Index i = 0; i < grid.samples; ++i) {
    const auto& ambient = reduced_full.states[static_cast<std::size_t>(i)];
    const auto& planar = pu.states[static_cast<std::size_t>(i)];
    CHECK(std::abs(ambient(0) - planar(0)) <= 1e-8);
    CHECK(std::abs(ambient(1) - planar(1)) <= 1e-8);
  }
}

TEST_CASE("slow-orthogonal complement of grad3") {
  const GradParams params{0.1, 1.0};
  const ComplexVector v = grad3_slow_orthogonal_complement(params);
  CHECK(near(v.norm(), 1.0, 1e-14));

  const GradModeData modes = grad3_modes(params);
  CHECK(std::abs(inner(v, ComplexVector(modes.q.col(0)))) <= 1e-12);
  CHECK(std::abs(inner(v, ComplexVector(modes.q.col(1)))) <= 1e-12);

  // orthogonal projection kills it, the dop does not
  const SpectralData data = analyze(grad3(params));
  const SlowBasis basis = slow_basis(data, 2);
  CHECK(orthogonal_projection(basis).apply(v).norm() <= 1e-12);
  CHECK(dop_matrix(data.system, basis).apply(v).norm() > 0.1);
}
