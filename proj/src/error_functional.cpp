#include "slowproj/error_functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace slowproj {

namespace {

void validate_config(const QuadratureConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || cfg.rel_tol >= 1.0) {
    throw BadParamsError("quadrature: rel_tol must lie in (0, 1)");
  }
  if (cfg.horizon_factor < 1.0) {
    throw BadParamsError("quadrature: horizon_factor must be at least 1");
  }
  if (cfg.max_refinements < 1) {
    throw BadParamsError("quadrature: max_refinements must be positive");
  }
}

double quadratic_part(const ComplexMatrix& g, const ComplexVector& xi) {
  // xi . G xi^* is real for Hermitian G.
  Complex s = 0.0;
  for (Eigen::Index j = 0; j < g.rows(); ++j) {
    for (Eigen::Index k = 0; k < g.cols(); ++k) {
      s += xi(j) * g(j, k) * std::conj(xi(k));
    }
  }
  return s.real();
}

ComplexVector slow_point(const SlowBasis& basis, const ComplexVector& xi) {
  return basis.vectors * xi;
}

// Samples of the reduced solution at t, directly from the modal form.
ComplexVector reduced_at(const SlowBasis& basis, const ComplexVector& xi, double t) {
  ComplexVector modal(basis.count());
  for (Eigen::Index j = 0; j < basis.count(); ++j) {
    modal(j) = xi(j) * std::exp(basis.eigenvalues(j) * t);
  }
  return basis.vectors * modal;
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;  // interval count, even
  double sum = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  }
  return sum * h / 3.0;
}

struct QuadratureSetup {
  double horizon = 0.0;
  double max_step = 0.0;
};

QuadratureSetup quadrature_setup(const LinearSystem& system,
                                 const QuadratureConfig& cfg) {
  validate_config(cfg);
  const double abscissa = spectral_abscissa(system);
  if (abscissa >= -kStabilityTol) {
    throw UnstableError(Complex(abscissa, 0.0));
  }
  QuadratureSetup setup;
  setup.horizon = cfg.horizon_factor * std::log(cfg.rel_tol) / (2.0 * abscissa);
  setup.max_step = rk4_max_step(system.matrix);
  return setup;
}

}  // namespace

ErrorBreakdown error_closed_form(const LinearSystem& system, const SlowBasis& basis,
                                 const ComplexVector& x0, const ComplexVector& xi) {
  if (xi.size() != basis.count()) {
    throw ShapeMismatchError("error_closed_form: xi length differs from basis size");
  }
  const SpectralData data = analyze(system);
  assert_stable(data);

  ErrorBreakdown out;
  const Gramian g = gramian(basis);
  out.e_inter = -0.5 * quadratic_part(g.entries, xi);
  const ComplexVector interaction = interaction_vector(system, basis, x0);
  out.e_trans = (interaction.array() * xi.conjugate().array()).sum().real();

  // The xi-independent constant is the same Gramian identity applied to
  // the expansion of x0 in the full eigenbasis.
  SlowBasis full;
  full.eigenvalues = data.decomposition.values;
  full.vectors = data.decomposition.right_vectors;
  full.gap = std::numeric_limits<double>::infinity();
  const ComplexVector coeffs = solve(full.vectors, x0);
  out.e_const = -0.5 * quadratic_part(gramian(full).entries, coeffs);

  out.total = out.e_inter + out.e_trans + out.e_const;
  return out;
}

ComplexVector error_gradient(const Gramian& gramian, const ComplexVector& interaction,
                             const ComplexVector& xi) {
  if (interaction.size() != gramian.count() || xi.size() != gramian.count()) {
    throw ShapeMismatchError("error_gradient: shapes disagree");
  }
  return interaction - gramian.entries.transpose() * xi;
}

double quadrature_error(const LinearSystem& system, const SlowBasis& basis,
                        const ComplexVector& x0, const ComplexVector& xi,
                        const QuadratureConfig& cfg) {
  if (x0.size() != system.dim || basis.ambient_dim() != system.dim) {
    throw ShapeMismatchError("quadrature_error: ambient dimension mismatch");
  }
  if (xi.size() != basis.count()) {
    throw ShapeMismatchError("quadrature_error: xi length differs from basis size");
  }
  const auto setup = quadrature_setup(system, cfg);
  const double horizon = setup.horizon;

  // Full-trajectory samples are refined in place: existing points are
  // kept and midpoints are advanced from their left neighbor by the
  // precomposed RK4 interval map, so every sample is integrated once.
  std::size_t intervals = 64;
  std::vector<ComplexVector> full;
  full.reserve(intervals + 1);
  full.push_back(x0);
  {
    const double dt = horizon / static_cast<double>(intervals);
    const ComplexMatrix advance = rk4_interval_map(system.matrix, dt, setup.max_step);
    for (std::size_t i = 1; i <= intervals; ++i) {
      full.push_back(advance * full.back());
    }
  }

  const double scale =
      1.0 + x0.squaredNorm() + slow_point(basis, xi).squaredNorm();
  const double abs_floor = 1e-13 * scale * std::max(horizon, 1.0);

  auto integrand_values = [&](const std::vector<ComplexVector>& samples) {
    std::vector<double> values(samples.size());
    const double dt = horizon / static_cast<double>(samples.size() - 1);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double t = dt * static_cast<double>(i);
      values[i] = 0.5 * (samples[i] - reduced_at(basis, xi, t)).squaredNorm();
    }
    return values;
  };

  double previous = simpson(integrand_values(full), horizon / static_cast<double>(intervals));
  for (int refinement = 0; refinement < cfg.max_refinements; ++refinement) {
    const double dt = horizon / static_cast<double>(intervals);
    const ComplexMatrix half_advance =
        rk4_interval_map(system.matrix, dt / 2.0, setup.max_step);
    std::vector<ComplexVector> refined;
    refined.reserve(2 * intervals + 1);
    for (std::size_t i = 0; i < intervals; ++i) {
      refined.push_back(full[i]);
      refined.push_back(half_advance * full[i]);
    }
    refined.push_back(full.back());
    full = std::move(refined);
    intervals *= 2;

    const double estimate =
        simpson(integrand_values(full), horizon / static_cast<double>(intervals));
    if (std::abs(estimate - previous) <= cfg.rel_tol * std::abs(estimate) + abs_floor) {
      return estimate;
    }
    previous = estimate;
  }
  throw NoConvergenceError("quadrature_error: refinement limit exceeded");
}

namespace {

// Quadrature objective on a frozen Simpson grid. Freezing the grid while
// the descent runs keeps the objective smooth in xi, which central
// differences require; the grid level itself is chosen adaptively first.
class FrozenQuadratureObjective {
public:
  FrozenQuadratureObjective(const LinearSystem& system, const SlowBasis& basis,
                            const ComplexVector& x0, const QuadratureConfig& cfg) {
    const auto setup = quadrature_setup(system, cfg);
    horizon_ = setup.horizon;
    n_ = basis.count();

    std::size_t intervals = 64;
    std::vector<ComplexVector> full;
    full.push_back(x0);
    {
      const double dt = horizon_ / static_cast<double>(intervals);
      const ComplexMatrix advance = rk4_interval_map(system.matrix, dt, setup.max_step);
      for (std::size_t i = 1; i <= intervals; ++i) {
        full.push_back(advance * full.back());
      }
    }
    // Refine on the xi-independent part of the integrand until Simpson
    // converges, then one extra halving for safety.
    auto base_values = [&](const std::vector<ComplexVector>& samples) {
      std::vector<double> values(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) {
        values[i] = 0.5 * samples[i].squaredNorm();
      }
      return values;
    };
    auto refine = [&]() {
      const double dt = horizon_ / static_cast<double>(intervals);
      const ComplexMatrix half_advance =
          rk4_interval_map(system.matrix, dt / 2.0, setup.max_step);
      std::vector<ComplexVector> refined;
      refined.reserve(2 * intervals + 1);
      for (std::size_t i = 0; i < intervals; ++i) {
        refined.push_back(full[i]);
        refined.push_back(half_advance * full[i]);
      }
      refined.push_back(full.back());
      full = std::move(refined);
      intervals *= 2;
    };
    double previous = simpson(base_values(full), horizon_ / static_cast<double>(intervals));
    bool converged = false;
    for (int refinement = 0; refinement < cfg.max_refinements; ++refinement) {
      refine();
      const double estimate =
          simpson(base_values(full), horizon_ / static_cast<double>(intervals));
      if (std::abs(estimate - previous) <=
          cfg.rel_tol * std::abs(estimate) + 1e-13 * (1.0 + x0.squaredNorm())) {
        converged = true;
        break;
      }
      previous = estimate;
    }
    if (!converged) {
      throw NoConvergenceError("brute_force_minimizer: quadrature grid did not converge");
    }
    refine();

    // Collapse the Simpson sum over samples into a quadratic form in xi:
    // f(xi) = 1/2 (c - 2 Re(b^* xi) + xi^* A xi).
    const std::size_t count = full.size();
    const double dt = horizon_ / static_cast<double>(intervals);
    constant_ = 0.0;
    linear_ = ComplexVector::Zero(n_);
    quad_ = ComplexMatrix::Zero(n_, n_);
    ComplexMatrix modes(basis.ambient_dim(), n_);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = dt * static_cast<double>(i);
      double w = (i % 2 == 1 ? 4.0 : 2.0);
      if (i == 0 || i + 1 == count) w = 1.0;
      w *= dt / 3.0;
      for (Eigen::Index j = 0; j < n_; ++j) {
        modes.col(j) = basis.vectors.col(j) * std::exp(basis.eigenvalues(j) * t);
      }
      constant_ += w * full[i].squaredNorm();
      linear_ += w * (modes.adjoint() * full[i]);
      quad_ += w * (modes.adjoint() * modes);
    }
  }

  double operator()(const Eigen::VectorXd& real_coords) const {
    ComplexVector xi(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      xi(j) = Complex(real_coords(2 * j), real_coords(2 * j + 1));
    }
    const double cross = (linear_.adjoint() * xi).value().real();
    const double self = (xi.adjoint() * quad_ * xi).value().real();
    return 0.5 * (constant_ - 2.0 * cross + self);
  }

  Eigen::Index coordinate_count() const { return 2 * n_; }

private:
  double horizon_ = 0.0;
  Eigen::Index n_ = 0;
  double constant_ = 0.0;
  ComplexVector linear_;
  ComplexMatrix quad_;
};

}  // namespace

ComplexVector brute_force_minimizer(const LinearSystem& system, const SlowBasis& basis,
                                    const ComplexVector& x0,
                                    const QuadratureConfig& cfg) {
  if (basis.count() > 3) {
    throw OutOfRangeError("brute_force_minimizer: oracle supports n <= 3");
  }
  if (x0.size() != system.dim) {
    throw ShapeMismatchError("brute_force_minimizer: dimension mismatch");
  }

  const FrozenQuadratureObjective objective(system, basis, x0, cfg);
  const Eigen::Index m = objective.coordinate_count();

  const double fd_step = 1e-6;
  auto gradient = [&](const Eigen::VectorXd& r) {
    Eigen::VectorXd g(m);
    Eigen::VectorXd probe = r;
    for (Eigen::Index k = 0; k < m; ++k) {
      probe(k) = r(k) + fd_step;
      const double plus = objective(probe);
      probe(k) = r(k) - fd_step;
      const double minus = objective(probe);
      probe(k) = r(k);
      g(k) = (plus - minus) / (2.0 * fd_step);
    }
    return g;
  };

  Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
  double f = objective(r);
  double step = 1.0;
  const int max_iterations = 10000;
  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    const Eigen::VectorXd g = gradient(r);
    const double gnorm = g.norm();
    if (gnorm <= 1e-7) {
      ComplexVector xi(basis.count());
      for (Eigen::Index j = 0; j < basis.count(); ++j) {
        xi(j) = Complex(r(2 * j), r(2 * j + 1));
      }
      return xi;
    }

    // Armijo backtracking along -g; the accepted step seeds the next try.
    double t = step * 2.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      const Eigen::VectorXd candidate = r - t * g;
      const double f_candidate = objective(candidate);
      if (f_candidate <= f - 1e-4 * t * gnorm * gnorm) {
        r = candidate;
        f = f_candidate;
        step = t;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      throw NoConvergenceError("brute_force_minimizer: line search stalled");
    }
  }
  throw NoConvergenceError("brute_force_minimizer: iteration limit exceeded");
}

}  // namespace slowproj
