#pragma once

#include <vector>

#include "slowproj/spectral.hpp"

namespace slowproj {

/// Uniform time grid starting at t = 0.
struct TimeGrid {
  double t_end = 0.0;
  Eigen::Index samples = 0;

  double dt() const { return t_end / static_cast<double>(samples - 1); }
  double time(Eigen::Index i) const { return dt() * static_cast<double>(i); }
};

TimeGrid make_grid(double t_end, Eigen::Index samples);

/// Horizon matching the error-functional truncation,
/// ln(1e-8) / (2 * abscissa); positive for stable systems.
double default_horizon(double spectral_abscissa);

enum class TrajectorySource { FullSpectral, FullRk, Reduced };

struct Trajectory {
  TimeGrid grid;
  std::vector<ComplexVector> states;
  TrajectorySource source = TrajectorySource::FullSpectral;
};

struct DeviationStats {
  double l2_time = 0.0;
  double sup = 0.0;
};

/// Modal propagation x(t) = V exp(diag(lambda) t) V^{-1} x0.
Trajectory propagate_full(const SpectralData& data, const ComplexVector& x0,
                          const TimeGrid& grid);

/// Classical fixed-substep RK4; the independent oracle integrator.
Trajectory propagate_full_rk(const LinearSystem& system, const ComplexVector& x0,
                             const TimeGrid& grid);

/// x(t) = sum_j xi_j exp(lambda_j t) x_j in ambient coordinates.
Trajectory propagate_reduced(const SlowBasis& basis, const ComplexVector& xi0,
                             const TimeGrid& grid);

/// Discrete counterpart of the cumulative-error integrand: trapezoid
/// L2-in-time distance and the sup over samples.
DeviationStats deviation(const Trajectory& a, const Trajectory& b);

/// Advances dx/dt = L x across t_span with RK4 substeps no longer than
/// max_step. Building block shared by propagate_full_rk and the
/// quadrature oracle.
ComplexVector rk4_advance(const ComplexMatrix& l, ComplexVector state, double t_span,
                          double max_step);

/// One RK4 step of size h for the linear field, as its propagator matrix
/// I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24.
ComplexMatrix rk4_step_matrix(const ComplexMatrix& l, double h);

/// Composition of the RK4 substeps spanning t_span (substeps sized like
/// rk4_advance); applying the result to a state advances it across the
/// whole interval in one multiply.
ComplexMatrix rk4_interval_map(const ComplexMatrix& l, double t_span, double max_step);

/// Substep bound keeping the RK4 trajectory within ~1e-7 of the exact
/// semigroup over the horizons used here.
double rk4_max_step(const ComplexMatrix& l);

}  // namespace slowproj
