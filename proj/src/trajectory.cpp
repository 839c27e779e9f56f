#include "slowproj/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace slowproj {

TimeGrid make_grid(double t_end, Eigen::Index samples) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw BadParamsError("make_grid: t_end must be positive and finite");
  }
  if (samples < 2) {
    throw BadParamsError("make_grid: need at least two samples");
  }
  return TimeGrid{t_end, samples};
}

double default_horizon(double spectral_abscissa) {
  if (spectral_abscissa >= -kStabilityTol) {
    throw UnstableError(Complex(spectral_abscissa, 0.0));
  }
  return std::log(1e-8) / (2.0 * spectral_abscissa);
}

Trajectory propagate_full(const SpectralData& data, const ComplexVector& x0,
                          const TimeGrid& grid) {
  if (x0.size() != data.system.dim) {
    throw ShapeMismatchError("propagate_full: initial condition dimension differs");
  }
  if (data.decomposition.vector_condition > kDefectiveCondition) {
    throw NearDefectiveError("propagate_full: near-defective eigenvector matrix");
  }
  const ComplexMatrix& v = data.decomposition.right_vectors;
  const ComplexVector coeffs = solve(v, x0);

  Trajectory out;
  out.grid = grid;
  out.source = TrajectorySource::FullSpectral;
  out.states.reserve(static_cast<std::size_t>(grid.samples));
  const Eigen::Index d = data.system.dim;
  ComplexVector modal(d);
  for (Eigen::Index i = 0; i < grid.samples; ++i) {
    const double t = grid.time(i);
    for (Eigen::Index j = 0; j < d; ++j) {
      modal(j) = coeffs(j) * std::exp(data.decomposition.values(j) * t);
    }
    out.states.push_back(v * modal);
  }
  return out;
}

double rk4_max_step(const ComplexMatrix& l) {
  return 0.002 / std::max(1.0, l.norm());
}

namespace {

long substep_count(double t_span, double max_step) {
  const double raw_steps = std::ceil(t_span / max_step);
  if (raw_steps > 5e7) {
    throw StepUnderflowError("rk4_advance: substep count overflow");
  }
  return static_cast<long>(raw_steps);
}

}  // namespace

ComplexMatrix rk4_step_matrix(const ComplexMatrix& l, double h) {
  const Eigen::Index d = l.rows();
  ComplexMatrix step = ComplexMatrix::Identity(d, d);
  ComplexMatrix term = ComplexMatrix::Identity(d, d);
  for (int order = 1; order <= 4; ++order) {
    term = (h / static_cast<double>(order)) * (l * term);
    step += term;
  }
  return step;
}

ComplexVector rk4_advance(const ComplexMatrix& l, ComplexVector state, double t_span,
                          double max_step) {
  if (t_span == 0.0) return state;
  if (!(t_span > 0.0) || !(max_step > 0.0)) {
    throw BadParamsError("rk4_advance: spans and steps must be positive");
  }
  const long steps = substep_count(t_span, max_step);
  const double h = t_span / static_cast<double>(steps);
  const ComplexMatrix step = rk4_step_matrix(l, h);
  for (long s = 0; s < steps; ++s) {
    state = step * state;
  }
  return state;
}

ComplexMatrix rk4_interval_map(const ComplexMatrix& l, double t_span, double max_step) {
  if (!(t_span > 0.0) || !(max_step > 0.0)) {
    throw BadParamsError("rk4_interval_map: spans and steps must be positive");
  }
  long steps = substep_count(t_span, max_step);
  const double h = t_span / static_cast<double>(steps);
  ComplexMatrix base = rk4_step_matrix(l, h);
  ComplexMatrix map = ComplexMatrix::Identity(l.rows(), l.cols());
  while (steps > 0) {
    if (steps & 1) map = base * map;
    steps >>= 1;
    if (steps > 0) base = base * base;
  }
  return map;
}

Trajectory propagate_full_rk(const LinearSystem& system, const ComplexVector& x0,
                             const TimeGrid& grid) {
  if (x0.size() != system.dim) {
    throw ShapeMismatchError("propagate_full_rk: initial condition dimension differs");
  }
  const double max_step = rk4_max_step(system.matrix);

  Trajectory out;
  out.grid = grid;
  out.source = TrajectorySource::FullRk;
  out.states.reserve(static_cast<std::size_t>(grid.samples));
  out.states.push_back(x0);
  for (Eigen::Index i = 1; i < grid.samples; ++i) {
    out.states.push_back(rk4_advance(system.matrix, out.states.back(), grid.dt(), max_step));
  }
  return out;
}

Trajectory propagate_reduced(const SlowBasis& basis, const ComplexVector& xi0,
                             const TimeGrid& grid) {
  if (xi0.size() != basis.count()) {
    throw ShapeMismatchError("propagate_reduced: coordinate dimension differs");
  }
  Trajectory out;
  out.grid = grid;
  out.source = TrajectorySource::Reduced;
  out.states.reserve(static_cast<std::size_t>(grid.samples));
  ComplexVector modal(basis.count());
  for (Eigen::Index i = 0; i < grid.samples; ++i) {
    const double t = grid.time(i);
    for (Eigen::Index j = 0; j < basis.count(); ++j) {
      modal(j) = xi0(j) * std::exp(basis.eigenvalues(j) * t);
    }
    out.states.push_back(basis.vectors * modal);
  }
  return out;
}

DeviationStats deviation(const Trajectory& a, const Trajectory& b) {
  if (a.grid.t_end != b.grid.t_end || a.grid.samples != b.grid.samples) {
    throw GridMismatchError("deviation: trajectories use different grids");
  }
  if (a.states.size() != b.states.size() ||
      (!a.states.empty() && a.states[0].size() != b.states[0].size())) {
    throw GridMismatchError("deviation: trajectories have different shapes");
  }
  DeviationStats stats;
  double integral = 0.0;
  const double dt = a.grid.dt();
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    const double sq = (a.states[i] - b.states[i]).squaredNorm();
    stats.sup = std::max(stats.sup, std::sqrt(sq));
    const bool endpoint = i == 0 || i + 1 == a.states.size();
    integral += (endpoint ? 0.5 : 1.0) * sq * dt;
  }
  stats.l2_time = std::sqrt(integral);
  return stats;
}

}  // namespace slowproj
