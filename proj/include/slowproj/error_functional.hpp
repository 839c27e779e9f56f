#pragma once

#include "slowproj/projection.hpp"
#include "slowproj/trajectory.hpp"

namespace slowproj {

/// Split of the cumulative dynamical error
///   E(x0, xi) = 1/2 int_0^inf |exp(tL) x0 - exp(tL) x_slow(xi)|^2 dt
/// into the slow-manifold self-term, the cross term and the
/// xi-independent constant. total is their exact sum.
struct ErrorBreakdown {
  double e_inter = 0.0;
  double e_trans = 0.0;
  double e_const = 0.0;
  double total = 0.0;
};

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double horizon_factor = 1.5;
  int max_refinements = 20;
};

ErrorBreakdown error_closed_form(const LinearSystem& system, const SlowBasis& basis,
                                 const ComplexVector& x0, const ComplexVector& xi);

/// Complex derivative of the error in xi: I - G^T xi. Vanishes exactly at
/// the minimizer.
ComplexVector error_gradient(const Gramian& gramian, const ComplexVector& interaction,
                             const ComplexVector& xi);

/// Direct numerical realization of the error integral: the full
/// trajectory comes from the step integrator, the reduced one from modal
/// exponentials, and composite Simpson quadrature is refined by doubling
/// until successive estimates agree to rel_tol.
double quadrature_error(const LinearSystem& system, const SlowBasis& basis,
                        const ComplexVector& x0, const ComplexVector& xi,
                        const QuadratureConfig& cfg = {});

/// Derivative-free verification of the closed-form minimizer: gradient
/// descent on the 2n real coordinates of xi with central finite
/// differences of the quadrature objective and backtracking line search.
ComplexVector brute_force_minimizer(const LinearSystem& system, const SlowBasis& basis,
                                    const ComplexVector& x0,
                                    const QuadratureConfig& cfg = {});

}  // namespace slowproj
