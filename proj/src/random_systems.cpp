#include "slowproj/random_systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace slowproj {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

double gaussian(std::mt19937_64& rng) {
  const double u1 = std::max(uniform01(rng), 1e-300);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex complex_gaussian(std::mt19937_64& rng) {
  const double re = gaussian(rng);
  const double im = gaussian(rng);
  return {re, im};
}

ComplexVector random_vector(std::mt19937_64& rng, Eigen::Index dim) {
  ComplexVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = complex_gaussian(rng);
  return v;
}

namespace {

// Real parts drawn in [re_min, re_max], spread out so that no two modes
// (outside a conjugate pair) share a real part.
std::vector<double> separated_real_parts(std::mt19937_64& rng, Eigen::Index count,
                                         const RandomSystemOptions& opts) {
  std::vector<double> re(static_cast<std::size_t>(count));
  for (int attempt = 0; attempt < 256; ++attempt) {
    for (auto& r : re) r = uniform(rng, opts.re_min, opts.re_max);
    std::vector<double> sorted = re;
    std::sort(sorted.begin(), sorted.end());
    bool ok = true;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i] - sorted[i - 1] < opts.min_re_separation) ok = false;
    }
    if (ok) return re;
  }
  // Fall back to an even spread.
  for (Eigen::Index i = 0; i < count; ++i) {
    re[static_cast<std::size_t>(i)] =
        opts.re_min + (opts.re_max - opts.re_min) * (static_cast<double>(i) + 0.5) /
                          static_cast<double>(count);
  }
  return re;
}

double condition_of(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const double smin = svd.singularValues()(m.cols() - 1);
  return smin > 0.0 ? svd.singularValues()(0) / smin
                    : std::numeric_limits<double>::infinity();
}

}  // namespace

LinearSystem random_stable_system(std::mt19937_64& rng,
                                  const RandomSystemOptions& opts) {
  const Eigen::Index dim =
      opts.min_dim +
      static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(opts.max_dim - opts.min_dim + 1));
  const Eigen::Index d = std::min(dim, opts.max_dim);

  if (!opts.real_entries) {
    const auto re = separated_real_parts(rng, d, opts);
    ComplexVector lambdas(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      lambdas(i) = Complex(re[static_cast<std::size_t>(i)],
                           uniform(rng, -opts.im_span, opts.im_span));
    }
    ComplexMatrix v(d, d);
    do {
      for (Eigen::Index j = 0; j < d; ++j) v.col(j) = random_vector(rng, d).normalized();
    } while (condition_of(v) > opts.max_vector_condition);
    const ComplexMatrix m = v * lambdas.asDiagonal() * v.inverse();
    return make_system(m, "random");
  }

  // Real-entried draw: conjugate-closed spectrum, paired columns.
  const Eigen::Index pairs = d / 2;
  const Eigen::Index reals = d - 2 * pairs;
  const auto re = separated_real_parts(rng, pairs + reals, opts);
  ComplexVector lambdas(d);
  ComplexMatrix v(d, d);
  Eigen::Index col = 0;
  for (Eigen::Index p = 0; p < pairs; ++p) {
    const Complex lambda(re[static_cast<std::size_t>(p)],
                         uniform(rng, 0.2, opts.im_span));
    const ComplexVector vec = random_vector(rng, d).normalized();
    lambdas(col) = lambda;
    v.col(col++) = vec;
    lambdas(col) = std::conj(lambda);
    v.col(col++) = vec.conjugate();
  }
  for (Eigen::Index r = 0; r < reals; ++r) {
    lambdas(col) = Complex(re[static_cast<std::size_t>(pairs + r)], 0.0);
    ComplexVector vec(d);
    for (Eigen::Index i = 0; i < d; ++i) vec(i) = gaussian(rng);
    v.col(col++) = vec.normalized();
  }
  if (condition_of(v) > opts.max_vector_condition) {
    return random_stable_system(rng, opts);
  }
  ComplexMatrix m = v * lambdas.asDiagonal() * v.inverse();
  m = m.real().cast<Complex>();
  return make_system(m, "random_real");
}

LinearSystem random_normal_system(std::mt19937_64& rng,
                                  const RandomSystemOptions& opts) {
  const Eigen::Index dim =
      opts.min_dim +
      static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(opts.max_dim - opts.min_dim + 1));
  const Eigen::Index d = std::min(dim, opts.max_dim);

  ComplexMatrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) g.col(j) = random_vector(rng, d);
  const Eigen::HouseholderQR<ComplexMatrix> qr(g);
  const ComplexMatrix u = qr.householderQ() * ComplexMatrix::Identity(d, d);

  const auto re = separated_real_parts(rng, d, opts);
  ComplexVector lambdas(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    lambdas(i) = Complex(re[static_cast<std::size_t>(i)],
                         uniform(rng, -opts.im_span, opts.im_span));
  }
  const ComplexMatrix m = u * lambdas.asDiagonal() * u.adjoint();
  return make_system(m, "random_normal");
}

Eigen::Index random_valid_slow_count(std::mt19937_64& rng, const SpectralData& data) {
  const Eigen::Index d = data.system.dim;
  std::vector<Eigen::Index> valid;
  for (Eigen::Index n = 1; n <= d; ++n) {
    try {
      (void)slow_basis(data, n);
      valid.push_back(n);
    } catch (const ConjugatePairSplitError&) {
    }
  }
  if (valid.empty()) {
    throw OutOfRangeError("random_valid_slow_count: no valid selection");
  }
  const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(valid.size()));
  return valid[std::min(pick, valid.size() - 1)];
}

}  // namespace slowproj
