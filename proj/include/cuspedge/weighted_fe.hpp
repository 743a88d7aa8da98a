#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cuspedge::fe {

/// Integral of rho^p over [a, b], 0 <= a < b. +inf when divergent at rho = 0.
double power_integral(double a, double b, double p);

/**
 * Local block int_a^b rho^p phi_i phi_j d rho for the two hat functions of the
 * cell [a, b] (phi_0 = 1 at a, phi_1 = 1 at b).
 *
 * For a = 0 the closed forms are Beta integrals. Entries whose integral
 * diverges at rho = 0 are +inf: the (0,0) entry needs p > -1, the (0,1) entry
 * p > -2 and the (1,1) entry p > -3. Cells away from the origin use moment
 * closed forms while a/h is small and 8-point Gauss-Legendre in the local
 * coordinate otherwise, where moment differences would cancel.
 */
Eigen::Matrix2d power_mass_block(double a, double b, double p);

/// Coefficients of a one-dimensional weighted quadratic form pair on hat functions:
///   stiffness  int rho^grad_exponent |u'|^2 + potential_coefficient * int rho^potential_exponent |u|^2
///   mass       int rho^mass_exponent |u|^2
struct WeightedForm {
  double grad_exponent = 0.0;
  double mass_exponent = 0.0;
  double potential_coefficient = 0.0;
  double potential_exponent = 0.0;
};

/// Symmetric tridiagonal generalized eigenproblem K x = lambda M x with M positive definite.
template <typename Scalar>
class TridiagonalPencil {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TridiagonalPencil() = default;
  TridiagonalPencil(Vector stiff_diag, Vector stiff_off, Vector mass_diag, Vector mass_off)
      : stiff_diag_(std::move(stiff_diag)),
        stiff_off_(std::move(stiff_off)),
        mass_diag_(std::move(mass_diag)),
        mass_off_(std::move(mass_off)) {}

  Eigen::Index size() const { return stiff_diag_.size(); }
  const Vector& stiff_diag() const { return stiff_diag_; }
  const Vector& stiff_off() const { return stiff_off_; }
  const Vector& mass_diag() const { return mass_diag_; }
  const Vector& mass_off() const { return mass_off_; }

  bool all_finite() const {
    return stiff_diag_.allFinite() && stiff_off_.allFinite() && mass_diag_.allFinite() &&
           mass_off_.allFinite();
  }

  /// Number of eigenvalues strictly below lambda (inertia of K - lambda M).
  Eigen::Index count_below(Scalar lambda) const {
    const Eigen::Index n = size();
    Eigen::Index negative = 0;
    Scalar d = Scalar(1);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar pivot = stiff_diag_(i) - lambda * mass_diag_(i);
      if (i > 0) {
        const Scalar e = stiff_off_(i - 1) - lambda * mass_off_(i - 1);
        pivot -= e * (e / d);
      }
      if (pivot == Scalar(0)) pivot = std::numeric_limits<Scalar>::min();
      if (pivot < Scalar(0)) ++negative;
      d = pivot;
    }
    return negative;
  }

  /// Eigenvalue j (0-based, ascending) by bisection inside [lo, hi], which must bracket it.
  Scalar bisect(Eigen::Index j, Scalar lo, Scalar hi) const {
    narrow(j, lo, hi);
    return lo + (hi - lo) / Scalar(2);
  }

  /// A value below every eigenvalue.
  Scalar lower_bound() const {
    Scalar lo = Scalar(-1);
    while (count_below(lo) > 0) lo *= Scalar(2);
    return lo;
  }

  /// All eigenvalues <= lambda_max, ascending.
  std::vector<Scalar> eigenvalues_up_to(Scalar lambda_max) const {
    const Scalar hi = std::nextafter(lambda_max, std::numeric_limits<Scalar>::infinity());
    const Eigen::Index n = count_below(hi);
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(n));
    Scalar lo = lower_bound();
    for (Eigen::Index j = 0; j < n; ++j) {
      // count_below(lo) <= j holds for every later index as well
      Scalar a = lo, b = hi;
      narrow(j, a, b);
      out.push_back(a + (b - a) / Scalar(2));
      lo = a;
    }
    for (auto& v : out) v = std::min(v, lambda_max);
    return out;
  }

  /// Eigenvalue j alone.
  Scalar eigenvalue(Eigen::Index j) const {
    Scalar hi = Scalar(1);
    while (count_below(hi) <= j) hi *= Scalar(2);
    return bisect(j, lower_bound(), hi);
  }

 private:
  // Shrinks [lo, hi] around eigenvalue j to relative machine precision.
  void narrow(Eigen::Index j, Scalar& lo, Scalar& hi) const {
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    // absolute floor keeps zero eigenvalues from bisecting into the subnormals
    const Scalar floor = eps * std::max(std::abs(lo), std::abs(hi));
    for (int iter = 0; iter < 4096; ++iter) {
      if (hi - lo <= std::max(floor, Scalar(2) * eps * std::max(std::abs(lo), std::abs(hi)))) break;
      const Scalar mid = lo + (hi - lo) / Scalar(2);
      if (mid <= lo || mid >= hi) break;
      if (count_below(mid) > j)
        hi = mid;
      else
        lo = mid;
    }
  }

  Vector stiff_diag_, stiff_off_, mass_diag_, mass_off_;
};

/**
 * Assembles the pencil of `form` over the hat functions of `nodes` and keeps
 * the contiguous node range [first, last]. Entries of discarded nodes may be
 * non-finite; kept entries are returned as computed.
 */
TridiagonalPencil<double> assemble(std::span<const double> nodes, const WeightedForm& form,
                                   Eigen::Index first, Eigen::Index last);

/// int rho^p |u|^2 for the piecewise-linear interpolant of `values` on `nodes`.
double weighted_l2_squared(std::span<const double> nodes, std::span<const double> values, double p);

/// int rho^p |u'|^2 for the piecewise-linear interpolant of `values` on `nodes`.
double weighted_dirichlet_squared(std::span<const double> nodes, std::span<const double> values,
                                  double p);

/// Integrates f over [a, b] with 8-point Gauss-Legendre.
template <typename F>
double gauss_legendre8(F&& f, double a, double b);

}  // namespace cuspedge::fe

#include <boost/math/quadrature/gauss.hpp>

namespace cuspedge::fe {

template <typename F>
double gauss_legendre8(F&& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
  }
  return half * sum;
}

}  // namespace cuspedge::fe
