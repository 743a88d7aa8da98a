#include "cuspedge/weighted_fe.hpp"

#include <cmath>
#include <limits>

#include "cuspedge/errors.hpp"

namespace cuspedge::fe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Past this a/h the moment expansion loses more than ~2 digits to cancellation.
constexpr double kMomentRatioLimit = 8.0;

// int_a^b rho^{e-1} d rho for a > 0, accurate when b is close to a.
double shifted_moment(double a, double b, double e) {
  const double x = std::log1p((b - a) / a);
  if (std::abs(e) < 1e-14) return x;
  return std::pow(a, e) * std::expm1(e * x) / e;
}

}  // namespace

double power_integral(double a, double b, double p) {
  if (!(a >= 0.0) || !(b > a)) throw InvalidArgument("cell must satisfy 0 <= a < b");
  const double e = p + 1.0;
  if (a == 0.0) return e > 0.0 ? std::pow(b, e) / e : kInf;
  return shifted_moment(a, b, e);
}

Eigen::Matrix2d power_mass_block(double a, double b, double p) {
  if (!(a >= 0.0) || !(b > a)) throw InvalidArgument("cell must satisfy 0 <= a < b");
  Eigen::Matrix2d block;
  const double h = b - a;

  if (a == 0.0) {
    // Beta integrals of rho^p (1 - rho/b)^i (rho/b)^j over [0, b]
    const double scale = std::pow(b, p + 1.0);
    block(0, 0) = p > -1.0 ? scale * 2.0 / ((p + 1.0) * (p + 2.0) * (p + 3.0)) : kInf;
    block(0, 1) = p > -2.0 ? scale / ((p + 2.0) * (p + 3.0)) : kInf;
    block(1, 1) = p > -3.0 ? scale / (p + 3.0) : kInf;
    block(1, 0) = block(0, 1);
    return block;
  }

  if (a / h < kMomentRatioLimit) {
    const double m0 = shifted_moment(a, b, p + 1.0);
    const double m1 = shifted_moment(a, b, p + 2.0);
    const double m2 = shifted_moment(a, b, p + 3.0);
    const double inv_h2 = 1.0 / (h * h);
    block(0, 0) = (b * b * m0 - 2.0 * b * m1 + m2) * inv_h2;
    block(0, 1) = (-a * b * m0 + (a + b) * m1 - m2) * inv_h2;
    block(1, 1) = (a * a * m0 - 2.0 * a * m1 + m2) * inv_h2;
    block(1, 0) = block(0, 1);
    return block;
  }

  const auto weight = [a, h, p](double t) { return std::pow(a + h * t, p); };
  block(0, 0) = h * gauss_legendre8([&](double t) { return weight(t) * (1 - t) * (1 - t); }, 0.0, 1.0);
  block(0, 1) = h * gauss_legendre8([&](double t) { return weight(t) * (1 - t) * t; }, 0.0, 1.0);
  block(1, 1) = h * gauss_legendre8([&](double t) { return weight(t) * t * t; }, 0.0, 1.0);
  block(1, 0) = block(0, 1);
  return block;
}

TridiagonalPencil<double> assemble(std::span<const double> nodes, const WeightedForm& form,
                                   Eigen::Index first, Eigen::Index last) {
  const auto n_nodes = static_cast<Eigen::Index>(nodes.size());
  if (n_nodes < 2) throw InvalidArgument("mesh needs at least one cell");
  if (first < 0 || last >= n_nodes || first > last)
    throw InvalidArgument("kept node range is empty or out of bounds");

  const Eigen::Index n = last - first + 1;
  Eigen::VectorXd kd = Eigen::VectorXd::Zero(n), ko = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 1, 0));
  Eigen::VectorXd md = Eigen::VectorXd::Zero(n), mo = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 1, 0));
  const bool has_potential = form.potential_coefficient != 0.0;

  for (Eigen::Index c = std::max<Eigen::Index>(first - 1, 0); c < std::min(last + 1, n_nodes - 1); ++c) {
    const double a = nodes[static_cast<std::size_t>(c)];
    const double b = nodes[static_cast<std::size_t>(c) + 1];
    const double h = b - a;

    const double g = power_integral(a, b, form.grad_exponent) / (h * h);
    Eigen::Matrix2d stiff;
    stiff << g, -g, -g, g;
    if (has_potential) stiff += form.potential_coefficient * power_mass_block(a, b, form.potential_exponent);
    const Eigen::Matrix2d mass = power_mass_block(a, b, form.mass_exponent);

    const Eigen::Index i0 = c - first;  // local index of node c
    const Eigen::Index i1 = i0 + 1;
    if (i0 >= 0) {
      kd(i0) += stiff(0, 0);
      md(i0) += mass(0, 0);
    }
    if (i1 < n) {
      kd(i1) += stiff(1, 1);
      md(i1) += mass(1, 1);
    }
    if (i0 >= 0 && i1 < n) {
      ko(i0) += stiff(0, 1);
      mo(i0) += mass(0, 1);
    }
  }
  return TridiagonalPencil<double>(std::move(kd), std::move(ko), std::move(md), std::move(mo));
}

double weighted_l2_squared(std::span<const double> nodes, std::span<const double> values, double p) {
  if (nodes.size() != values.size()) throw InvalidArgument("values must match mesh nodes");
  double sum = 0.0;
  for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
    const double u0 = values[c], u1 = values[c + 1];
    if (u0 == 0.0 && u1 == 0.0) continue;
    const Eigen::Matrix2d block = power_mass_block(nodes[c], nodes[c + 1], p);
    double cell = u1 * u1 * block(1, 1);
    if (u0 != 0.0) cell += u0 * u0 * block(0, 0) + 2.0 * u0 * u1 * block(0, 1);
    sum += cell;
  }
  return sum;
}

double weighted_dirichlet_squared(std::span<const double> nodes, std::span<const double> values,
                                  double p) {
  if (nodes.size() != values.size()) throw InvalidArgument("values must match mesh nodes");
  double sum = 0.0;
  for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
    const double du = values[c + 1] - values[c];
    if (du == 0.0) continue;
    const double h = nodes[c + 1] - nodes[c];
    sum += du * du / (h * h) * power_integral(nodes[c], nodes[c + 1], p);
  }
  return sum;
}

}  // namespace cuspedge::fe
