#include "cuspedge/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Core>

#include "cuspedge/errors.hpp"
#include "cuspedge/weighted_fe.hpp"

namespace cuspedge::hardy {

double theoretical_constant(double alpha, double beta) {
  const double gap = 2.0 * beta + alpha - 1.0;
  if (!(gap > 0.0)) {
    throw OutsideRegime("Hardy constant needs 2 beta + alpha > 1 (got " + std::to_string(gap + 1.0) + ")");
  }
  return 2.0 / gap;
}

double near_extremal_exponent(double alpha, double beta) { return 0.5 * (1.0 - alpha) - beta + 0.01; }

namespace {

// Tridiagonal pencil bordered by one dense row and column (the enrichment function).
struct ArrowPencil {
  fe::TridiagonalPencil<double> tri;
  Eigen::VectorXd k_border, m_border;
  double k_corner = 0.0, m_corner = 0.0;
  bool bordered = false;

  Eigen::Index count_below(double lambda) const {
    if (!bordered) return tri.count_below(lambda);
    const Eigen::Index n = tri.size();
    Eigen::Index negative = 0;
    double d = 1.0, y = 0.0;
    double schur = k_corner - lambda * m_corner;
    for (Eigen::Index i = 0; i < n; ++i) {
      double pivot = tri.stiff_diag()(i) - lambda * tri.mass_diag()(i);
      double border = k_border(i) - lambda * m_border(i);
      if (i > 0) {
        const double e = tri.stiff_off()(i - 1) - lambda * tri.mass_off()(i - 1);
        pivot -= e * (e / d);
        border -= e * (y / d);
      }
      if (pivot == 0.0) pivot = std::numeric_limits<double>::min();
      if (pivot < 0.0) ++negative;
      schur -= border * (border / pivot);
      d = pivot;
      y = border;
    }
    if (schur < 0.0) ++negative;
    return negative;
  }

  double smallest() const {
    double lo = 0.0, hi = 1.0;
    while (count_below(hi) < 1) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw NumericalFailure("Hardy pencil has no finite eigenvalue");
    }
    const double eps = std::numeric_limits<double>::epsilon();
    while (hi - lo > 4.0 * eps * hi) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if (count_below(mid) >= 1)
        hi = mid;
      else
        lo = mid;
    }
    return lo + 0.5 * (hi - lo);
  }
};

ArrowPencil build_pencil(const HardyProblem& p, std::span<const double> nodes) {
  const double q = 2.0 * p.beta + p.alpha;  // gradient weight exponent
  const double w = q - 2.0;                 // mass weight exponent
  fe::WeightedForm form;
  form.grad_exponent = q;
  form.mass_exponent = w;
  const auto last = static_cast<Eigen::Index>(nodes.size()) - 2;  // u = 0 at the outer radius

  ArrowPencil out;
  out.tri = fe::assemble(nodes, form, 0, last);
  if (!out.tri.all_finite()) throw NumericalFailure("non-finite Hardy element integrals");
  if (!p.near_extremal) return out;

  const double s = near_extremal_exponent(p.alpha, p.beta);
  const double R = nodes.back();
  const double Rs = std::pow(R, s);
  out.bordered = true;
  out.k_border = Eigen::VectorXd::Zero(last + 1);
  out.m_border = Eigen::VectorXd::Zero(last + 1);
  for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
    const double a = nodes[c], b = nodes[c + 1], h = b - a;
    const double g = s * fe::power_integral(a, b, q + s - 1.0) / h;
    const Eigen::Matrix2d shifted = fe::power_mass_block(a, b, w + s);
    const Eigen::Matrix2d plain = fe::power_mass_block(a, b, w);
    const Eigen::Vector2d moment = shifted.rowwise().sum() - Rs * plain.rowwise().sum();
    const auto i0 = static_cast<Eigen::Index>(c);
    out.k_border(i0) -= g;
    out.m_border(i0) += moment(0);
    if (i0 + 1 <= last) {
      out.k_border(i0 + 1) += g;
      out.m_border(i0 + 1) += moment(1);
    }
  }
  out.k_corner = s * s * fe::power_integral(0.0, R, q + 2.0 * s - 2.0);
  out.m_corner = fe::power_integral(0.0, R, w + 2.0 * s) - 2.0 * Rs * fe::power_integral(0.0, R, w + s) +
                 Rs * Rs * fe::power_integral(0.0, R, w);
  if (!out.k_border.allFinite() || !out.m_border.allFinite() || !std::isfinite(out.k_corner) ||
      !std::isfinite(out.m_corner)) {
    throw NumericalFailure("non-finite near-extremal integrals");
  }
  return out;
}

std::vector<double> problem_nodes(const HardyProblem& p, int cells) {
  return sturm::GradedMesh(cells, p.mesh.grading, 0.0, p.outer_radius()).nodes();
}

}  // namespace

HardyResult best_constant_numeric(const HardyProblem& problem) {
  HardyResult result;
  result.theoretical_bound = 1.0 / theoretical_constant(problem.alpha, problem.beta);
  if (!(problem.rho0 > 0.0) || !(problem.eps >= 0.0)) throw InvalidArgument("need rho0 > 0 and eps >= 0");
  if (problem.mesh.cells < 2) throw InvalidArgument("Hardy mesh needs at least two cells");

  const auto coarse = problem_nodes(problem, problem.mesh.cells);
  const auto fine = problem_nodes(problem, 2 * problem.mesh.cells);
  result.rayleigh_min = build_pencil(problem, coarse).smallest();
  result.numeric_best = std::sqrt(result.rayleigh_min);
  result.refined_numeric_best = std::sqrt(build_pencil(problem, fine).smallest());
  result.ratio = result.numeric_best / result.theoretical_bound;
  result.mesh_cells = problem.mesh.cells;
  const double change = std::abs(result.numeric_best - result.refined_numeric_best) / result.refined_numeric_best;
  if (change > 0.01) {
    throw MeshTooCoarse("Hardy constant changed by " + std::to_string(100.0 * change) +
                        "% under refinement; increase mesh cells");
  }
  return result;
}

double rayleigh_quotient(double alpha, double beta, std::span<const double> nodes, std::span<const double> values) {
  const double q = 2.0 * beta + alpha;
  const double den = fe::weighted_l2_squared(nodes, values, q - 2.0);
  if (!(den > 0.0)) throw InvalidArgument("trial function has zero weighted norm");
  return fe::weighted_dirichlet_squared(nodes, values, q) / den;
}

double cutoff(double rho, double rho0, double eps) {
  if (rho <= rho0) return 1.0;
  if (rho >= rho0 + eps) return 0.0;
  const double t = (rho - rho0) / eps;
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

double cutoff_derivative(double rho, double rho0, double eps) {
  if (rho <= rho0 || rho >= rho0 + eps) return 0.0;
  const double t = (rho - rho0) / eps;
  return -6.0 * t * (1.0 - t) / eps;
}

std::vector<double> cutoff_mesh(const HardyProblem& problem, int margin_cells) {
  if (!(problem.eps > 0.0)) throw InvalidArgument("cutoff mesh needs eps > 0");
  if (margin_cells < 1) throw InvalidArgument("cutoff mesh needs margin cells");
  auto nodes = sturm::GradedMesh(problem.mesh.cells, problem.mesh.grading, 0.0, problem.rho0).nodes();
  for (int j = 1; j <= margin_cells; ++j) nodes.push_back(problem.rho0 + problem.eps * j / margin_cells);
  nodes.back() = problem.rho0 + problem.eps;
  return nodes;
}

BoundaryVariantResult boundary_variant_check(const HardyProblem& problem, std::span<const double> nodes,
                                             std::span<const double> values) {
  const double c = 1.0 / theoretical_constant(problem.alpha, problem.beta);
  if (nodes.size() != values.size() || nodes.size() < 2) throw InvalidArgument("values must match mesh nodes");
  if (!(problem.eps > 0.0)) throw InvalidArgument("boundary variant needs eps > 0");
  const double rho0 = problem.rho0, eps = problem.eps;
  const auto split = std::find(nodes.begin(), nodes.end(), rho0);
  if (split == nodes.end()) throw InvalidArgument("mesh must contain a node at rho0");
  if (std::abs(nodes.back() - (rho0 + eps)) > 1e-12 * (rho0 + eps))
    throw InvalidArgument("mesh must end at rho0 + eps");

  const double q = 2.0 * problem.beta + problem.alpha;
  const auto inner = static_cast<std::size_t>(split - nodes.begin()) + 1;
  const auto in_nodes = nodes.first(inner);
  const auto in_values = values.first(inner);
  double mass = fe::weighted_l2_squared(in_nodes, in_values, q - 2.0);
  double grad = fe::weighted_dirichlet_squared(in_nodes, in_values, q);
  double tail = 0.0;
  for (std::size_t i = inner - 1; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i], b = nodes[i + 1];
    const double slope = (values[i + 1] - values[i]) / (b - a);
    const auto u = [&](double r) { return values[i] + slope * (r - a); };
    mass += fe::gauss_legendre8(
        [&](double r) { const double v = cutoff(r, rho0, eps) * u(r); return std::pow(r, q - 2.0) * v * v; }, a, b);
    grad += fe::gauss_legendre8(
        [&](double r) { const double v = cutoff(r, rho0, eps) * slope; return std::pow(r, q) * v * v; }, a, b);
    tail += fe::gauss_legendre8(
        [&](double r) { const double v = cutoff_derivative(r, rho0, eps) * u(r); return std::pow(r, q) * v * v; },
        a, b);
  }
  BoundaryVariantResult out;
  out.lhs = c * std::sqrt(mass);
  out.rhs = std::sqrt(grad) + std::sqrt(tail);
  out.ratio = out.lhs / out.rhs;
  out.holds = out.lhs <= out.rhs;
  return out;
}

std::vector<std::size_t> TensorGrid::shape() const {
  std::vector<std::size_t> s;
  for (const auto& n : nodes) s.push_back(n.size());
  return s;
}

namespace {

struct Tridiagonal {
  Eigen::VectorXd diag, off;
};

// Applies the symmetric tridiagonal matrix t along `axis` of a row-major array.
std::vector<double> apply_along(const std::vector<double>& x, const std::vector<std::size_t>& shape, std::size_t axis,
                                const Tridiagonal& t) {
  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < shape.size(); ++a) stride *= shape[a];
  const std::size_t len = shape[axis];
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t base = 0; base < x.size(); ++base) {
    if ((base / stride) % len != 0) continue;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t at = base + i * stride;
      double v = t.diag(static_cast<Eigen::Index>(i)) * x[at];
      if (i > 0) v += t.off(static_cast<Eigen::Index>(i - 1)) * x[at - stride];
      if (i + 1 < len) v += t.off(static_cast<Eigen::Index>(i)) * x[at + stride];
      y[at] = v;
    }
  }
  return y;
}

std::pair<Tridiagonal, Tridiagonal> matrices_1d(const std::vector<double>& nodes, double grad_exp, double mass_exp) {
  fe::WeightedForm form;
  form.grad_exponent = grad_exp;
  form.mass_exponent = mass_exp;
  const auto pencil = fe::assemble(nodes, form, 0, static_cast<Eigen::Index>(nodes.size()) - 1);
  return {{pencil.stiff_diag(), pencil.stiff_off()}, {pencil.mass_diag(), pencil.mass_off()}};
}

double quadratic(const TensorGrid& u, const std::vector<Tridiagonal>& factors) {
  const auto shape = u.shape();
  std::vector<double> y = u.values;
  for (std::size_t a = 0; a < shape.size(); ++a) y = apply_along(y, shape, a, factors[a]);
  return std::inner_product(u.values.begin(), u.values.end(), y.begin(), 0.0);
}

}  // namespace

MultiHardyResult multi_hardy_check(const std::vector<double>& alpha, const std::vector<double>& beta,
                                   std::size_t direction, const TensorGrid& u) {
  const std::size_t ell = u.dim();
  if (ell == 0 || alpha.size() != ell || beta.size() != ell) throw InvalidArgument("alpha, beta and grid rank differ");
  if (direction >= ell) throw InvalidArgument("direction out of range");
  for (std::size_t j = 0; j < ell; ++j) theoretical_constant(alpha[j], beta[j]);
  const auto shape = u.shape();
  std::size_t total = 1;
  for (std::size_t s : shape) {
    if (s < 2) throw InvalidArgument("every axis needs at least two nodes");
    total *= s;
  }
  if (u.values.size() != total) throw InvalidArgument("grid values do not match the node counts");

  std::size_t stride = 1;
  for (std::size_t a = direction + 1; a < ell; ++a) stride *= shape[a];
  for (std::size_t at = 0; at < total; ++at) {
    if ((at / stride) % shape[direction] == shape[direction] - 1 && u.values[at] != 0.0)
      throw InvalidArgument("u must vanish on the outer face of the checked direction");
  }

  std::vector<Tridiagonal> lhs_factors, rhs_factors;
  for (std::size_t j = 0; j < ell; ++j) {
    const double w = 2.0 * beta[j] + alpha[j];
    const auto [stiff, mass] = matrices_1d(u.nodes[j], w, j == direction ? w - 2.0 : w);
    lhs_factors.push_back(mass);
    rhs_factors.push_back(j == direction ? stiff : mass);
  }
  MultiHardyResult out;
  out.lhs = std::sqrt(quadratic(u, lhs_factors));
  out.rhs = theoretical_constant(alpha[direction], beta[direction]) * std::sqrt(quadratic(u, rhs_factors));
  out.holds = out.lhs <= out.rhs;
  return out;
}

}  // namespace cuspedge::hardy
