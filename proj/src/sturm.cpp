#include "cuspedge/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cuspedge/errors.hpp"

namespace cuspedge::sturm {

void RadialProblem::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be positive");
  if (!(alpha >= 0.0)) throw InvalidArgument("weight exponent alpha must be >= 0");
  if (!(k >= 1.0)) throw InvalidArgument("cusp order k must be >= 1");
  if (!(inner >= 0.0) || !(inner < delta)) throw InvalidArgument("need 0 <= inner < delta");
}

GradedMesh::GradedMesh(int cells, double grading, double inner, double outer)
    : cells_(cells), grading_(grading) {
  if (cells < 1) throw InvalidArgument("mesh needs at least one cell");
  if (!(grading >= 1.0)) throw InvalidArgument("mesh grading must be >= 1");
  if (!(inner >= 0.0) || !(outer > inner)) throw InvalidArgument("mesh interval must satisfy 0 <= inner < outer");
  nodes_.resize(static_cast<std::size_t>(cells) + 1);
  const double span = outer - inner;
  for (int j = 0; j <= cells; ++j) {
    nodes_[static_cast<std::size_t>(j)] = inner + span * std::pow(static_cast<double>(j) / cells, grading);
  }
  nodes_.front() = inner;
  nodes_.back() = outer;
}

GradedMesh GradedMesh::refined() const {
  return GradedMesh(2 * cells_, grading_, nodes_.front(), nodes_.back());
}

bool mode_cutoff(const RadialProblem& problem, double lambda) {
  if (problem.m == 0) return false;
  const double m2 = static_cast<double>(problem.m) * problem.m;
  return m2 * std::pow(problem.delta, -2.0 * problem.k) > lambda;
}

LocalBlocks element_integrals(double a, double b, double alpha, double k, int m) {
  const RadialProblem shape{alpha, k, m, b};
  const fe::WeightedForm form = radial_form(shape);
  if (a == 0.0 && m != 0 && !(form.potential_exponent + 2.0 > -1.0)) {
    throw NumericalFailure("potential integral of rho^" + std::to_string(form.potential_exponent) +
                           " against (rho/b)^2 diverges at rho = 0");
  }
  const double h = b - a;
  const double g = fe::power_integral(a, b, form.grad_exponent) / (h * h);
  LocalBlocks blocks;
  blocks.stiffness << g, -g, -g, g;
  if (m != 0) blocks.stiffness += form.potential_coefficient * fe::power_mass_block(a, b, form.potential_exponent);
  blocks.mass = fe::power_mass_block(a, b, form.mass_exponent);
  return blocks;
}

fe::WeightedForm radial_form(const RadialProblem& problem) {
  fe::WeightedForm form;
  form.grad_exponent = problem.alpha;
  form.mass_exponent = problem.alpha;
  if (problem.m != 0) {
    form.potential_coefficient = static_cast<double>(problem.m) * problem.m;
    form.potential_exponent = problem.alpha - 2.0 * problem.k;
  }
  return form;
}

std::pair<Eigen::Index, Eigen::Index> free_nodes(const RadialProblem& problem, const GradedMesh& mesh) {
  Eigen::Index first = 0;
  if (problem.inner > 0.0) {
    first = problem.inner_bc == BoundaryCondition::Dirichlet ? 1 : 0;
  } else {
    const double pot = problem.alpha - 2.0 * problem.k;
    if (problem.m != 0 && pot + 2.0 <= -1.0) {
      // no hat function touching the origin has finite energy: u vanishes on the first cell
      first = 2;
    } else if (problem.alpha < 1.0 || (problem.m != 0 && pot <= -1.0)) {
      first = 1;
    }
  }
  const Eigen::Index last = problem.outer_bc == BoundaryCondition::Dirichlet ? mesh.cells() - 1 : mesh.cells();
  if (first > last) throw InvalidArgument("mesh too small for the boundary conditions");
  return {first, last};
}

fe::TridiagonalPencil<double> assemble(const RadialProblem& problem, const GradedMesh& mesh) {
  problem.validate();
  if (std::abs(mesh.nodes().front() - problem.inner) > 1e-15 * problem.delta ||
      std::abs(mesh.nodes().back() - problem.delta) > 1e-15 * problem.delta) {
    throw InvalidArgument("mesh does not span the problem interval");
  }
  const auto [first, last] = free_nodes(problem, mesh);
  auto pencil = fe::assemble(mesh.nodes(), radial_form(problem), first, last);
  if (!pencil.all_finite()) {
    throw NumericalFailure("non-finite element integrals (alpha=" + std::to_string(problem.alpha) +
                           ", k=" + std::to_string(problem.k) + ", m=" + std::to_string(problem.m) + ")");
  }
  return pencil;
}

EigResult solve_eigs(const RadialProblem& problem, const GradedMesh& mesh, double lambda_max,
                     const SolveOptions& options) {
  if (!(lambda_max > 0.0)) throw InvalidArgument("lambda_max must be positive");
  EigResult result;
  result.lambda_max = lambda_max;
  if (mode_cutoff(problem, lambda_max)) {
    result.certified_complete = true;
    return result;
  }

  const auto pencil = assemble(problem, mesh);
  result.eigenvalues = pencil.eigenvalues_up_to(lambda_max);
  // the form is nonnegative; values within bisection resolution of 0 are a zero mode
  const double zero_band = 64.0 * std::numeric_limits<double>::epsilon() * std::max(lambda_max, 1.0);
  for (double& v : result.eigenvalues) {
    if (v <= zero_band) v = 0.0;
  }
  // with m = 0 and no essential condition the constants are an exact discrete null space, but
  // the tiny mass entries near the origin leave the computed value well above the band
  const auto [first, last] = free_nodes(problem, mesh);
  if (problem.m == 0 && first == 0 && last == mesh.cells() && !result.eigenvalues.empty()) {
    result.eigenvalues.front() = 0.0;
  }

  result.certified_complete = true;
  if (options.check_refinement && !result.eigenvalues.empty()) {
    const auto fine = assemble(problem, mesh.refined());
    const auto top = static_cast<Eigen::Index>(result.eigenvalues.size()) - 1;
    const double coarse_value = result.eigenvalues.back();
    const double fine_value = std::max(fine.eigenvalue(top), 0.0);
    const double scale = std::max(std::abs(coarse_value), 1e-8 * lambda_max);
    result.refinement_change = std::abs(coarse_value - fine_value) / scale;
    result.certified_complete = result.refinement_change <= options.rtol;
  }
  return result;
}

}  // namespace cuspedge::sturm
