#pragma once

#include <vector>

#include <Eigen/Core>

#include "cuspedge/model.hpp"
#include "cuspedge/weighted_fe.hpp"

namespace cuspedge::sturm {

/**
 * Separated radial operator
 *   -u'' - (alpha/rho) u' + m^2 rho^{-2k} u
 * on (inner, delta), self-adjoint in L^2(rho^alpha d rho).
 *
 * With inner = 0 the endpoint at the origin carries the Friedrichs
 * extension: no condition when the form admits u(0) != 0 with zero-capacity
 * cost (alpha >= 1 and a potential integrable against constants), u(0) = 0
 * otherwise. With inner > 0 the inner end takes `inner_bc`.
 */
struct RadialProblem {
  double alpha = 0.0;
  double k = 3.0;
  int m = 0;
  double delta = 1.0;
  BoundaryCondition outer_bc = BoundaryCondition::Dirichlet;
  double inner = 0.0;
  BoundaryCondition inner_bc = BoundaryCondition::Neumann;

  void validate() const;
};

/// Nodes rho_j = inner + (delta - inner) (j/N)^g, clustered toward the inner end.
class GradedMesh {
 public:
  GradedMesh(int cells, double grading, double inner, double outer);
  GradedMesh(int cells, double grading, double delta) : GradedMesh(cells, grading, 0.0, delta) {}

  int cells() const { return cells_; }
  double grading() const { return grading_; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Nested refinement: 2N cells, same grading, every old node kept.
  GradedMesh refined() const;

 private:
  int cells_;
  double grading_;
  std::vector<double> nodes_;
};

struct MeshSpec {
  int cells = 2000;
  double grading = 3.0;
};

struct EigResult {
  std::vector<double> eigenvalues;
  double lambda_max = 0.0;
  bool certified_complete = false;
  /// Relative change of the top reported eigenvalue under one uniform refinement.
  double refinement_change = 0.0;
};

struct SolveOptions {
  double rtol = 1e-3;
  bool check_refinement = true;
};

/// True when m^2 delta^{-2k} > lambda: the mode has no spectrum at or below lambda.
bool mode_cutoff(const RadialProblem& problem, double lambda);

/// Local stiffness and mass blocks of one cell.
struct LocalBlocks {
  Eigen::Matrix2d stiffness;
  Eigen::Matrix2d mass;
};

/**
 * Exact element integrals of the radial form on [a, b]. On a cell touching
 * the origin entries of the node at 0 are +inf when their integral diverges;
 * NumericalFailure is thrown when even the interior node's potential entry
 * int rho^{alpha-2k} (rho/b)^2 diverges (alpha - 2k + 2 <= -1).
 */
LocalBlocks element_integrals(double a, double b, double alpha, double k, int m);

/// The radial problem's weighted form.
fe::WeightedForm radial_form(const RadialProblem& problem);

/// Range of free nodes [first, last] after essential conditions.
std::pair<Eigen::Index, Eigen::Index> free_nodes(const RadialProblem& problem, const GradedMesh& mesh);

fe::TridiagonalPencil<double> assemble(const RadialProblem& problem, const GradedMesh& mesh);

/**
 * All generalized eigenvalues <= lambda_max by Sturm-count bisection.
 * Eigenvalues are upper bounds of the continuum ones. certified_complete is
 * false when the top eigenvalue moves by more than rtol under refinement.
 */
EigResult solve_eigs(const RadialProblem& problem, const GradedMesh& mesh, double lambda_max,
                     const SolveOptions& options = {});

}  // namespace cuspedge::sturm
