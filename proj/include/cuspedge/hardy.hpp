#pragma once

#include <span>
#include <vector>

#include "cuspedge/sturm.hpp"

namespace cuspedge::hardy {

enum class Support { Compact, Cutoff };

/// Weighted Hardy form pair on (0, R): int rho^{2beta+alpha} |u'|^2 against int rho^{2beta+alpha-2} |u|^2,
/// u(R) = 0, with R = rho0 (compact) or rho0 + eps (cutoff).
struct HardyProblem {
  double alpha = 0.0;
  double beta = 1.0;
  double rho0 = 1.0;
  double eps = 0.0;
  sturm::MeshSpec mesh{4000, 2.0};
  Support support = Support::Compact;
  /// Adds rho^s - R^s, s = near_extremal_exponent(alpha, beta), to the hat basis.
  bool near_extremal = true;

  double outer_radius() const { return support == Support::Cutoff ? rho0 + eps : rho0; }
};

struct HardyResult {
  double numeric_best = 0.0;       // sqrt of the smallest discrete Rayleigh quotient
  double theoretical_bound = 0.0;  // (2beta+alpha-1)/2
  double ratio = 0.0;              // numeric_best / theoretical_bound
  double rayleigh_min = 0.0;
  double refined_numeric_best = 0.0;
  int mesh_cells = 0;
};

/// 2/(2beta+alpha-1). OutsideRegime unless 2beta+alpha > 1.
double theoretical_constant(double alpha, double beta);

/// (1-alpha)/2 - beta + 0.01.
double near_extremal_exponent(double alpha, double beta);

/// Smallest eigenvalue of the discrete form pair, checked against the twice refined mesh.
HardyResult best_constant_numeric(const HardyProblem& problem);

/// Rayleigh quotient of the piecewise-linear interpolant.
double rayleigh_quotient(double alpha, double beta, std::span<const double> nodes, std::span<const double> values);

/// psi = 1 on [0, rho0], 1 - 3t^2 + 2t^3 with t = (rho - rho0)/eps on [rho0, rho0 + eps], 0 beyond.
double cutoff(double rho, double rho0, double eps);
double cutoff_derivative(double rho, double rho0, double eps);

/// Nodes of a graded mesh on (0, rho0) followed by uniform cells on (rho0, rho0 + eps).
std::vector<double> cutoff_mesh(const HardyProblem& problem, int margin_cells = 64);

struct BoundaryVariantResult {
  double lhs = 0.0;  // (2beta+alpha-1)/2 ||rho^{beta-1} psi u||
  double rhs = 0.0;  // ||rho^beta psi u'|| + ||rho^beta psi' u||
  double ratio = 0.0;
  bool holds = false;
};

/// Evaluates the cutoff form of the inequality for the piecewise-linear u on `nodes`,
/// which must contain rho0 and end at rho0 + eps.
BoundaryVariantResult boundary_variant_check(const HardyProblem& problem, std::span<const double> nodes,
                                             std::span<const double> values);

/// Tensor-product grid function, values in row-major order (last axis fastest).
struct TensorGrid {
  std::vector<std::vector<double>> nodes;
  std::vector<double> values;

  std::size_t dim() const { return nodes.size(); }
  std::vector<std::size_t> shape() const;
};

struct MultiHardyResult {
  double lhs = 0.0;  // ||rho^beta rho_i^{-1} u||
  double rhs = 0.0;  // 2/(2beta_i+alpha_i-1) ||rho^beta d_i u||
  bool holds = false;
};

/// Weighted norms in mu = prod rho_j^{alpha_j} d rho of the multilinear interpolant. u must vanish on
/// the outer face rho_i = rho0. OutsideRegime unless 2beta_j + alpha_j > 1 for every j.
MultiHardyResult multi_hardy_check(const std::vector<double>& alpha, const std::vector<double>& beta,
                                   std::size_t direction, const TensorGrid& u);

}  // namespace cuspedge::hardy
