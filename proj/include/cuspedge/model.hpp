#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cuspedge {

enum class BoundaryCondition { Dirichlet, Neumann };

std::string to_string(BoundaryCondition bc);
BoundaryCondition boundary_condition_from_string(const std::string& s);

namespace model {

enum class CrossSectionKind { Point, FlatTorus, Box };

/// Compact factor B transverse to the cusp directions.
struct CrossSection {
  CrossSectionKind kind = CrossSectionKind::Point;
  std::vector<double> lengths;  // torus circumferences or box sides
  BoundaryCondition bc = BoundaryCondition::Dirichlet;  // box only

  int dim() const { return static_cast<int>(lengths.size()); }
  double volume() const;

  static CrossSection point() { return {}; }
  static CrossSection flat_torus(std::vector<double> lengths);
  static CrossSection box(std::vector<double> lengths, BoundaryCondition bc);
};

/**
 * Model crossing cusp-edge space (0,delta)^ell x (S^1)^ell x B with metric
 *   sum_i (d rho_i^2 + rho_i^{2 k_i} d theta_i^2) + dy^2.
 */
class CuspEdgeModel {
 public:
  CuspEdgeModel(std::vector<double> k, double delta, CrossSection cross_section = {});

  int ell() const { return static_cast<int>(k_.size()); }
  const std::vector<double>& k() const { return k_; }
  double delta() const { return delta_; }
  const CrossSection& cross_section() const { return cross_; }
  int dimension() const { return 2 * ell() + cross_.dim(); }

  /// ell + |k|, the exponent of delta in the cusp-block error.
  double beta() const;

  /// Essential self-adjointness of the model Laplacian is only asserted for k_i >= 3.
  bool self_adjointness_assured() const;

  CuspEdgeModel with_delta(double delta) const;

 private:
  std::vector<double> k_;
  double delta_;
  CrossSection cross_;
};

double volume(const CuspEdgeModel& model);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// omega_n / (2 pi)^n * Vol, the leading Weyl coefficient of lambda^{n/2}.
double weyl_constant(const CuspEdgeModel& model);
double weyl_constant(int n, double vol);

CuspEdgeModel model_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const CuspEdgeModel& model);

// Admissibility of metric perturbation coefficients.

struct PerturbationRecord {
  std::vector<double> rho;
  std::map<std::string, double> values;
};

struct PerturbationSample {
  double eta = 1.0;
  std::vector<PerturbationRecord> samples;
};

struct CoefficientFit {
  std::optional<double> slope;  // empty when every value sits below the floor
  bool pass = false;
};

struct AdmissibilityReport {
  std::map<std::string, CoefficientFit> coefficients;
  bool all_pass() const;
};

struct AdmissibilityOptions {
  double slope_tolerance = 0.1;
  double absolute_floor = 1e-14;
};

AdmissibilityReport check_admissibility(const PerturbationSample& sample,
                                        const CuspEdgeModel& model,
                                        const AdmissibilityOptions& options = {});

}  // namespace model
}  // namespace cuspedge
