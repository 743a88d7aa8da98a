#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cuspedge/model.hpp"
#include "cuspedge/sturm.hpp"

namespace cuspedge::spectrum {

/// Cross-section Laplacian eigenvalues <= lambda_max, ascending, with multiplicity.
std::vector<double> cross_section_eigs(const model::CrossSection& cs, double lambda_max);

/// Eigenvalue list of one separated factor: ascending values, each with a multiplicity weight.
struct WeightedList {
  std::vector<double> values;
  std::vector<std::int64_t> weights;
};

/**
 * Per-direction radial eigenvalues keyed by angular mode |m|, plus the
 * cross-section list. Modes m and -m share the list and count as two tuples.
 * Immutable once built.
 */
class SpectrumIndex {
 public:
  SpectrumIndex(std::vector<std::map<int, std::vector<double>>> per_direction,
                std::vector<double> cross, double lambda_max, bool certified);

  const std::vector<std::map<int, std::vector<double>>>& per_direction() const { return per_direction_; }
  const std::vector<double>& cross() const { return cross_; }
  double lambda_max() const { return lambda_max_; }
  bool certified() const { return certified_; }

  /// Direction i flattened over modes, ascending, m != 0 weighted by 2.
  const WeightedList& flattened(std::size_t direction) const { return flat_[direction]; }

 private:
  std::vector<std::map<int, std::vector<double>>> per_direction_;
  std::vector<double> cross_;
  double lambda_max_;
  bool certified_;
  std::vector<WeightedList> flat_;
};

/**
 * #{(m, n, eta) : sum_i lambda_{i,(m_i,n_i)} + lambda_eta <= lambda}.
 * Depth-first over directions with pruning; partial sums are accumulated
 * left to right in direction order, then the cross-section value.
 */
std::int64_t assemble_count(const SpectrumIndex& index, double lambda);

struct CountingCurve {
  std::vector<double> lambda;
  std::vector<std::int64_t> count;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
};

struct BuildOptions {
  sturm::MeshSpec mesh;
  sturm::SolveOptions solve;
  int threads = 1;
};

/// Radial eigenvalues of every mode of `base` (its m is ignored) not cut off at lambda_max.
std::map<int, std::vector<double>> radial_modes(const sturm::RadialProblem& base, double lambda_max,
                                                const BuildOptions& options, bool* certified = nullptr);

SpectrumIndex build_index(const model::CuspEdgeModel& model, BoundaryCondition outer_bc,
                          double lambda_max, const BuildOptions& options);

/// Counting curve of the model with outer condition bc at rho = delta.
/// Throws MeshTooCoarse when any radial solve fails its refinement check.
CountingCurve counting_curve(const model::CuspEdgeModel& model, BoundaryCondition bc,
                             const std::vector<double>& lambda_grid, const BuildOptions& options);

/// Counting curve of one radial block (inner, outer) x S^1 with point cross-section.
CountingCurve block_counting_curve(const sturm::RadialProblem& block,
                                   const std::vector<double>& lambda_grid, const BuildOptions& options);

/// Counts of an arbitrary ascending eigenvalue list on a grid.
CountingCurve curve_from_eigenvalues(const std::vector<double>& eigenvalues,
                                     const std::vector<double>& lambda_grid,
                                     BoundaryCondition bc = BoundaryCondition::Dirichlet);

/// lambda_min + (lambda_max - lambda_min) * i / (points - 1).
std::vector<double> uniform_grid(double lambda_min, double lambda_max, int points);

}  // namespace cuspedge::spectrum
