#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cuspedge/model.hpp"
#include "cuspedge/spectrum.hpp"

namespace cuspedge::weyl {

using MultiIndex = std::vector<int>;

struct Schedule {
  int m0;
  int m;
};

/// m = round(log2(lambda)/2), m0 = max(1, round(log2(lambda)/beta)).
Schedule schedule(double lambda, double beta);

/**
 * Dyadic decomposition of (0, 2^{-m0})^ell into blocks I_mu, mu_i in
 * {m0, ..., m+1}, I_j = (2^{-j-1}, 2^{-j}) for j <= m and the terminal
 * interval I_{m+1} = (0, 2^{-m-1}). Blocks are listed in lexicographic order.
 */
class BracketingPartition {
 public:
  BracketingPartition(int ell, int m0, int m);

  int ell() const { return ell_; }
  int m0() const { return m0_; }
  int m() const { return m_; }
  double delta() const;
  const std::vector<MultiIndex>& blocks() const { return blocks_; }

  static double interval_length(int j, int m);
  bool is_terminal(const MultiIndex& mu) const;
  /// Sum over blocks of the product of side lengths; equals delta^ell exactly.
  double covered_measure() const;

 private:
  int ell_, m0_, m_;
  std::vector<MultiIndex> blocks_;
};

/// #{(xi, zeta, eta) in Z^ell x Z^ell x Z^cross_dim : sum 2^{2 mu_j} xi_j^2 + sum 2^{2 mu_j k_j} zeta_j^2 + |eta|^2 <= lambda}.
std::int64_t block_lattice_count(const MultiIndex& mu, const std::vector<double>& k, int cross_dim,
                                 double lambda);

/// (2 floor(sqrt(lambda) 2^{-mu_j}) + 1, 2 floor(sqrt(lambda) 2^{-mu_j k_j}) + 1, 2 floor(sqrt(lambda)) + 1).
std::array<std::int64_t, 3> per_coordinate_bounds(int mu_j, double k_j, double lambda);

/// Product of per-coordinate bounds over all coordinates of a block.
double per_coordinate_bound_product(const MultiIndex& mu, const std::vector<double>& k, int cross_dim,
                                    double lambda);

/// Sum of block_lattice_count over all blocks, terminal indices m+1 counted as m.
std::int64_t cusp_lattice_total(const BracketingPartition& partition, const std::vector<double>& k,
                                int cross_dim, double lambda);

struct CuspErrorBound {
  double block_coefficient;   // prod_j sum_{mu=m0}^{m} 2^{-(1+k_j) mu}
  double closed_coefficient;  // delta^{ell+|k|} with delta = 2^{-m0}
  double lambda_power;        // lambda^{n/2}
  double block_bound() const { return block_coefficient * lambda_power; }
  double closed_bound() const { return closed_coefficient * lambda_power; }
};

CuspErrorBound cusp_error_bound(const model::CuspEdgeModel& model, const Schedule& sched, double lambda);
/// Same with (m0, m) from schedule(lambda, ell + |k|).
CuspErrorBound cusp_error_bound(const model::CuspEdgeModel& model, double lambda);

struct Violation {
  std::size_t index;
  double lambda;
  std::int64_t lower, full, upper;
};

struct SandwichReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
};

struct SandwichTolerance {
  std::vector<std::int64_t> lower;  // allowed excess of N_D over N per grid point
  std::vector<std::int64_t> upper;  // allowed excess of N over N_N per grid point
};

/// Checks N_D <= N <= N_N at every grid point, N_D and N_N summed over parts.
SandwichReport sandwich_check(const std::vector<spectrum::CountingCurve>& dirichlet_parts,
                              const spectrum::CountingCurve& full,
                              const std::vector<spectrum::CountingCurve>& neumann_parts,
                              const std::optional<SandwichTolerance>& tolerance = std::nullopt);

struct WeylFit {
  double slope = 0.0;
  double theoretical = 0.0;
  double rel_error = 0.0;
  int n = 0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
};

/// Least squares through the origin of count against lambda^{n/2} on the top half of the grid.
WeylFit fit_weyl(const std::vector<double>& lambda, const std::vector<double>& count,
                 const model::CuspEdgeModel& model);
WeylFit fit_weyl(const spectrum::CountingCurve& curve, const model::CuspEdgeModel& model);

/// Pointwise (N_D + N_N)/2.
std::vector<double> averaged_counts(const spectrum::CountingCurve& dirichlet,
                                    const spectrum::CountingCurve& neumann);

}  // namespace cuspedge::weyl
