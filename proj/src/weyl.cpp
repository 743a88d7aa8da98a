#include "cuspedge/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cuspedge/errors.hpp"

namespace cuspedge::weyl {

Schedule schedule(double lambda, double beta) {
  if (!(lambda >= 4.0)) throw InvalidArgument("schedule needs lambda >= 4");
  if (!(beta > 0.0)) throw InvalidArgument("schedule needs beta > 0");
  const double l2 = std::log2(lambda);
  const int m = static_cast<int>(std::lround(0.5 * l2));
  const int m0 = std::max(1, static_cast<int>(std::lround(l2 / beta)));
  if (m0 > m) {
    throw ScheduleInverted("m0 = " + std::to_string(m0) + " exceeds m = " + std::to_string(m) +
                           "; lambda too small for this beta");
  }
  return {m0, m};
}

BracketingPartition::BracketingPartition(int ell, int m0, int m) : ell_(ell), m0_(m0), m_(m) {
  if (ell < 1) throw InvalidArgument("partition needs ell >= 1");
  if (m0 < 1 || m < m0) throw InvalidArgument("partition needs 1 <= m0 <= m");
  MultiIndex mu(static_cast<std::size_t>(ell), m0);
  for (;;) {
    blocks_.push_back(mu);
    int pos = ell - 1;
    while (pos >= 0 && mu[static_cast<std::size_t>(pos)] == m + 1) {
      mu[static_cast<std::size_t>(pos)] = m0;
      --pos;
    }
    if (pos < 0) break;
    ++mu[static_cast<std::size_t>(pos)];
  }
}

double BracketingPartition::delta() const { return std::ldexp(1.0, -m0_); }

double BracketingPartition::interval_length(int j, int m) {
  return j <= m ? std::ldexp(1.0, -j - 1) : std::ldexp(1.0, -m - 1);
}

bool BracketingPartition::is_terminal(const MultiIndex& mu) const {
  return std::any_of(mu.begin(), mu.end(), [this](int j) { return j == m_ + 1; });
}

double BracketingPartition::covered_measure() const {
  double total = 0.0;
  for (const auto& mu : blocks_) {
    double vol = 1.0;
    for (int j : mu) vol *= interval_length(j, m_);
    total += vol;
  }
  return total;
}

namespace {

// Integer points z with partial + sum_i coef_i z_i^2 <= lambda, coefficients in descending order.
std::int64_t count_quadratic(const std::vector<double>& coef, std::size_t dim, double partial, double lambda) {
  const double c = coef[dim];
  const double room = lambda - partial;
  if (room < 0.0) return 0;
  auto z_max = static_cast<std::int64_t>(std::floor(std::sqrt(room / c)));
  auto fits = [&](std::int64_t z) {
    const double zz = static_cast<double>(z);
    return partial + c * (zz * zz) <= lambda;
  };
  while (fits(z_max + 1)) ++z_max;
  while (z_max >= 0 && !fits(z_max)) --z_max;
  if (z_max < 0) return 0;
  if (dim + 1 == coef.size()) return 2 * z_max + 1;

  std::int64_t total = count_quadratic(coef, dim + 1, partial, lambda);
  for (std::int64_t z = 1; z <= z_max; ++z) {
    const double zz = static_cast<double>(z);
    total += 2 * count_quadratic(coef, dim + 1, partial + c * (zz * zz), lambda);
  }
  return total;
}

void require_block(const MultiIndex& mu, const std::vector<double>& k, int cross_dim, double lambda) {
  if (mu.empty() || mu.size() != k.size()) throw InvalidArgument("mu and k must have ell entries");
  if (cross_dim < 0) throw InvalidArgument("cross_dim must be >= 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
}

}  // namespace

std::int64_t block_lattice_count(const MultiIndex& mu, const std::vector<double>& k, int cross_dim,
                                 double lambda) {
  require_block(mu, k, cross_dim, lambda);
  std::vector<double> coef;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    coef.push_back(std::exp2(2.0 * mu[j]));
    coef.push_back(std::exp2(2.0 * mu[j] * k[j]));
  }
  for (int d = 0; d < cross_dim; ++d) coef.push_back(1.0);
  // widest range innermost, where it is counted in closed form
  std::stable_sort(coef.begin(), coef.end(), std::greater<>());
  return count_quadratic(coef, 0, 0.0, lambda);
}

std::array<std::int64_t, 3> per_coordinate_bounds(int mu_j, double k_j, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  const double root = std::sqrt(lambda);
  const auto odd = [](double r) { return 2 * static_cast<std::int64_t>(std::floor(r)) + 1; };
  return {odd(root * std::exp2(-mu_j)), odd(root * std::exp2(-mu_j * k_j)), odd(root)};
}

double per_coordinate_bound_product(const MultiIndex& mu, const std::vector<double>& k, int cross_dim,
                                    double lambda) {
  require_block(mu, k, cross_dim, lambda);
  double product = 1.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const auto b = per_coordinate_bounds(mu[j], k[j], lambda);
    product *= static_cast<double>(b[0]) * static_cast<double>(b[1]);
  }
  const auto eta = static_cast<double>(per_coordinate_bounds(0, 1.0, lambda)[2]);
  for (int d = 0; d < cross_dim; ++d) product *= eta;
  return product;
}

std::int64_t cusp_lattice_total(const BracketingPartition& partition, const std::vector<double>& k,
                                int cross_dim, double lambda) {
  std::int64_t total = 0;
  for (MultiIndex mu : partition.blocks()) {
    // a terminal block is bounded by its neighbour at level m
    for (int& j : mu) j = std::min(j, partition.m());
    total += block_lattice_count(mu, k, cross_dim, lambda);
  }
  return total;
}

CuspErrorBound cusp_error_bound(const model::CuspEdgeModel& model, const Schedule& sched, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (sched.m0 < 1 || sched.m < sched.m0) throw InvalidArgument("need 1 <= m0 <= m");
  CuspErrorBound out{};
  out.block_coefficient = 1.0;
  for (double kj : model.k()) {
    double series = 0.0;
    for (int mu = sched.m0; mu <= sched.m; ++mu) series += std::exp2(-(1.0 + kj) * mu);
    out.block_coefficient *= series;
  }
  out.closed_coefficient = std::exp2(-model.beta() * sched.m0);
  out.lambda_power = std::pow(lambda, 0.5 * model.dimension());
  return out;
}

CuspErrorBound cusp_error_bound(const model::CuspEdgeModel& model, double lambda) {
  return cusp_error_bound(model, schedule(lambda, model.beta()), lambda);
}

SandwichReport sandwich_check(const std::vector<spectrum::CountingCurve>& dirichlet_parts,
                              const spectrum::CountingCurve& full,
                              const std::vector<spectrum::CountingCurve>& neumann_parts,
                              const std::optional<SandwichTolerance>& tolerance) {
  const std::size_t n = full.lambda.size();
  if (full.count.size() != n) throw GridMismatch("full curve has mismatched columns");
  auto check_grid = [&](const spectrum::CountingCurve& c) {
    if (c.lambda != full.lambda || c.count.size() != n) throw GridMismatch("part curve grid differs from full curve");
  };
  for (const auto& c : dirichlet_parts) check_grid(c);
  for (const auto& c : neumann_parts) check_grid(c);
  if (tolerance && (tolerance->lower.size() != n || tolerance->upper.size() != n))
    throw GridMismatch("tolerance vectors must match the grid");

  SandwichReport report;
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t lower = 0, upper = 0;
    for (const auto& c : dirichlet_parts) lower += c.count[i];
    for (const auto& c : neumann_parts) upper += c.count[i];
    const std::int64_t slack_lo = tolerance ? tolerance->lower[i] : 0;
    const std::int64_t slack_hi = tolerance ? tolerance->upper[i] : 0;
    if (lower > full.count[i] + slack_lo || full.count[i] > upper + slack_hi) {
      report.violations.push_back({i, full.lambda[i], lower, full.count[i], upper});
    }
  }
  return report;
}

WeylFit fit_weyl(const std::vector<double>& lambda, const std::vector<double>& count,
                 const model::CuspEdgeModel& model) {
  if (lambda.size() != count.size()) throw GridMismatch("lambda and count columns differ in length");
  const std::size_t start = lambda.size() / 2;
  if (lambda.size() - start < 10) {
    throw InsufficientData("Weyl fit needs at least 10 points in the upper half of the grid");
  }
  WeylFit fit;
  fit.n = model.dimension();
  fit.theoretical = model::weyl_constant(model);
  fit.lambda_lo = lambda[start];
  fit.lambda_hi = lambda.back();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = start; i < lambda.size(); ++i) {
    const double x = std::pow(lambda[i], 0.5 * fit.n);
    sxy += x * count[i];
    sxx += x * x;
  }
  if (!(sxx > 0.0)) throw InsufficientData("Weyl fit needs positive lambda values");
  fit.slope = sxy / sxx;
  fit.rel_error = std::abs(fit.slope - fit.theoretical) / fit.theoretical;
  return fit;
}

WeylFit fit_weyl(const spectrum::CountingCurve& curve, const model::CuspEdgeModel& model) {
  std::vector<double> count(curve.count.begin(), curve.count.end());
  return fit_weyl(curve.lambda, count, model);
}

std::vector<double> averaged_counts(const spectrum::CountingCurve& dirichlet,
                                    const spectrum::CountingCurve& neumann) {
  if (dirichlet.lambda != neumann.lambda) throw GridMismatch("Dirichlet and Neumann grids differ");
  std::vector<double> avg(dirichlet.count.size());
  for (std::size_t i = 0; i < avg.size(); ++i) {
    avg[i] = 0.5 * static_cast<double>(dirichlet.count[i] + neumann.count[i]);
  }
  return avg;
}

}  // namespace cuspedge::weyl
