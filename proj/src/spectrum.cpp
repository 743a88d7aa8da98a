#include "cuspedge/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cuspedge/errors.hpp"
#include "cuspedge/parallel.hpp"

namespace cuspedge::spectrum {

namespace {

// Enumerates sum_j (scale_j z_j)^2 <= lambda_max over z_j in [z_min, z_max_j].
void enumerate_lattice(const std::vector<double>& scale, int z_min, bool symmetric, std::size_t dim,
                       double partial, double lambda_max, std::vector<double>& out) {
  if (dim == scale.size()) {
    out.push_back(partial);
    return;
  }
  const double s = scale[dim];
  const auto z_max = static_cast<long>(std::floor(std::sqrt(std::max(lambda_max - partial, 0.0)) / s)) + 1;
  for (long z = symmetric ? -z_max : z_min; z <= z_max; ++z) {
    const double term = (s * z) * (s * z);
    const double next = partial + term;
    if (next > lambda_max) continue;
    enumerate_lattice(scale, z_min, symmetric, dim + 1, next, lambda_max, out);
  }
}

}  // namespace

std::vector<double> cross_section_eigs(const model::CrossSection& cs, double lambda_max) {
  if (!(lambda_max >= 0.0)) throw InvalidArgument("lambda_max must be >= 0");
  std::vector<double> out;
  switch (cs.kind) {
    case model::CrossSectionKind::Point:
      out.push_back(0.0);
      break;
    case model::CrossSectionKind::FlatTorus: {
      std::vector<double> scale;
      for (double L : cs.lengths) scale.push_back(2.0 * std::numbers::pi / L);
      enumerate_lattice(scale, 0, true, 0, 0.0, lambda_max, out);
      break;
    }
    case model::CrossSectionKind::Box: {
      std::vector<double> scale;
      for (double L : cs.lengths) scale.push_back(std::numbers::pi / L);
      const int z_min = cs.bc == BoundaryCondition::Dirichlet ? 1 : 0;
      enumerate_lattice(scale, z_min, false, 0, 0.0, lambda_max, out);
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SpectrumIndex::SpectrumIndex(std::vector<std::map<int, std::vector<double>>> per_direction,
                             std::vector<double> cross, double lambda_max, bool certified)
    : per_direction_(std::move(per_direction)),
      cross_(std::move(cross)),
      lambda_max_(lambda_max),
      certified_(certified) {
  if (per_direction_.empty()) throw InvalidArgument("spectrum index needs at least one direction");
  if (!std::is_sorted(cross_.begin(), cross_.end()))
    throw InvalidArgument("cross-section eigenvalues must be ascending");
  for (const auto& dir : per_direction_) {
    std::vector<std::pair<double, std::int64_t>> entries;
    for (const auto& [m, values] : dir) {
      if (m < 0) throw InvalidArgument("modes are keyed by |m|");
      if (!std::is_sorted(values.begin(), values.end()))
        throw InvalidArgument("radial eigenvalues must be ascending");
      for (double v : values) {
        if (v < 0.0) throw InvalidArgument("radial eigenvalues must be nonnegative");
        entries.emplace_back(v, m == 0 ? 1 : 2);
      }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    WeightedList flat;
    for (const auto& [v, w] : entries) {
      flat.values.push_back(v);
      flat.weights.push_back(w);
    }
    flat_.push_back(std::move(flat));
  }
  if (!cross_.empty() && cross_.front() < 0.0)
    throw InvalidArgument("cross-section eigenvalues must be nonnegative");
}

namespace {

std::int64_t count_from(const SpectrumIndex& index, std::size_t dir, double partial, double lambda) {
  if (dir == index.per_direction().size()) {
    const auto& cross = index.cross();
    const auto it = std::partition_point(cross.begin(), cross.end(),
                                         [&](double c) { return partial + c <= lambda; });
    return static_cast<std::int64_t>(it - cross.begin());
  }
  const auto& list = index.flattened(dir);
  std::int64_t total = 0;
  for (std::size_t j = 0; j < list.values.size(); ++j) {
    const double s = partial + list.values[j];
    // all later values and deeper terms are nonnegative
    if (s > lambda) break;
    total += list.weights[j] * count_from(index, dir + 1, s, lambda);
  }
  return total;
}

}  // namespace

std::int64_t assemble_count(const SpectrumIndex& index, double lambda) {
  if (lambda > index.lambda_max()) {
    throw IndexIncomplete("count requested at lambda above the index threshold");
  }
  if (lambda < 0.0) return 0;
  return count_from(index, 0, 0.0, lambda);
}

std::map<int, std::vector<double>> radial_modes(const sturm::RadialProblem& base, double lambda_max,
                                                const BuildOptions& options, bool* certified) {
  std::vector<int> modes;
  for (int m = 0;; ++m) {
    sturm::RadialProblem p = base;
    p.m = m;
    if (sturm::mode_cutoff(p, lambda_max)) break;
    modes.push_back(m);
  }
  const sturm::GradedMesh mesh(options.mesh.cells, options.mesh.grading, base.inner, base.delta);
  std::vector<sturm::EigResult> results(modes.size());
  parallel_for(modes.size(), options.threads, [&](std::size_t i) {
    sturm::RadialProblem p = base;
    p.m = modes[i];
    results[i] = sturm::solve_eigs(p, mesh, lambda_max, options.solve);
  });

  std::map<int, std::vector<double>> out;
  bool all_certified = true;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    all_certified = all_certified && results[i].certified_complete;
    out.emplace(modes[i], std::move(results[i].eigenvalues));
  }
  if (certified) *certified = all_certified;
  return out;
}

SpectrumIndex build_index(const model::CuspEdgeModel& model, BoundaryCondition outer_bc,
                          double lambda_max, const BuildOptions& options) {
  std::vector<std::map<int, std::vector<double>>> per_direction;
  std::map<double, std::size_t> solved;  // k -> direction already holding its modes
  bool certified = true;
  for (double k : model.k()) {
    if (auto it = solved.find(k); it != solved.end()) {
      per_direction.push_back(per_direction[it->second]);
      continue;
    }
    sturm::RadialProblem base;
    base.alpha = k;
    base.k = k;
    base.delta = model.delta();
    base.outer_bc = outer_bc;
    bool ok = true;
    per_direction.push_back(radial_modes(base, lambda_max, options, &ok));
    certified = certified && ok;
    solved.emplace(k, per_direction.size() - 1);
  }
  return SpectrumIndex(std::move(per_direction), cross_section_eigs(model.cross_section(), lambda_max),
                       lambda_max, certified);
}

namespace {

void require_ascending(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("lambda grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw InvalidArgument("lambda grid must be ascending");
}

CountingCurve curve_from_index(const SpectrumIndex& index, const std::vector<double>& grid,
                               BoundaryCondition bc) {
  CountingCurve curve;
  curve.bc = bc;
  curve.lambda = grid;
  curve.count.reserve(grid.size());
  for (double lambda : grid) curve.count.push_back(assemble_count(index, lambda));
  return curve;
}

double build_threshold(const std::vector<double>& grid) { return grid.back() > 0.0 ? grid.back() : 1.0; }

}  // namespace

CountingCurve counting_curve(const model::CuspEdgeModel& model, BoundaryCondition bc,
                             const std::vector<double>& lambda_grid, const BuildOptions& options) {
  require_ascending(lambda_grid);
  const SpectrumIndex index = build_index(model, bc, build_threshold(lambda_grid), options);
  if (!index.certified()) {
    throw MeshTooCoarse("radial eigenvalues moved by more than rtol under refinement; increase mesh cells");
  }
  return curve_from_index(index, lambda_grid, bc);
}

CountingCurve block_counting_curve(const sturm::RadialProblem& block, const std::vector<double>& lambda_grid,
                                   const BuildOptions& options) {
  require_ascending(lambda_grid);
  const double threshold = build_threshold(lambda_grid);
  bool certified = true;
  auto modes = radial_modes(block, threshold, options, &certified);
  if (!certified) throw MeshTooCoarse("block radial eigenvalues not converged under refinement");
  const SpectrumIndex index({std::move(modes)}, {0.0}, threshold, certified);
  return curve_from_index(index, lambda_grid, block.outer_bc);
}

CountingCurve curve_from_eigenvalues(const std::vector<double>& eigenvalues,
                                     const std::vector<double>& lambda_grid, BoundaryCondition bc) {
  require_ascending(lambda_grid);
  if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end()))
    throw InvalidArgument("eigenvalues must be ascending");
  CountingCurve curve;
  curve.bc = bc;
  curve.lambda = lambda_grid;
  for (double lambda : lambda_grid) {
    curve.count.push_back(std::upper_bound(eigenvalues.begin(), eigenvalues.end(), lambda) - eigenvalues.begin());
  }
  return curve;
}

std::vector<double> uniform_grid(double lambda_min, double lambda_max, int points) {
  if (points < 1) throw InvalidArgument("grid needs at least one point");
  if (points == 1) return {lambda_max};
  if (!(lambda_max > lambda_min)) throw InvalidArgument("grid needs lambda_max > lambda_min");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = lambda_min + (lambda_max - lambda_min) * i / (points - 1);
  }
  grid.back() = lambda_max;
  return grid;
}

}  // namespace cuspedge::spectrum
