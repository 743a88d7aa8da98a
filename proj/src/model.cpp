#include "cuspedge/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "cuspedge/errors.hpp"

namespace cuspedge {

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

BoundaryCondition boundary_condition_from_string(const std::string& s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "dirichlet" || lower == "d") return BoundaryCondition::Dirichlet;
  if (lower == "neumann" || lower == "n") return BoundaryCondition::Neumann;
  throw InvalidArgument("unknown boundary condition '" + s + "'");
}

namespace model {

namespace {

void require_positive_lengths(const std::vector<double>& lengths) {
  for (double L : lengths) {
    if (!(L > 0.0) || !std::isfinite(L))
      throw InvalidArgument("cross-section lengths must be positive and finite");
  }
}

}  // namespace

CrossSection CrossSection::flat_torus(std::vector<double> lengths) {
  require_positive_lengths(lengths);
  return {CrossSectionKind::FlatTorus, std::move(lengths), BoundaryCondition::Dirichlet};
}

CrossSection CrossSection::box(std::vector<double> lengths, BoundaryCondition bc) {
  require_positive_lengths(lengths);
  return {CrossSectionKind::Box, std::move(lengths), bc};
}

double CrossSection::volume() const {
  double v = 1.0;
  for (double L : lengths) v *= L;
  return v;
}

CuspEdgeModel::CuspEdgeModel(std::vector<double> k, double delta, CrossSection cross_section)
    : k_(std::move(k)), delta_(delta), cross_(std::move(cross_section)) {
  if (k_.empty()) throw InvalidArgument("model needs at least one cusp direction (ell >= 1)");
  for (double ki : k_) {
    if (!(ki >= 1.0) || !std::isfinite(ki))
      throw InvalidArgument("every cusp order k_i must be a finite real >= 1");
  }
  if (!(delta_ > 0.0) || !std::isfinite(delta_))
    throw InvalidArgument("delta must be positive and finite");
  if (cross_.kind == CrossSectionKind::Point && !cross_.lengths.empty())
    throw InvalidArgument("point cross-section has dimension 0");
  require_positive_lengths(cross_.lengths);
}

double CuspEdgeModel::beta() const {
  double b = ell();
  for (double ki : k_) b += ki;
  return b;
}

bool CuspEdgeModel::self_adjointness_assured() const {
  return std::all_of(k_.begin(), k_.end(), [](double ki) { return ki >= 3.0; });
}

CuspEdgeModel CuspEdgeModel::with_delta(double delta) const {
  return CuspEdgeModel(k_, delta, cross_);
}

double volume(const CuspEdgeModel& model) {
  double v = model.cross_section().volume();
  for (double ki : model.k()) {
    v *= 2.0 * std::numbers::pi * std::pow(model.delta(), ki + 1.0) / (ki + 1.0);
  }
  return v;
}

double unit_ball_volume(int n) {
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double weyl_constant(int n, double vol) {
  return unit_ball_volume(n) / std::pow(2.0 * std::numbers::pi, n) * vol;
}

double weyl_constant(const CuspEdgeModel& model) {
  return weyl_constant(model.dimension(), volume(model));
}

CuspEdgeModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidArgument("model document must be a JSON object");
  const int ell = doc.value("ell", 1);
  if (ell < 1) throw InvalidArgument("ell must be >= 1");

  std::vector<double> k;
  const auto& kj = doc.at("k");
  if (kj.is_number()) {
    k.assign(static_cast<std::size_t>(ell), kj.get<double>());
  } else {
    k = kj.get<std::vector<double>>();
    if (static_cast<int>(k.size()) != ell)
      throw InvalidArgument("k must have exactly ell entries");
  }
  const double delta = doc.at("delta").get<double>();

  CrossSection cross;
  if (doc.contains("cross_section")) {
    const auto& cs = doc.at("cross_section");
    const std::string kind = cs.value("kind", std::string("point"));
    if (kind == "point") {
      cross = CrossSection::point();
    } else if (kind == "flat-torus" || kind == "torus") {
      cross = CrossSection::flat_torus(cs.at("lengths").get<std::vector<double>>());
    } else if (kind == "box") {
      cross = CrossSection::box(cs.at("lengths").get<std::vector<double>>(),
                                boundary_condition_from_string(cs.value("bc", std::string("dirichlet"))));
    } else {
      throw InvalidArgument("unknown cross_section kind '" + kind + "'");
    }
  }
  return CuspEdgeModel(std::move(k), delta, std::move(cross));
}

nlohmann::json to_json(const CuspEdgeModel& model) {
  nlohmann::json cs;
  switch (model.cross_section().kind) {
    case CrossSectionKind::Point:
      cs["kind"] = "point";
      break;
    case CrossSectionKind::FlatTorus:
      cs["kind"] = "flat-torus";
      cs["lengths"] = model.cross_section().lengths;
      break;
    case CrossSectionKind::Box:
      cs["kind"] = "box";
      cs["lengths"] = model.cross_section().lengths;
      cs["bc"] = to_string(model.cross_section().bc);
      break;
  }
  return {{"ell", model.ell()}, {"k", model.k()}, {"delta", model.delta()}, {"cross_section", cs}};
}

bool AdmissibilityReport::all_pass() const {
  return std::all_of(coefficients.begin(), coefficients.end(),
                     [](const auto& kv) { return kv.second.pass; });
}

namespace {

bool known_coefficient(const std::string& name) {
  for (const char* prefix : {"a_", "b_", "bt_", "c_"}) {
    if (name.rfind(prefix, 0) == 0 && name.size() > std::char_traits<char>::length(prefix))
      return true;
  }
  return false;
}

}  // namespace

AdmissibilityReport check_admissibility(const PerturbationSample& sample,
                                        const CuspEdgeModel& model,
                                        const AdmissibilityOptions& options) {
  if (!(sample.eta > 0.0)) throw InvalidArgument("decay order eta must be positive");
  if (sample.samples.size() < 8)
    throw InsufficientSamples("admissibility fit needs at least 8 samples");

  std::vector<double> log_norm;
  log_norm.reserve(sample.samples.size());
  for (const auto& rec : sample.samples) {
    if (static_cast<int>(rec.rho.size()) != model.ell())
      throw InvalidArgument("sample rho must have ell entries");
    double sq = 0.0;
    for (double r : rec.rho) {
      if (!(r > 0.0) || r > model.delta())
        throw InvalidArgument("sample rho entries must lie in (0, delta]");
      sq += r * r;
    }
    log_norm.push_back(0.5 * std::log(sq));
  }
  const auto [lo, hi] = std::minmax_element(log_norm.begin(), log_norm.end());
  if (*hi - *lo < std::log(10.0))
    throw InsufficientSamples("sampled |rho| must span at least a factor of 10");

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (std::size_t s = 0; s < sample.samples.size(); ++s) {
    for (const auto& [name, value] : sample.samples[s].values) {
      if (!known_coefficient(name))
        throw InvalidArgument("unknown perturbation coefficient '" + name + "'");
      series[name].emplace_back(log_norm[s], value);
    }
  }

  AdmissibilityReport report;
  for (const auto& [name, pts] : series) {
    CoefficientFit fit;
    std::vector<std::pair<double, double>> above;
    for (const auto& [x, v] : pts) {
      if (std::abs(v) >= options.absolute_floor) above.emplace_back(x, std::log(std::abs(v)));
    }
    if (above.empty()) {
      fit.pass = true;
    } else if (above.size() >= 2) {
      Eigen::MatrixXd design(above.size(), 2);
      Eigen::VectorXd rhs(above.size());
      for (std::size_t i = 0; i < above.size(); ++i) {
        design(i, 0) = above[i].first;
        design(i, 1) = 1.0;
        rhs(i) = above[i].second;
      }
      const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
      fit.slope = coef(0);
      fit.pass = coef(0) >= sample.eta - options.slope_tolerance;
    }
    report.coefficients.emplace(name, fit);
  }
  return report;
}

}  // namespace model
}  // namespace cuspedge
