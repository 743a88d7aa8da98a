#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cuspedge/errors.hpp"
#include "cuspedge/hardy.hpp"
#include "cuspedge/parallel.hpp"
#include "cuspedge/saclass.hpp"
#include "cuspedge/weyl.hpp"

#ifndef CUSPEDGE_VERSION
#define CUSPEDGE_VERSION "0.0.0"
#endif

namespace cuspedge::cli {

using nlohmann::json;

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  RunConfig cfg;
  if (!doc.contains("model")) throw InvalidArgument("config needs a \"model\" object");
  cfg.model = model::model_from_json(doc.at("model"));

  if (doc.contains("mesh")) {
    const auto& m = doc.at("mesh");
    cfg.mesh.cells = m.value("cells", cfg.mesh.cells);
    cfg.mesh.grading = m.value("grading", cfg.mesh.grading);
  }
  if (cfg.mesh.cells < 16) throw InvalidArgument("mesh.cells must be >= 16");
  if (!(cfg.mesh.grading >= 1.0)) throw InvalidArgument("mesh.grading must be >= 1");

  if (!doc.contains("lambda_max")) throw InvalidArgument("config needs lambda_max");
  cfg.lambda_max = doc.at("lambda_max").get<double>();
  if (!(cfg.lambda_max > 0.0)) throw InvalidArgument("lambda_max must be > 0");
  cfg.lambda_min = doc.value("lambda_min", 0.0);
  if (!(cfg.lambda_min >= 0.0) || !(cfg.lambda_min < cfg.lambda_max))
    throw InvalidArgument("need 0 <= lambda_min < lambda_max");

  const json grid = doc.value("lambda_grid", json(101));
  if (grid.is_number_integer()) {
    cfg.lambda_grid = spectrum::uniform_grid(cfg.lambda_min, cfg.lambda_max, grid.get<int>());
  } else if (grid.is_array()) {
    cfg.lambda_grid = grid.get<std::vector<double>>();
    if (cfg.lambda_grid.empty()) throw InvalidArgument("lambda_grid list is empty");
    if (!std::is_sorted(cfg.lambda_grid.begin(), cfg.lambda_grid.end()))
      throw InvalidArgument("lambda_grid must be ascending");
    if (cfg.lambda_grid.front() < 0.0 || cfg.lambda_grid.back() > cfg.lambda_max)
      throw InvalidArgument("lambda_grid values must lie in [0, lambda_max]");
  } else {
    throw InvalidArgument("lambda_grid must be a point count or a list");
  }

  std::string bc = doc.value("bc", std::string("both"));
  std::transform(bc.begin(), bc.end(), bc.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (bc == "both")
    cfg.bc = BcSelection::Both;
  else if (bc == "dirichlet")
    cfg.bc = BcSelection::Dirichlet;
  else if (bc == "neumann")
    cfg.bc = BcSelection::Neumann;
  else
    throw InvalidArgument("bc must be both, Dirichlet or Neumann");

  if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
  cfg.threads = doc.value("threads", 0);
  return cfg;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

namespace {

struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& what) : std::runtime_error(what), stage(stage) {}
  std::string stage;
};

// Bookkeeping for one invocation: timings, certification flags and the output sink.
class Session {
 public:
  Session(std::string subcommand, std::ostream& out) : subcommand_(std::move(subcommand)), out_(out) {}

  template <typename F>
  auto stage(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        finish(name, start);
      } else {
        auto result = body();
        finish(name, start);
        return result;
      }
    } catch (const NumericalFailure& e) {
      throw StageError(name, e.what());
    }
  }

  void certify(const std::string& name, bool ok) { certified_[name] = ok; }
  void set_input(std::string hash, json inputs) {
    hash_ = std::move(hash);
    inputs_ = std::move(inputs);
  }

  void emit(const std::optional<std::string>& out_dir, const std::string& file, const std::string& contents) {
    if (!out_dir) {
      out_ << contents;
      return;
    }
    const std::filesystem::path dir(*out_dir);
    std::filesystem::create_directories(dir);
    write_atomic(dir / file, contents);
    json manifest = {{"tool", "cuspedge"},
                     {"version", CUSPEDGE_VERSION},
                     {"subcommand", subcommand_},
                     {"config_hash", hash_},
                     {"inputs", inputs_},
                     {"output", file},
                     {"wall_time_seconds", timings_},
                     {"certified", certified_}};
    const auto stem = std::filesystem::path(file).stem().string();
    write_atomic(dir / (stem + ".manifest.json"), manifest.dump(2) + "\n");
  }

 private:
  void finish(const std::string& name, std::chrono::steady_clock::time_point start) {
    timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  std::string subcommand_;
  std::ostream& out_;
  std::string hash_;
  json inputs_ = json::object();
  json timings_ = json::object();
  json certified_ = json::object();
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct LoadedConfig {
  RunConfig config;
  std::string hash;
};

LoadedConfig load_config(const std::string& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("malformed config " + path + ": " + e.what());
  }
  return {parse_run_config(doc), fnv1a_hex(text)};
}

void warn_self_adjointness(const model::CuspEdgeModel& m, std::ostream& err) {
  if (!m.self_adjointness_assured()) {
    err << "warning: some k_j < 3; essential self-adjointness of the model Laplacian is not assured\n";
  }
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

struct Curves {
  std::optional<spectrum::CountingCurve> dirichlet, neumann;
};

Curves compute_curves(Session& s, const RunConfig& cfg, int threads) {
  spectrum::BuildOptions opts;
  opts.mesh = cfg.mesh;
  opts.threads = threads;
  Curves c;
  if (cfg.bc != BcSelection::Neumann) {
    c.dirichlet = s.stage("spectrum/dirichlet", [&] {
      return spectrum::counting_curve(cfg.model, BoundaryCondition::Dirichlet, cfg.lambda_grid, opts);
    });
    s.certify("spectrum/dirichlet", true);
  }
  if (cfg.bc != BcSelection::Dirichlet) {
    c.neumann = s.stage("spectrum/neumann", [&] {
      return spectrum::counting_curve(cfg.model, BoundaryCondition::Neumann, cfg.lambda_grid, opts);
    });
    s.certify("spectrum/neumann", true);
  }
  return c;
}

std::string counts_csv(const RunConfig& cfg, const Curves& c) {
  std::string csv = "lambda";
  if (c.dirichlet) csv += ",count_dirichlet";
  if (c.neumann) csv += ",count_neumann";
  if (c.dirichlet && c.neumann) csv += ",count_avg";
  csv += "\n";
  for (std::size_t i = 0; i < cfg.lambda_grid.size(); ++i) {
    csv += format_double(cfg.lambda_grid[i]);
    if (c.dirichlet) csv += "," + std::to_string(c.dirichlet->count[i]);
    if (c.neumann) csv += "," + std::to_string(c.neumann->count[i]);
    if (c.dirichlet && c.neumann)
      csv += "," + format_double(0.5 * static_cast<double>(c.dirichlet->count[i] + c.neumann->count[i]));
    csv += "\n";
  }
  return csv;
}

// Reads (lambda, count) from a CSV with a header; count is count_avg, count or the second column.
std::pair<std::vector<double>, std::vector<double>> read_curve_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("curve file " + path + " is empty");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  const auto header = split(line);
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t lam = column("lambda").value_or(0);
  const std::size_t cnt = column("count_avg").value_or(column("count").value_or(1));
  std::vector<double> lambda, count;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() <= std::max(lam, cnt))
      throw InvalidArgument("curve file " + path + " row " + std::to_string(row) + " has too few columns");
    try {
      lambda.push_back(std::stod(cells[lam]));
      count.push_back(std::stod(cells[cnt]));
    } catch (const std::exception&) {
      throw InvalidArgument("curve file " + path + " row " + std::to_string(row) + " is not numeric");
    }
  }
  return {lambda, count};
}

json fit_json(const weyl::WeylFit& f) {
  return {{"slope", f.slope},         {"theoretical", f.theoretical}, {"rel_error", f.rel_error},
          {"n", f.n},                 {"lambda_lo", f.lambda_lo},     {"lambda_hi", f.lambda_hi}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral experiments on cusp-edge model metrics", "cuspedge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CUSPEDGE_VERSION);

  std::string config_path, curve_path;
  std::optional<std::string> out_dir;
  int threads = -1;
  std::vector<double> alphas, betas, ks, mus_raw;
  double sigma = 0.0, beta_w = 0.0, lambda = -1.0;
  int cells = 4000, cross_dim = 0;
  double grading = 2.0;
  double alpha_single = 0.0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory (stdout when omitted)");
    sub->add_option("--threads", threads, "worker threads, 0 = hardware concurrency")->check(CLI::NonNegativeNumber);
  };

  auto* spectrum_cmd = app.add_subcommand("spectrum", "Dirichlet/Neumann counting curves");
  add_common(spectrum_cmd, true);
  auto* fit_cmd = app.add_subcommand("weyl-fit", "Weyl coefficient fit of the counting curve");
  add_common(fit_cmd, true);
  fit_cmd->add_option("--curve", curve_path, "fit a precomputed lambda,count CSV instead")->check(CLI::ExistingFile);
  auto* hardy_cmd = app.add_subcommand("hardy", "best weighted Hardy constants");
  add_common(hardy_cmd, false);
  hardy_cmd->add_option("--alpha", alphas, "weight exponents")->required();
  hardy_cmd->add_option("--beta", betas, "power exponents, paired with --alpha")->required();
  hardy_cmd->add_option("--cells", cells, "radial cells")->check(CLI::Range(2, 1 << 24));
  hardy_cmd->add_option("--grading", grading, "mesh grading exponent")->check(CLI::Range(1.0, 16.0));
  auto* classify_cmd = app.add_subcommand("classify", "limit point / limit circle classification");
  add_common(classify_cmd, false);
  classify_cmd->add_option("--alpha", alpha_single, "weight exponent")->required();
  auto* windows_cmd = app.add_subcommand("windows", "sigma and C windows, gamma0");
  add_common(windows_cmd, false);
  windows_cmd->add_option("--k", ks, "cusp order")->required()->expected(1);
  windows_cmd->add_option("--sigma", sigma, "sigma")->required();
  windows_cmd->add_option("--beta", beta_w, "beta");
  auto* bracket_cmd = app.add_subcommand("bracket", "dyadic bracketing lattice counts");
  add_common(bracket_cmd, false);
  bracket_cmd->add_option("--k", ks, "cusp orders (overrides the config model)");
  bracket_cmd->add_option("--mu", mus_raw, "block multi-index; whole partition when omitted");
  bracket_cmd->add_option("--lambda", lambda, "spectral threshold");
  bracket_cmd->add_option("--cross-dim", cross_dim, "cross-section dimension")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  Session session(sub->get_name(), out);
  try {
    std::optional<LoadedConfig> loaded;
    if (!config_path.empty()) loaded = load_config(config_path);
    const int workers = threads >= 0 ? threads : (loaded ? loaded->config.threads : 0);
    if (!out_dir && loaded) out_dir = loaded->config.output_dir;

    if (sub == spectrum_cmd) {
      const RunConfig& cfg = loaded->config;
      warn_self_adjointness(cfg.model, err);
      session.set_input(loaded->hash, {{"config", config_path}});
      const Curves c = compute_curves(session, cfg, workers);
      session.emit(out_dir, "counts.csv", counts_csv(cfg, c));
    } else if (sub == fit_cmd) {
      const RunConfig& cfg = loaded->config;
      weyl::WeylFit fit;
      if (!curve_path.empty()) {
        const std::string curve_text = read_file(curve_path);
        session.set_input(fnv1a_hex(loaded->hash + fnv1a_hex(curve_text)),
                          {{"config", config_path}, {"curve", curve_path}});
        const auto [lam, cnt] = read_curve_csv(curve_path);
        fit = session.stage("fit", [&] { return weyl::fit_weyl(lam, cnt, cfg.model); });
      } else {
        warn_self_adjointness(cfg.model, err);
        session.set_input(loaded->hash, {{"config", config_path}});
        const Curves c = compute_curves(session, cfg, workers);
        std::vector<double> counts;
        if (c.dirichlet && c.neumann)
          counts = weyl::averaged_counts(*c.dirichlet, *c.neumann);
        else {
          const auto& one = c.dirichlet ? *c.dirichlet : *c.neumann;
          counts.assign(one.count.begin(), one.count.end());
        }
        fit = session.stage("fit", [&] { return weyl::fit_weyl(cfg.lambda_grid, counts, cfg.model); });
      }
      session.emit(out_dir, "weyl_fit.json", json_text(fit_json(fit)));
    } else if (sub == hardy_cmd) {
      if (alphas.size() != betas.size()) throw InvalidArgument("--alpha and --beta need the same number of values");
      json inputs = {{"alpha", alphas}, {"beta", betas}, {"cells", cells}, {"grading", grading}};
      session.set_input(fnv1a_hex(inputs.dump()), inputs);
      std::vector<hardy::HardyResult> results(alphas.size());
      session.stage("hardy", [&] {
        parallel_for(alphas.size(), workers, [&](std::size_t i) {
          hardy::HardyProblem p;
          p.alpha = alphas[i];
          p.beta = betas[i];
          p.mesh = {cells, grading};
          results[i] = hardy::best_constant_numeric(p);
        });
      });
      session.certify("hardy", true);
      std::string csv = "alpha,beta,theoretical,numeric_best,ratio,mesh_cells\n";
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        csv += format_double(alphas[i]) + "," + format_double(betas[i]) + "," + format_double(r.theoretical_bound) +
               "," + format_double(r.numeric_best) + "," + format_double(r.ratio) + "," +
               std::to_string(r.mesh_cells) + "\n";
      }
      session.emit(out_dir, "hardy.csv", csv);
    } else if (sub == classify_cmd) {
      json inputs = {{"alpha", alpha_single}};
      session.set_input(fnv1a_hex(inputs.dump()), inputs);
      const auto r = saclass::classify(alpha_single);
      json j = {{"alpha", r.alpha},
                {"c_eff", r.c_eff},
                {"verdict", saclass::to_string(r.verdict)},
                {"indicial", r.indicial_exponents},
                {"l2_flags", r.l2_flags}};
      session.emit(out_dir, "classify.json", json_text(j));
    } else if (sub == windows_cmd) {
      const double k = ks.front();
      json inputs = {{"k", k}, {"sigma", sigma}, {"beta", beta_w}};
      session.set_input(fnv1a_hex(inputs.dump()), inputs);
      const auto w = saclass::windows(k, sigma, beta_w);
      const auto gk = saclass::gamma0_k(k);
      json j = {{"k", w.k},
                {"sigma", w.sigma},
                {"beta", w.beta},
                {"sigma_window", {w.sigma_window.lo, w.sigma_window.hi}},
                {"sigma_in_window", w.sigma_window.contains(sigma)},
                {"c_window", {w.c_window.lo, w.c_window.hi}},
                {"c_window_empty", w.c_window.empty()},
                {"gamma0", w.gamma0 ? json(*w.gamma0) : json(nullptr)},
                {"gamma0_k", gk ? json(*gk) : json(nullptr)}};
      session.emit(out_dir, "windows.json", json_text(j));
    } else if (sub == bracket_cmd) {
      std::vector<double> k = ks;
      int cd = cross_dim;
      double lam = lambda;
      if (loaded) {
        if (k.empty()) k = loaded->config.model.k();
        if (!bracket_cmd->count("--cross-dim")) cd = loaded->config.model.cross_section().dim();
        if (lam < 0.0) lam = loaded->config.lambda_max;
      }
      if (k.empty()) throw InvalidArgument("bracket needs --k or a config model");
      if (lam < 0.0) throw InvalidArgument("bracket needs --lambda or a config lambda_max");
      json inputs = {{"k", k}, {"cross_dim", cd}, {"lambda", lam}, {"mu", mus_raw}};
      session.set_input(loaded ? loaded->hash : fnv1a_hex(inputs.dump()), inputs);

      json j = {{"k", k}, {"cross_dim", cd}, {"lambda", lam}};
      if (!mus_raw.empty()) {
        weyl::MultiIndex mu;
        for (double v : mus_raw) {
          if (v != std::floor(v) || v < 0.0) throw InvalidArgument("--mu entries must be nonnegative integers");
          mu.push_back(static_cast<int>(v));
        }
        if (mu.size() != k.size()) throw InvalidArgument("--mu needs one entry per k");
        j["mu"] = mu;
        j["lattice_count"] = session.stage("lattice", [&] { return weyl::block_lattice_count(mu, k, cd, lam); });
        j["per_coordinate_bound_product"] = weyl::per_coordinate_bound_product(mu, k, cd, lam);
      } else {
        double beta = static_cast<double>(k.size());
        for (double kj : k) beta += kj;
        const auto sched = session.stage("schedule", [&] { return weyl::schedule(lam, beta); });
        const weyl::BracketingPartition partition(static_cast<int>(k.size()), sched.m0, sched.m);
        const auto cross = cd == 0 ? model::CrossSection::point()
                                   : model::CrossSection::flat_torus(std::vector<double>(static_cast<std::size_t>(cd), 1.0));
        const model::CuspEdgeModel m(k, partition.delta(), cross);
        const auto bound = weyl::cusp_error_bound(m, sched, lam);
        j["m0"] = sched.m0;
        j["m"] = sched.m;
        j["delta"] = partition.delta();
        j["blocks"] = partition.blocks().size();
        j["cusp_lattice_total"] =
            session.stage("lattice", [&] { return weyl::cusp_lattice_total(partition, k, cd, lam); });
        j["block_bound"] = bound.block_bound();
        j["closed_bound"] = bound.closed_bound();
      }
      session.emit(out_dir, "bracket.json", json_text(j));
    }
    return 0;
  } catch (const StageError& e) {
    err << "error: numerical failure in stage " << e.stage << ": " << e.what() << "\n";
    return 3;
  } catch (const NumericalFailure& e) {
    err << "error: numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "error: invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cuspedge::cli
