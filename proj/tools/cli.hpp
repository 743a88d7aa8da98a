#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuspedge/model.hpp"
#include "cuspedge/spectrum.hpp"

namespace cuspedge::cli {

enum class BcSelection { Both, Dirichlet, Neumann };

struct RunConfig {
  model::CuspEdgeModel model{{3.0}, 0.5};
  sturm::MeshSpec mesh{2000, 3.0};
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::vector<double> lambda_grid;
  BcSelection bc = BcSelection::Both;
  std::optional<std::string> output_dir;
  int threads = 0;
};

/// Validates and expands a run configuration document. Throws InvalidArgument.
RunConfig parse_run_config(const nlohmann::json& doc);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

/// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

/// Entry point shared by the executable and the tests. Returns the process exit code:
/// 0 success, 2 invalid input, 3 numerical failure, 1 other errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cuspedge::cli
