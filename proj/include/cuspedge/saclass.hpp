#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cuspedge::saclass {

enum class Verdict { LimitPoint, LimitCircle, Inconclusive };

std::string to_string(Verdict v);

struct ClassificationReport {
  double alpha = 0.0;
  double c_eff = 0.0;  // (alpha/2)(alpha/2 - 1)
  Verdict verdict = Verdict::LimitPoint;
  std::array<double, 2> indicial_exponents{};  // {0, 1 - alpha}
  std::array<bool, 2> l2_flags{};               // rho^{2s+alpha} integrable at 0
};

/// Limit point iff c_eff >= 3/4, equivalently alpha >= 3.
ClassificationReport classify(double alpha);

struct IndicialExponents {
  std::array<double, 2> exponents{};
  std::array<bool, 2> l2_flags{};
};

/// Roots of s(s-1) + alpha s = 0; s is weighted-L^2 at 0 iff 2s + alpha > -1.
IndicialExponents indicial_exponents(double alpha);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo < hi); }
  bool contains(double x) const { return lo < x && x < hi; }
};

struct ConstantWindows {
  double k = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
  Interval sigma_window;  // (-(k-2)/4, (k-1)/2)
  Interval c_window;      // (2(sigma+beta)(2(sigma+beta)+k-1), (2 sigma+k-1)^2/2)
  std::optional<double> gamma0;
};

ConstantWindows windows(double k, double sigma, double beta);

/// Smallest positive root of 2A g^2 - 4B g + C with A = sigma-(k-1)/2, B = sigma+(k-1)/4, C = sigma+(k-1)/2.
std::optional<double> gamma0(double k, double sigma);

/// Minimum of gamma0(k, sigma) over 101 equally spaced sigma in the closed sigma window.
std::optional<double> gamma0_k(double k);

struct WeylCircleResult {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> cut_points;                // delta 2^{-j}, j = 2..40
  std::array<std::vector<double>, 2> norms;      // squared weighted norms on (cut, delta/2)
  std::array<bool, 2> diverged{};                // integration left the representable range
};

/**
 * Endpoint test for -u'' - (alpha/rho) u' + m^2 rho^{-2k} u = i u at rho = 0. Two solutions
 * are integrated from delta/2 towards 0 in the frame w = rho^{alpha/2} u, t = log rho.
 */
WeylCircleResult weyl_circle_numeric(double alpha, double k, int m, double delta);

}  // namespace cuspedge::saclass
