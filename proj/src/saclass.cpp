#include "cuspedge/saclass.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <boost/numeric/odeint.hpp>

#include "cuspedge/errors.hpp"

namespace cuspedge::saclass {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::LimitPoint:
      return "LimitPoint";
    case Verdict::LimitCircle:
      return "LimitCircle";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

IndicialExponents indicial_exponents(double alpha) {
  IndicialExponents out;
  out.exponents = {0.0, 1.0 - alpha};
  for (std::size_t i = 0; i < 2; ++i) out.l2_flags[i] = 2.0 * out.exponents[i] + alpha > -1.0;
  return out;
}

ClassificationReport classify(double alpha) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  ClassificationReport r;
  r.alpha = alpha;
  r.c_eff = 0.5 * alpha * (0.5 * alpha - 1.0);
  r.verdict = r.c_eff >= 0.75 ? Verdict::LimitPoint : Verdict::LimitCircle;
  const auto ind = indicial_exponents(alpha);
  r.indicial_exponents = ind.exponents;
  r.l2_flags = ind.l2_flags;
  return r;
}

std::optional<double> gamma0(double k, double sigma) {
  const double A = sigma - 0.5 * (k - 1.0);
  const double B = sigma + 0.25 * (k - 1.0);
  const double C = sigma + 0.5 * (k - 1.0);
  const double a = 2.0 * A, b = -4.0 * B;
  std::vector<double> roots;
  if (a == 0.0) {
    if (b != 0.0) roots.push_back(-C / b);
  } else {
    const double disc = b * b - 4.0 * a * C;
    if (disc < 0.0) return std::nullopt;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
      roots.push_back(q / a);
      roots.push_back(C / q);
    } else {
      roots.push_back(0.0);
    }
  }
  std::optional<double> best;
  for (double g : roots) {
    if (g > 0.0 && (!best || g < *best)) best = g;
  }
  return best;
}

ConstantWindows windows(double k, double sigma, double beta) {
  if (!(k >= 1.0)) throw InvalidArgument("k must be >= 1");
  ConstantWindows w;
  w.k = k;
  w.sigma = sigma;
  w.beta = beta;
  w.sigma_window = {-(k - 2.0) / 4.0, (k - 1.0) / 2.0};
  const double sb = sigma + beta;
  const double right = 2.0 * sigma + k - 1.0;
  w.c_window = {2.0 * sb * (2.0 * sb + k - 1.0), right * right / 2.0};
  w.gamma0 = gamma0(k, sigma);
  return w;
}

std::optional<double> gamma0_k(double k) {
  if (!(k >= 1.0)) throw InvalidArgument("k must be >= 1");
  const double lo = -(k - 2.0) / 4.0, hi = (k - 1.0) / 2.0;
  std::optional<double> best;
  for (int i = 0; i <= 100; ++i) {
    const double sigma = lo + (hi - lo) * i / 100.0;
    const auto g = gamma0(k, sigma);
    if (g && (!best || *g < *best)) best = g;
  }
  return best;
}

namespace {

// (Re w, Im w, Re v, Im v, S) with v = dw/dt and S the accumulated int |w|^2 d rho.
using State = std::array<double, 5>;

struct Overflow {};

constexpr double kOverflow = 1e150;
constexpr int kLastCut = 40;
constexpr double kRatioBand = 1e-3;
constexpr double kCauchy = 1e-6;
constexpr std::size_t kTail = 10;

struct System {
  double c_eff, m2, k;
  // s = -log rho increases towards the endpoint
  void operator()(const State& x, State& dx, double s) const {
    for (double v : x) {
      if (!(std::abs(v) < kOverflow)) throw Overflow{};
    }
    const double rho = std::exp(-s);
    const std::complex<double> w(x[0], x[1]), v(x[2], x[3]);
    const std::complex<double> coeff(c_eff + m2 * std::pow(rho, 2.0 - 2.0 * k), -rho * rho);
    const std::complex<double> dv = -(v + coeff * w);
    dx[0] = -x[2];
    dx[1] = -x[3];
    dx[2] = dv.real();
    dx[3] = dv.imag();
    dx[4] = rho * std::norm(w);
  }
};

enum class Trend { Converges, Diverges, Unclear };

Trend judge(const std::vector<double>& s) {
  if (s.size() < kTail + 2) return Trend::Unclear;
  std::vector<double> d(s.size() - 1);
  for (std::size_t j = 0; j + 1 < s.size(); ++j) d[j] = s[j + 1] - s[j];
  const std::size_t n = d.size();
  const double r = d[n - 2] > 0.0 ? d[n - 1] / d[n - 2] : 0.0;
  const double first = s[s.size() - 1 - kTail];
  if (first > 0.0 && s.back() / first > 10.0) return Trend::Diverges;
  if (r > 1.0 + kRatioBand) return Trend::Diverges;
  if (r < 1.0 - kRatioBand) {
    // geometric extrapolation of the remaining tail at each of the last cut points
    std::vector<double> limits;
    for (std::size_t j = n - kTail; j < n; ++j) {
      const double rj = d[j - 1] > 0.0 ? d[j] / d[j - 1] : 0.0;
      if (!(rj < 1.0)) return Trend::Unclear;
      limits.push_back(s[j + 1] + d[j] * rj / (1.0 - rj));
    }
    const auto [lo, hi] = std::minmax_element(limits.begin(), limits.end());
    if (*hi - *lo <= kCauchy * std::max(std::abs(*hi), 1.0)) return Trend::Converges;
  }
  return Trend::Unclear;
}

}  // namespace

WeylCircleResult weyl_circle_numeric(double alpha, double k, int m, double delta) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (m != 0 && !(k >= 1.0)) throw InvalidArgument("m != 0 needs k >= 1");
  namespace ode = boost::numeric::odeint;

  const System sys{0.5 * alpha * (0.5 * alpha - 1.0), static_cast<double>(m) * m, k};
  const double s0 = -std::log(0.5 * delta);
  std::vector<double> times{s0};
  WeylCircleResult out;
  for (int j = 2; j <= kLastCut; ++j) {
    out.cut_points.push_back(delta * std::ldexp(1.0, -j));
    times.push_back(-std::log(out.cut_points.back()));
  }

  const std::array<State, 2> starts{State{1.0, 0.0, 0.0, 0.0, 0.0}, State{0.0, 0.0, 1.0, 0.0, 0.0}};
  std::array<Trend, 2> trend{};
  for (std::size_t i = 0; i < 2; ++i) {
    State x = starts[i];
    auto& norms = out.norms[i];
    try {
      ode::integrate_times(ode::make_dense_output(1e-10, 1e-10, ode::runge_kutta_dopri5<State>()), sys, x,
                           times.begin(), times.end(), 1e-3, [&](const State& st, double s) {
                             if (s > s0) norms.push_back(st[4]);
                           });
    } catch (const Overflow&) {
      out.diverged[i] = true;
    }
    trend[i] = out.diverged[i] ? Trend::Diverges : judge(norms);
  }

  if (trend[0] == Trend::Diverges || trend[1] == Trend::Diverges)
    out.verdict = Verdict::LimitPoint;
  else if (trend[0] == Trend::Converges && trend[1] == Trend::Converges)
    out.verdict = Verdict::LimitCircle;
  else
    out.verdict = Verdict::Inconclusive;
  return out;
}

}  // namespace cuspedge::saclass
