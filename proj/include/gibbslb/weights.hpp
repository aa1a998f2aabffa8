#pragma once

#include "gibbslb/errors.hpp"
#include "gibbslb/linalg.hpp"
#include "gibbslb/quadrature.hpp"
#include "gibbslb/spectral.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace gibbslb {

enum class WeightKind { Gaussian, Metropolis, FiniteS, GlauberSmooth, GeneralG };

inline std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::Gaussian: return "gaussian";
    case WeightKind::Metropolis: return "metropolis";
    case WeightKind::FiniteS: return "finite_s";
    case WeightKind::GlauberSmooth: return "glauber_smooth";
    case WeightKind::GeneralG: return "general_g";
  }
  return "unknown";
}

inline WeightKind parse_weight_kind(const std::string& s) {
  if (s == "gaussian") return WeightKind::Gaussian;
  if (s == "metropolis") return WeightKind::Metropolis;
  if (s == "finite_s") return WeightKind::FiniteS;
  if (s == "glauber_smooth") return WeightKind::GlauberSmooth;
  if (s == "general_g") return WeightKind::GeneralG;
  throw InputError("unknown weight kind '" + s + "'");
}

// g sampled at x_k = x0 + k*dx; x0 must be beta*sigma_E^2/2.
struct GTable {
  double x0 = 0.0;
  double dx = 0.0;
  std::vector<double> values;
};

struct WeightSpec {
  WeightKind kind = WeightKind::Gaussian;
  double beta = 1.0;
  double sigma_e = 1.0;
  double omega_gamma = 1.0;
  double sigma_gamma = 1.0;
  double s = 10.0;
  GTable g;

  // Lower end of the Gaussian-family parameter range, beta*sigma_E^2/2.
  double x_min() const { return 0.5 * beta * sigma_e * sigma_e; }
};

inline WeightSpec gaussian_weight(double beta, double sigma_e, double omega_gamma) {
  WeightSpec w;
  w.kind = WeightKind::Gaussian;
  w.beta = beta;
  w.sigma_e = sigma_e;
  w.omega_gamma = omega_gamma;
  const double v = beta > 0 ? 2.0 * omega_gamma / beta - sigma_e * sigma_e : -1.0;
  w.sigma_gamma = v > 0 ? std::sqrt(v) : 0.0;
  return w;
}

// beta = 0 forces omega_gamma = 0 and leaves sigma_gamma free.
inline WeightSpec gaussian_weight_infinite_temperature(double sigma_e, double sigma_gamma) {
  WeightSpec w;
  w.kind = WeightKind::Gaussian;
  w.beta = 0.0;
  w.sigma_e = sigma_e;
  w.omega_gamma = 0.0;
  w.sigma_gamma = sigma_gamma;
  return w;
}

inline WeightSpec metropolis_weight(double beta, double sigma_e) {
  WeightSpec w;
  w.kind = WeightKind::Metropolis;
  w.beta = beta;
  w.sigma_e = sigma_e;
  return w;
}

inline WeightSpec finite_s_weight(double beta, double sigma_e, double s) {
  WeightSpec w = metropolis_weight(beta, sigma_e);
  w.kind = WeightKind::FiniteS;
  w.s = s;
  return w;
}

inline WeightSpec glauber_smooth_weight(double beta, double sigma_e) {
  WeightSpec w = metropolis_weight(beta, sigma_e);
  w.kind = WeightKind::GlauberSmooth;
  return w;
}

inline WeightSpec general_g_weight(double beta, double sigma_e, GTable g) {
  WeightSpec w = metropolis_weight(beta, sigma_e);
  w.kind = WeightKind::GeneralG;
  w.g = std::move(g);
  return w;
}

// sigma_E = omega_gamma = 1/beta, the parameter choice used throughout.
inline WeightSpec standard_weight(WeightKind k, double beta) {
  if (!(beta > 0)) throw InputError("standard parameters sigma_E = 1/beta need beta > 0");
  switch (k) {
    case WeightKind::Gaussian: return gaussian_weight(beta, 1.0 / beta, 1.0 / beta);
    case WeightKind::Metropolis: return metropolis_weight(beta, 1.0 / beta);
    case WeightKind::FiniteS: return finite_s_weight(beta, 1.0 / beta, 10.0);
    case WeightKind::GlauberSmooth: return glauber_smooth_weight(beta, 1.0 / beta);
    case WeightKind::GeneralG: break;
  }
  throw InputError("general_g has no standard parameters; supply a g table");
}

inline void validate(const WeightSpec& w) {
  if (!(w.beta >= 0) || !std::isfinite(w.beta)) throw InputError("beta must be finite and nonnegative");
  if (!(w.sigma_e > 0) || !std::isfinite(w.sigma_e)) throw InputError("sigma_e must be positive");
  switch (w.kind) {
    case WeightKind::Gaussian: {
      if (w.beta == 0.0) {
        if (w.omega_gamma != 0.0) throw InputError("gaussian weight at beta = 0 requires omega_gamma = 0");
        if (!(w.sigma_gamma > 0)) throw InputError("gaussian weight at beta = 0 requires sigma_gamma > 0");
        break;
      }
      const double v = 2.0 * w.omega_gamma / w.beta - w.sigma_e * w.sigma_e;
      if (!(v > 0))
        throw InputError("gaussian weight requires 2*omega_gamma/beta - sigma_e^2 > 0");
      if (std::abs(w.sigma_gamma * w.sigma_gamma - v) > 1e-10 * std::max(1.0, v)) {
        std::ostringstream os;
        os << "sigma_gamma^2 = " << w.sigma_gamma * w.sigma_gamma << " but 2*omega_gamma/beta - sigma_e^2 = " << v;
        throw InputError(os.str());
      }
      break;
    }
    case WeightKind::Metropolis:
    case WeightKind::GlauberSmooth: break;
    case WeightKind::FiniteS:
      if (!(w.s > 0)) throw InputError("finite_s weight requires s > 0");
      break;
    case WeightKind::GeneralG: {
      if (!(w.beta > 0)) throw InputError("general_g weight requires beta > 0");
      if (w.g.values.size() < 2 || !(w.g.dx > 0)) throw InputError("g table needs at least two points and dx > 0");
      if (std::abs(w.g.x0 - w.x_min()) > 1e-12 * std::max(1.0, w.x_min()))
        throw InputError("g table must start at beta*sigma_e^2/2");
      for (double v : w.g.values)
        if (!(v >= 0) || !std::isfinite(v)) throw InputError("g table values must be finite and nonnegative");
      break;
    }
  }
}

// ----- special-function helpers -----

// exp(a) * erfc(x) without overflow for large a or x.
inline double exp_times_erfc(double a, double x) {
  if (x < 25.0) {
    const double e = std::erfc(x);
    if (e == 0.0) return 0.0;
    return std::exp(a + std::log(e));
  }
  // erfc(x) ~ e^{-x^2}/(x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4))
  const double x2 = x * x;
  const double series = 1.0 - 0.5 / x2 + 0.75 / (x2 * x2);
  return std::exp(a - x2) * series / (x * std::sqrt(kPi));
}

// ----- transition weights -----

inline double gaussian_family_x(const WeightSpec& w, double x, double omega) {
  const double var2 = 4.0 * x / w.beta - 2.0 * w.sigma_e * w.sigma_e;  // 2 sigma_gamma(x)^2
  if (var2 <= 0.0) return 0.0;
  const double z = omega + x;
  return std::exp(-z * z / var2);
}

inline std::vector<double> trapezoid_weights(std::size_t n, double dx) {
  std::vector<double> t(n, dx);
  t.front() *= 0.5;
  t.back() *= 0.5;
  return t;
}

inline double eval_weight(const WeightSpec& w, double omega) {
  const double u = omega + 0.5 * w.beta * w.sigma_e * w.sigma_e;
  const double au = std::abs(u);
  const double pre = -w.beta * std::max(u, 0.0);
  switch (w.kind) {
    case WeightKind::Gaussian: {
      const double z = omega + w.omega_gamma;
      return std::exp(-z * z / (2.0 * w.sigma_gamma * w.sigma_gamma));
    }
    case WeightKind::Metropolis: return std::exp(pre);
    case WeightKind::FiniteS: {
      // x-integral over [beta sigma_E^2/2, beta sigma_E^2/2 + s^2/beta].
      const double s = w.s;
      if (w.beta == 0.0) return 1.0;
      const double am = s / 2.0 - w.beta * au / (2.0 * s);
      const double ap = s / 2.0 + w.beta * au / (2.0 * s);
      const double v = 0.5 * (std::exp(pre) * std::erfc(-am) - exp_times_erfc(pre + w.beta * au, ap));
      return std::clamp(v, 0.0, 1.0);
    }
    case WeightKind::GlauberSmooth: {
      // x-integral over [3 beta sigma_E^2/2, inf).
      const double se = w.sigma_e;
      const double bs2 = w.beta * se * se;
      const double v = 0.5 * (exp_times_erfc(pre, (bs2 - au) / (2.0 * se)) +
                              exp_times_erfc(pre + w.beta * au, (bs2 + au) / (2.0 * se)));
      return std::clamp(v, 0.0, 1.0);
    }
    case WeightKind::GeneralG: {
      const auto tw = trapezoid_weights(w.g.values.size(), w.g.dx);
      double acc = 0.0;
      for (std::size_t k = 0; k < w.g.values.size(); ++k)
        acc += tw[k] * w.g.values[k] * gaussian_family_x(w, w.g.x0 + k * w.g.dx, omega);
      return acc;
    }
  }
  return 0.0;
}

// ----- alpha coefficients -----

inline double alpha_closed_form(double nu1, double nu2, double omega_gamma, double sigma_gamma, double sigma_e) {
  const double v = sigma_e * sigma_e + sigma_gamma * sigma_gamma;
  const double sp = nu1 + nu2 + 2.0 * omega_gamma;
  const double sm = nu1 - nu2;
  return sigma_gamma / (2.0 * std::sqrt(v)) * std::exp(-sp * sp / (8.0 * v)) *
         std::exp(-sm * sm / (8.0 * sigma_e * sigma_e));
}

// Fourier weight of the Metropolis limit of the Gaussian family.
inline double fplus_hat_metropolis(double nu, double beta, double sigma_e) {
  const double r8 = std::sqrt(8.0);
  const double a = beta * sigma_e / r8;
  const double b = nu / (r8 * sigma_e);
  return 0.25 * (std::erfc(a + b) + exp_times_erfc(-0.5 * beta * nu, a - b));
}

inline double alpha_metropolis_product(double nu1, double nu2, double beta, double sigma_e) {
  const double sm = nu1 - nu2;
  return fplus_hat_metropolis(nu1 + nu2, beta, sigma_e) * std::exp(-sm * sm / (8.0 * sigma_e * sigma_e));
}

inline double alpha_general_g(double nu1, double nu2, const WeightSpec& w) {
  const auto tw = trapezoid_weights(w.g.values.size(), w.g.dx);
  double acc = 0.0;
  for (std::size_t k = 0; k < w.g.values.size(); ++k) {
    const double x = w.g.x0 + k * w.g.dx;
    const double sg2 = 2.0 * x / w.beta - w.sigma_e * w.sigma_e;
    if (sg2 <= 0.0 || w.g.values[k] == 0.0) continue;
    acc += tw[k] * w.g.values[k] * alpha_closed_form(nu1, nu2, x, std::sqrt(sg2), w.sigma_e);
  }
  return acc;
}

struct QuadratureSpec {
  int order = 64;
  double rel_tol = 1e-10;
  double window = 10.0;   // half-widths beyond the extreme centers, in sigma_E
  int max_doublings = 8;
};

inline double alpha_quadrature(double nu1, double nu2, const WeightSpec& w, const QuadratureSpec& q = {}) {
  const double se = w.sigma_e;
  double center, h;
  if (w.kind == WeightKind::Gaussian) {
    center = -w.omega_gamma;
    h = std::min(se, w.sigma_gamma);
  } else {
    center = -w.x_min();  // Metropolis kink
    h = se;
  }
  const double lo = std::min({nu1, nu2, center}) - q.window * se;
  const double hi = std::max({nu1, nu2, center}) + q.window * se;
  const double c4 = 1.0 / (4.0 * se * se);
  auto f = [&](double om) {
    const double a = om - nu1, b = om - nu2;
    const double g = std::exp(-(a * a + b * b) * c4);
    return g == 0.0 ? 0.0 : eval_weight(w, om) * g;
  };
  const double pref = 1.0 / (2.0 * se * std::sqrt(2.0 * kPi));
  double prev = composite_gl(f, aligned_edges(lo, hi, h, center), q.order);
  double cur = prev;
  for (int level = 1; level <= q.max_doublings; ++level) {
    h *= 0.5;
    cur = composite_gl(f, aligned_edges(lo, hi, h, center), q.order);
    if (std::abs(cur - prev) <= q.rel_tol * std::abs(cur)) return pref * cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "alpha quadrature did not converge at (" << nu1 << ", " << nu2 << ")";
  throw NumericError(os.str(), pref * cur);
}

enum class AlphaRoute { Auto, ClosedForm, Quadrature, Product };

struct AlphaMatrix {
  std::vector<double> nu;
  std::vector<int> negation;
  RMat values;
  std::string provenance;

  double operator()(int i, int j) const { return values(i, j); }
  int size() const { return static_cast<int>(nu.size()); }
};

inline AlphaMatrix alpha_matrix(const BohrSet& bohr, const WeightSpec& w, AlphaRoute route = AlphaRoute::Auto,
                                const QuadratureSpec& q = {}) {
  validate(w);
  if (route == AlphaRoute::Auto) {
    if (w.kind == WeightKind::Gaussian) route = AlphaRoute::ClosedForm;
    else if (w.kind == WeightKind::GeneralG) route = AlphaRoute::ClosedForm;
    else route = AlphaRoute::Quadrature;
  }
  if (route == AlphaRoute::ClosedForm && w.kind != WeightKind::Gaussian && w.kind != WeightKind::GeneralG)
    throw InputError("closed-form alpha exists only for gaussian and general_g weights");
  if (route == AlphaRoute::Product && w.kind != WeightKind::Metropolis)
    throw InputError("product-form alpha exists only for the metropolis weight");

  AlphaMatrix A;
  A.nu = bohr.frequencies;
  A.negation = bohr.negation;
  const int K = bohr.size();
  A.values = RMat::Zero(K, K);
  switch (route) {
    case AlphaRoute::ClosedForm: A.provenance = w.kind == WeightKind::GeneralG ? "g-trapezoid" : "closed-form"; break;
    case AlphaRoute::Quadrature: A.provenance = "quadrature"; break;
    case AlphaRoute::Product: A.provenance = "product"; break;
    case AlphaRoute::Auto: break;
  }

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < K; ++i)
    for (int j = i; j < K; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const double n1 = A.nu[i], n2 = A.nu[j];
    double v = 0.0;
    switch (route) {
      case AlphaRoute::ClosedForm:
        v = w.kind == WeightKind::Gaussian ? alpha_closed_form(n1, n2, w.omega_gamma, w.sigma_gamma, w.sigma_e)
                                           : alpha_general_g(n1, n2, w);
        break;
      case AlphaRoute::Quadrature: v = alpha_quadrature(n1, n2, w, q); break;
      case AlphaRoute::Product: v = alpha_metropolis_product(n1, n2, w.beta, w.sigma_e); break;
      case AlphaRoute::Auto: break;
    }
    A.values(i, j) = v;
    A.values(j, i) = v;
  });
  return A;
}

inline double check_skew_symmetry(const AlphaMatrix& a, double beta) {
  const int K = a.size();
  if (static_cast<int>(a.negation.size()) != K) throw InternalError("alpha matrix lacks negation map");
  double r = 0.0;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      const int ni = a.negation[i], nj = a.negation[j];
      if (ni < 0 || nj < 0 || ni >= K || nj >= K) throw InternalError("Bohr set is not negation-closed");
      const double lhs = a(i, j);
      const double rhs = a(nj, ni) * std::exp(-0.5 * beta * (a.nu[i] + a.nu[j]));
      r = std::max(r, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
  return r;
}

inline double check_psd(const AlphaMatrix& a) {
  Eigen::SelfAdjointEigenSolver<RMat> es(a.values, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace gibbslb
