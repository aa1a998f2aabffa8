#pragma once

#include "gibbslb/discriminant.hpp"
#include "gibbslb/errors.hpp"
#include "gibbslb/linalg.hpp"
#include "gibbslb/quadrature.hpp"
#include "gibbslb/spectral.hpp"
#include "gibbslb/weights.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace gibbslb {

// ----- scalar profiles -----
//
// b1, b2, b2_M_eta, n1, n2 live in dimensionless time (units of beta).
// The remaining kinds take physical time and carry beta explicitly.

enum class ProfileKind {
  FFilter,
  B1,
  B2,
  B2MEta,
  N1,
  N2,
  HMinus,
  HPlusGauss,
  HPlusMetropolis,
  FPlusS,
  FMinusGeneral,
  FPlusGeneral,
};

inline std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::FFilter: return "f_filter";
    case ProfileKind::B1: return "b1";
    case ProfileKind::B2: return "b2";
    case ProfileKind::B2MEta: return "b2_M_eta";
    case ProfileKind::N1: return "n1";
    case ProfileKind::N2: return "n2";
    case ProfileKind::HMinus: return "h_minus";
    case ProfileKind::HPlusGauss: return "h_plus_gauss";
    case ProfileKind::HPlusMetropolis: return "h_plus_metropolis";
    case ProfileKind::FPlusS: return "f_plus_s";
    case ProfileKind::FMinusGeneral: return "f_minus_general";
    case ProfileKind::FPlusGeneral: return "f_plus_general";
  }
  return "?";
}

inline ProfileKind parse_profile_kind(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(ProfileKind::FPlusGeneral); ++k)
    if (to_string(static_cast<ProfileKind>(k)) == s) return static_cast<ProfileKind>(k);
  throw InputError("unknown profile kind '" + s + "'");
}

struct TimeProfile {
  ProfileKind kind = ProfileKind::B2;
  double beta = 1.0;
  double sigma_e = 1.0;
  double omega_gamma = 1.0;
  double s = 50.0;
  double eta = 1e-3;

  bool dimensionless() const {
    return kind == ProfileKind::B1 || kind == ProfileKind::B2 || kind == ProfileKind::B2MEta ||
           kind == ProfileKind::N1 || kind == ProfileKind::N2;
  }
  // Time scale beyond which the profile has decayed to roundoff.
  double range() const {
    if (dimensionless()) return 8.0;
    if (kind == ProfileKind::FFilter) return 8.0 / sigma_e;
    return 8.0 * beta;
  }
};

inline constexpr double kB2MPrefactor = 1.0 / (4.0 * 1.4142135623730951 * kPi * kPi);
inline constexpr double kMetropolisDelta = 1.0 / (4.0 * 1.4142135623730951 * kPi);

inline void validate(const TimeProfile& p) {
  const bool needs_beta = !p.dimensionless() && p.kind != ProfileKind::FFilter;
  if (needs_beta && !(p.beta > 0.0)) throw InputError(to_string(p.kind) + " requires beta > 0");
  if (!(p.sigma_e > 0.0)) throw InputError("sigma_e must be positive");
  if (p.kind == ProfileKind::B2MEta && !(p.eta > 0.0)) throw InputError("b2_M_eta requires eta > 0");
  if (p.kind == ProfileKind::FPlusS && !(p.s > 0.0)) throw InputError("f_plus_s requires s > 0");
  if (p.kind == ProfileKind::FPlusGeneral && 2.0 * p.omega_gamma / p.beta - p.sigma_e * p.sigma_e < 0.0)
    throw InputError("f_plus_general requires 2 omega_gamma / beta >= sigma_e^2");
}

// (sech(2 pi .) * g)(t) with s truncated to [-6.5, 6.5].
template <class G>
double sech_convolution(G&& g, double t) {
  static const std::vector<double> edges = aligned_edges(-6.5, 6.5, 0.05, 0.0);
  return composite_gl([&](double s) { return g(t - s) / std::cosh(2.0 * kPi * s); }, edges, 16);
}

inline double b1_profile(double t) {
  static const double pre = 2.0 * std::sqrt(kPi) * std::exp(0.125);
  return pre * sech_convolution([](double x) { return -std::sin(x) * std::exp(-2.0 * x * x); }, t);
}

inline double n1_profile(double t) {
  static const double pre = 0.5 * std::sqrt(kPi);
  return pre * sech_convolution([](double x) { return std::exp(-2.0 * x * x); }, t);
}

inline cplx b2_profile(double t) {
  static const double pre = 1.0 / (2.0 * kPi * std::sqrt(kPi));
  return pre * std::exp(cplx(-4.0 * t * t, -2.0 * t));
}

// e^w - 1 without cancellation for small |w|.
inline cplx expm1c(cplx w) {
  if (std::abs(w) > 0.1) return std::exp(w) - 1.0;
  cplx term = w, sum = w;
  for (int k = 2; k < 14; ++k) {
    term *= w / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

inline cplx b2_metropolis_profile(double t, double eta) {
  const cplx den = t * cplx(2.0 * t, 1.0);
  const cplx w(-2.0 * t * t, -t);
  if (std::abs(t) <= eta) {
    // e^w + i(2t + i) = (e^w - 1) + 2 i t
    if (t == 0.0) return kB2MPrefactor;
    return kB2MPrefactor * (expm1c(w) + cplx(0.0, 2.0 * t)) / den;
  }
  return kB2MPrefactor * std::exp(w) / den;
}

// (1/sqrt(2 pi)) int_{x0}^{x1} e^{-x z} dx with z = 4t^2/beta + 2 i t.
inline cplx truncated_exponential_integral(double x0, double x1, cplx z) {
  static const double c = 1.0 / std::sqrt(2.0 * kPi);
  if (std::abs(z) * x1 < 1e-4) {
    const cplx zz = z;
    return c * ((x1 - x0) - zz * (x1 * x1 - x0 * x0) / 2.0 + zz * zz * (x1 * x1 * x1 - x0 * x0 * x0) / 6.0);
  }
  return c * (std::exp(-x0 * z) - std::exp(-x1 * z)) / z;
}

inline cplx eval_profile(const TimeProfile& p, double t) {
  const double b = p.beta;
  switch (p.kind) {
    case ProfileKind::FFilter:
      return std::exp(-p.sigma_e * p.sigma_e * t * t) * std::sqrt(p.sigma_e * std::sqrt(2.0 / kPi));
    case ProfileKind::B1: return b1_profile(t);
    case ProfileKind::B2: return b2_profile(t);
    case ProfileKind::B2MEta: return b2_metropolis_profile(t, p.eta);
    case ProfileKind::N1: return n1_profile(t);
    case ProfileKind::N2: return 8.0 * b2_profile(t);
    case ProfileKind::HMinus: {
      const double u = t / b;
      return std::exp(-2.0 * u * u) / (kPi * b);
    }
    case ProfileKind::HPlusGauss: {
      const double u = t / b;
      return std::exp(-0.25 - 4.0 * u * u) / b;
    }
    case ProfileKind::HPlusMetropolis: {
      const double u = t / b;
      return std::exp(-0.125 - 2.0 * u * u) / (4.0 * std::sqrt(2.0 * kPi) * (u * u + 0.0625)) / b;
    }
    case ProfileKind::FPlusS: {
      const double x0 = 0.5 * b * p.sigma_e * p.sigma_e;
      const double x1 = p.s * p.s / b;
      return truncated_exponential_integral(x0, x1, cplx(4.0 * t * t / b, 2.0 * t));
    }
    case ProfileKind::FMinusGeneral: {
      const double se = p.sigma_e;
      const double pre = se / (kPi * b) * std::exp(b * b * se * se / 8.0);
      // substitute s = beta u in the convolution
      const double conv = b * sech_convolution(
                                  [&](double u) {
                                    const double x = b * u;
                                    return std::sin(-b * se * se * x) * std::exp(-2.0 * se * se * x * x);
                                  },
                                  t / b);
      return pre * conv;
    }
    case ProfileKind::FPlusGeneral: {
      const double x = p.omega_gamma;
      const double sg = std::sqrt(std::max(0.0, 2.0 * x / b - p.sigma_e * p.sigma_e));
      return sg * std::exp(cplx(-4.0 * t * t * x / b, -2.0 * t * x));
    }
  }
  throw InternalError("unhandled profile kind");
}

struct L1Result {
  double value = 0.0;
  double tail = 0.0;  // mass in range < |t| < 2 range
};

// Adaptive Gauss-Kronrod over [-2L, 2L], split at 0, +-L and +-eta.
inline L1Result l1_norm_detail(const TimeProfile& p, double rel_tol = 1e-12) {
  validate(p);
  const double L = p.range();
  std::vector<double> bp = {-2 * L, -L, 0.0, L, 2 * L};
  if (p.kind == ProfileKind::B2MEta && p.eta < L) {
    bp.push_back(-p.eta);
    bp.push_back(p.eta);
  }
  std::sort(bp.begin(), bp.end());
  auto f = [&](double t) { return std::abs(eval_profile(p, t)); };
  L1Result r;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, bp[k], bp[k + 1], 15, rel_tol);
    r.value += v;
    if (bp[k + 1] <= -L || bp[k] >= L) r.tail += v;
  }
  return r;
}

inline double l1_norm(const TimeProfile& p) {
  const L1Result r = l1_norm_detail(p);
  if (r.tail > 1e-8 * r.value) {
    std::ostringstream os;
    os << "l1 norm of " << to_string(p.kind) << " has tail mass " << r.tail << " beyond |t| = " << p.range();
    throw NumericError(os.str(), r.value);
  }
  return r.value;
}

// ----- grids -----

struct TimeGrid {
  double t0 = 0.01;
  double T = 8.0;

  std::vector<double> nodes() const {
    const long K = static_cast<long>(std::floor(T / t0 + 1e-9));
    std::vector<double> t;
    t.reserve(2 * K + 1);
    for (long k = -K; k <= K; ++k) t.push_back(k * t0);
    return t;
  }
};

// Step t0 (physical time) resolves every Bohr frequency: t0 * nu_max <= pi / 4.
inline void check_nyquist(double t0, double nu_max) {
  if (!(t0 > 0.0)) throw InputError("time step must be positive");
  if (nu_max > 0.0 && t0 * nu_max > kPi / 4.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << t0 << " too coarse for nu_max = " << nu_max << "; need t0 <= " << kPi / (4.0 * nu_max);
    throw InputError(os.str());
  }
}

// Dimensionless double-integral grids (t in units of beta).
struct TimeDomainGrid {
  double tau0 = 0.01;
  double T = 8.0;        // outer
  double T_inner = 4.0;  // inner
  bool nyquist_guard = true;
};

inline TimeDomainGrid default_time_domain_grid(double beta, double nu_max) {
  TimeDomainGrid g;
  if (nu_max > 0.0) g.tau0 = std::min(0.01, kPi / (8.0 * nu_max * beta));
  return g;
}

inline void validate(const TimeDomainGrid& g, double beta, double nu_max) {
  if (!(beta > 0.0)) throw InputError("time-domain reconstruction requires beta > 0");
  if (!(g.T > 0.0) || !(g.T_inner > 0.0)) throw InputError("time-domain ranges must be positive");
  if (!(g.tau0 > 0.0)) throw InputError("time step must be positive");
  if (g.nyquist_guard) check_nyquist(g.tau0 * beta, nu_max);
}

// Symmetric composite Gauss-Legendre nodes for the Metropolis inner integral:
// one panel on [-eta, eta], geometric panels up to 1, then width 0.05 panels.
inline NodeSet metropolis_inner_nodes(double eta, double T) {
  if (!(eta > 0.0) || eta >= 1.0) throw InputError("eta must lie in (0, 1)");
  std::vector<double> pos = {eta};
  while (pos.back() * 2.0 < 1.0) pos.push_back(pos.back() * 2.0);
  if (pos.back() < 1.0) pos.push_back(1.0);
  while (pos.back() < T - 1e-12) pos.push_back(std::min(T, pos.back() + 0.05));
  NodeSet mid = composite_nodes({-eta, eta}, 32);
  NodeSet right = composite_nodes(pos, 16);
  NodeSet ns = mid;
  for (std::size_t k = 0; k < right.t.size(); ++k) {
    ns.t.push_back(right.t[k]);
    ns.w.push_back(right.w[k]);
    ns.t.push_back(-right.t[k]);
    ns.w.push_back(right.w[k]);
  }
  return ns;
}

// ----- operator Fourier transform -----

inline double oft_bohr_prefactor(double sigma_e) { return 1.0 / std::sqrt(2.0 * sigma_e * std::sqrt(2.0 * kPi)); }

inline Mat oft_bohr(const JumpSet& J, std::size_t a, double omega, double sigma_e) {
  if (!(sigma_e > 0.0)) throw InputError("sigma_e must be positive");
  const Eigen::Index d = J.dim();
  Mat out = Mat::Zero(d, d);
  const double c4 = 1.0 / (4.0 * sigma_e * sigma_e);
  for (std::size_t g = 0; g < J.frequencies.size(); ++g) {
    const double x = omega - J.frequencies[g];
    out += std::exp(-x * x * c4) * J.components[a][g];
  }
  return oft_bohr_prefactor(sigma_e) * out;
}

// (1/sqrt(2 pi)) sum_t A(t) e^{-i omega t} f(t) t0 over the physical grid.
inline Mat oft_quadrature(const JumpSet& J, std::size_t a, double omega, double sigma_e, const TimeGrid& grid) {
  double nu_max = 0.0;
  for (double f : J.frequencies) nu_max = std::max(nu_max, std::abs(f));
  check_nyquist(grid.t0, nu_max);
  TimeProfile f;
  f.kind = ProfileKind::FFilter;
  f.sigma_e = sigma_e;
  const Eigen::Index d = J.dim();
  const Mat& At = J.eigen_ops[a];
  Mat acc = Mat::Zero(d, d);
  for (double t : grid.nodes()) {
    const cplx w = eval_profile(f, t) * grid.t0 * std::exp(cplx(0.0, -omega * t));
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        acc(i, j) += w * std::exp(cplx(0.0, (J.energies(i) - J.energies(j)) * t)) * At(i, j);
  }
  return J.to_lab(acc / std::sqrt(2.0 * kPi));
}

// ----- double-integral reconstructions -----

enum class TimeDomainKind { Gaussian, Metropolis };

inline TimeDomainKind time_domain_kind(WeightKind k) {
  if (k == WeightKind::Gaussian) return TimeDomainKind::Gaussian;
  if (k == WeightKind::Metropolis) return TimeDomainKind::Metropolis;
  throw InputError("time-domain reconstruction supports gaussian and metropolis weights, got " + to_string(k));
}

namespace detail {

inline double nu_max_exact(const JumpSet& J) {
  return J.energies.size() ? J.energies.maxCoeff() - J.energies.minCoeff() : 0.0;
}

// O_jl = sum_a sum_t' w p(t') [A^dag(beta t') A(-beta t')]_jl (+ delta A^dag A), eigenbasis.
inline Mat inner_integral(const JumpSet& J, double beta, const NodeSet& nodes, const std::vector<cplx>& prof,
                          double delta) {
  const Eigen::Index d = J.dim();
  const RVec& E = J.energies;
  Mat O = Mat::Zero(d, d);
  for (const Mat& At : J.eigen_ops) {
    // [A^dag(s) A(-s)]_jl = sum_k conj(At_kj) At_kl exp(i s (E_j + E_l - 2 E_k))
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index l = 0; l < d; ++l)
        for (Eigen::Index k = 0; k < d; ++k) {
          const cplx c = std::conj(At(k, j)) * At(k, l);
          if (c == 0.0) continue;
          const double om = beta * (E(j) + E(l) - 2.0 * E(k));
          cplx s = delta;
          for (std::size_t q = 0; q < nodes.t.size(); ++q)
            s += nodes.w[q] * prof[q] * std::exp(cplx(0.0, om * nodes.t[q]));
          O(j, l) += c * s;
        }
  }
  return O;
}

// sum_t w p(t) e^{-i beta H t} O e^{i beta H t}, eigenbasis.
inline Mat outer_integral(const JumpSet& J, double beta, const NodeSet& nodes, const std::vector<double>& prof,
                          const Mat& O) {
  const Eigen::Index d = J.dim();
  const RVec& E = J.energies;
  Mat X = Mat::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index l = 0; l < d; ++l) {
      if (O(j, l) == 0.0) continue;
      const double om = -beta * (E(j) - E(l));
      cplx s = 0.0;
      for (std::size_t q = 0; q < nodes.t.size(); ++q) s += nodes.w[q] * prof[q] * std::exp(cplx(0.0, om * nodes.t[q]));
      X(j, l) = s * O(j, l);
    }
  return X;
}

inline NodeSet uniform_nodes(double t0, double T) {
  NodeSet ns;
  ns.t = TimeGrid{t0, T}.nodes();
  ns.w.assign(ns.t.size(), t0);
  return ns;
}

template <class F>
std::vector<double> tabulate_real(const NodeSet& ns, F&& f) {
  std::vector<double> v(ns.t.size());
  parallel_for(ns.t.size(), [&](std::size_t k) { v[k] = f(ns.t[k]); });
  return v;
}

inline Mat coherent_like(const JumpSet& J, double beta, TimeDomainKind kind, const TimeDomainGrid& grid, double eta,
                         bool dissipative) {
  validate(grid, beta, nu_max_exact(J));
  const NodeSet outer = uniform_nodes(grid.tau0, grid.T);
  const std::vector<double> p1 = tabulate_real(outer, dissipative ? n1_profile : b1_profile);
  const double scale = dissipative ? 8.0 : 1.0;
  NodeSet inner;
  std::vector<cplx> p2;
  double delta = 0.0;
  if (kind == TimeDomainKind::Gaussian) {
    inner = uniform_nodes(grid.tau0, grid.T_inner);
    for (double t : inner.t) p2.push_back(scale * b2_profile(t));
  } else {
    if (!(eta > 0.0)) throw InputError("Metropolis time-domain reconstruction requires eta > 0");
    inner = metropolis_inner_nodes(eta, std::max(grid.T_inner, 6.0));
    for (double t : inner.t) p2.push_back(scale * b2_metropolis_profile(t, eta));
    delta = scale * kMetropolisDelta;
  }
  const Mat O = inner_integral(J, beta, inner, p2, delta);
  Mat X = outer_integral(J, beta, outer, p1, O);
  if (dissipative) X = -X;
  return J.to_lab(X);
}

}  // namespace detail

inline Mat reconstruct_B(const JumpSet& J, double beta, TimeDomainKind kind, const TimeDomainGrid& grid,
                         double eta = 1e-3) {
  return detail::coherent_like(J, beta, kind, grid, eta, false);
}

inline Mat reconstruct_N(const JumpSet& J, double beta, TimeDomainKind kind, const TimeDomainGrid& grid,
                         double eta = 1e-3) {
  return detail::coherent_like(J, beta, kind, grid, eta, true);
}

// sum_a sum h-(t-) h+(t+) A(t+ - t-) (x) conj A(-t- - t+), lab basis, on the outer dimensionless grid.
inline Mat reconstruct_transition(const JumpSet& J, double beta, TimeDomainKind kind, const TimeDomainGrid& grid) {
  validate(grid, beta, detail::nu_max_exact(J));
  const Eigen::Index d = J.dim();
  const RVec& E = J.energies;
  const NodeSet ns = detail::uniform_nodes(grid.tau0, grid.T);
  std::vector<double> hm, hp;
  for (double t : ns.t) {
    hm.push_back(std::exp(-2.0 * t * t) / kPi);
    hp.push_back(kind == TimeDomainKind::Gaussian
                     ? std::exp(-0.25 - 4.0 * t * t)
                     : std::exp(-0.125 - 2.0 * t * t) / (4.0 * std::sqrt(2.0 * kPi) * (t * t + 0.0625)));
  }
  // Separable: phase e^{i beta t+ (nu_ik + nu_jl)} e^{-i beta t- (nu_ik - nu_jl)}.
  auto transform = [&](const std::vector<double>& h, double om) {
    cplx s = 0.0;
    for (std::size_t q = 0; q < ns.t.size(); ++q) s += ns.w[q] * h[q] * std::exp(cplx(0.0, om * ns.t[q]));
    return s;
  };
  const Eigen::Index D = d * d;
  Mat S = Mat::Zero(D, D);  // kernel on ((i,j),(k,l)), shared by all jumps
  parallel_for(static_cast<std::size_t>(D), [&](std::size_t r) {
    const Eigen::Index i = static_cast<Eigen::Index>(r) / d, j = static_cast<Eigen::Index>(r) % d;
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index l = 0; l < d; ++l) {
        const double nik = E(i) - E(k), njl = E(j) - E(l);
        S(r, k * d + l) = transform(hp, beta * (nik + njl)) * transform(hm, -beta * (nik - njl));
      }
  });
  Mat M = Mat::Zero(D, D);
  for (const Mat& At : J.eigen_ops)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index k = 0; k < d; ++k) {
        if (At(i, k) == 0.0) continue;
        for (Eigen::Index j = 0; j < d; ++j)
          for (Eigen::Index l = 0; l < d; ++l)
            M(i * d + j, k * d + l) += S(i * d + j, k * d + l) * At(i, k) * std::conj(At(j, l));
      }
  const Mat W = eigen_to_lab_super(J);
  return W * M * W.adjoint();
}

// ----- functional equation -----

// max |c(t-t') f(t) f(t') - c(t'-t-i beta) f(t+i beta/2) f(t'-i beta/2)| over the grid,
// c(x) = e^{-i a x} e^{-x^2/delta^2}, f(t) = e^{-t^2/kappa^2}.
inline double functional_equation_residual(double beta, double delta, double kappa, double a,
                                           const std::vector<double>& grid) {
  if (!(delta > 0.0) || !(kappa > 0.0)) throw InputError("delta and kappa must be positive");
  auto c = [&](cplx x) { return std::exp(-I_unit * a * x - x * x / (delta * delta)); };
  auto f = [&](cplx t) { return std::exp(-t * t / (kappa * kappa)); };
  double worst = 0.0;
  for (double t : grid)
    for (double tp : grid) {
      const cplx lhs = c(t - tp) * f(t) * f(tp);
      const cplx rhs = c(cplx(tp - t, -beta)) * f(cplx(t, beta / 2)) * f(cplx(tp, -beta / 2));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

inline std::vector<double> symmetric_grid(double half_width, double step) {
  std::vector<double> g;
  const long K = static_cast<long>(std::llround(half_width / step));
  for (long k = -K; k <= K; ++k) g.push_back(k * step);
  return g;
}

}  // namespace gibbslb
