#pragma once

#include "gibbslb/errors.hpp"
#include "gibbslb/linalg.hpp"
#include "gibbslb/spectral.hpp"
#include "gibbslb/weights.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

namespace gibbslb {

struct Superoperator {
  Mat M;  // acts on row-major vec(rho)
  Eigen::Index d = 0;

  Mat apply(const Mat& X) const { return unvec(M * vec(X), d); }
};

struct LindbladParts {
  Superoperator T;
  Mat R;
  Mat B;
  Superoperator L;
};

inline void check_alpha_indexing(const JumpSet& J, const AlphaMatrix& a) {
  if (a.size() != static_cast<int>(J.frequencies.size()))
    throw InputError("alpha matrix is indexed by a different Bohr set than the jumps");
  for (int k = 0; k < a.size(); ++k)
    if (a.nu[k] != J.frequencies[k]) throw InputError("alpha matrix frequencies do not match the jump Bohr set");
}

// W = U (x) conj(U) maps eigenbasis vec to lab vec.
inline Mat eigen_to_lab_super(const JumpSet& J) { return kron(J.U, J.U.conjugate()); }

// ----- parts -----

// Sum_a Sum_{nu1,nu2} alpha A_nu1 (x) conj(A_nu2), assembled in the eigenbasis:
// Mt[(i,j),(k,l)] = Sum_a alpha(nu_ik, nu_jl) At_ik conj(At_jl).
inline Superoperator transition_part(const JumpSet& J, const AlphaMatrix& a) {
  check_alpha_indexing(J, a);
  const Eigen::Index d = J.dim();
  Mat Mt = Mat::Zero(d * d, d * d);
  for (const auto& At : J.eigen_ops)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index k = 0; k < d; ++k) {
        if (At(i, k) == 0.0) continue;
        for (Eigen::Index j = 0; j < d; ++j)
          for (Eigen::Index l = 0; l < d; ++l)
            Mt(i * d + j, k * d + l) += a(J.nu_index(i, k), J.nu_index(j, l)) * At(i, k) * std::conj(At(j, l));
      }
  const Mat W = eigen_to_lab_super(J);
  return {W * Mt * W.adjoint(), d};
}

// Literal Bohr-component double sum; reference route for small systems.
inline Superoperator transition_part_bohr_sum(const JumpSet& J, const AlphaMatrix& a) {
  check_alpha_indexing(J, a);
  const Eigen::Index d = J.dim();
  Mat M = Mat::Zero(d * d, d * d);
  for (const auto& comps : J.components)
    for (int n1 = 0; n1 < a.size(); ++n1) {
      if (comps[n1].norm() == 0.0) continue;
      for (int n2 = 0; n2 < a.size(); ++n2) {
        if (comps[n2].norm() == 0.0) continue;
        M += a(n1, n2) * kron(comps[n1], comps[n2].conjugate());
      }
    }
  return {M, d};
}

// Decay operator in the eigenbasis: Rt_jl = Sum_a Sum_k alpha(nu_kl, nu_kj) conj(At_kj) At_kl.
inline Mat decay_operator_eigen(const JumpSet& J, const AlphaMatrix& a) {
  const Eigen::Index d = J.dim();
  Mat Rt = Mat::Zero(d, d);
  for (const auto& At : J.eigen_ops)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index l = 0; l < d; ++l)
        for (Eigen::Index k = 0; k < d; ++k)
          Rt(j, l) += a(J.nu_index(k, l), J.nu_index(k, j)) * std::conj(At(k, j)) * At(k, l);
  return hermitian_part(Rt);
}

inline Mat decay_operator(const JumpSet& J, const AlphaMatrix& a) {
  check_alpha_indexing(J, a);
  return hermitian_part(J.to_lab(decay_operator_eigen(J, a)));
}

inline Mat decay_operator_bohr_sum(const JumpSet& J, const AlphaMatrix& a) {
  const Eigen::Index d = J.dim();
  Mat R = Mat::Zero(d, d);
  for (const auto& comps : J.components)
    for (int n1 = 0; n1 < a.size(); ++n1)
      for (int n2 = 0; n2 < a.size(); ++n2) R += a(n1, n2) * comps[n2].adjoint() * comps[n1];
  return R;
}

// B = (i/2) Sum_nu tanh(beta nu/4) R_nu, with R_nu read off in the eigenbasis.
inline Mat coherent_term(const JumpSet& J, const AlphaMatrix& a, double beta) {
  check_alpha_indexing(J, a);
  const Eigen::Index d = J.dim();
  const Mat Rt = decay_operator_eigen(J, a);
  Mat Bt(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) Bt(i, j) = 0.5 * I_unit * std::tanh(0.25 * beta * J.nu(i, j)) * Rt(i, j);
  return hermitian_part(J.to_lab(Bt));
}

// Same B from the double sum with weights tanh(-beta(nu1-nu2)/4)/(2i) alpha.
inline Mat coherent_term_double_sum(const JumpSet& J, const AlphaMatrix& a, double beta) {
  const Eigen::Index d = J.dim();
  Mat B = Mat::Zero(d, d);
  for (const auto& comps : J.components)
    for (int n1 = 0; n1 < a.size(); ++n1) {
      if (comps[n1].norm() == 0.0) continue;
      for (int n2 = 0; n2 < a.size(); ++n2) {
        if (comps[n2].norm() == 0.0) continue;
        const cplx f = std::tanh(-0.25 * beta * (a.nu[n1] - a.nu[n2])) / (2.0 * I_unit) * a(n1, n2);
        B += f * comps[n2].adjoint() * comps[n1];
      }
    }
  return B;
}

inline Mat commutator_super(const Mat& B) { return left_mult(B) - right_mult(B); }
inline Mat anticommutator_super(const Mat& R) { return left_mult(R) + right_mult(R); }

inline Superoperator lindblad_from_parts(const Superoperator& T, const Mat& R, const Mat& B) {
  return {-I_unit * commutator_super(B) + T.M - 0.5 * anticommutator_super(R), T.d};
}

inline double trace_annihilation_residual(const Superoperator& L) {
  const Eigen::Index d = L.d;
  double r = 0.0;
  for (Eigen::Index c = 0; c < L.M.cols(); ++c) {
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) acc += L.M(i * d + i, c);
    r = std::max(r, std::abs(acc));
  }
  return r;
}

inline Mat channel_exp(const Superoperator& L, double t) {
  Mat E = (L.M * t).exp();
  if (!E.allFinite()) throw NumericError("matrix exponential produced non-finite entries");
  return E;
}

// Most negative Choi eigenvalue over t in {0.1, 1}, clipped at 0.
inline double cptp_violation(const Superoperator& L) {
  double worst = 0.0;
  for (double t : {0.1, 1.0}) {
    const Mat C = choi_matrix(channel_exp(L, t), L.d);
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(C), Eigen::EigenvaluesOnly);
    worst = std::max(worst, -es.eigenvalues().minCoeff());
  }
  return worst;
}

struct AssembleOptions {
  bool zero_coherent = false;
  bool verify = true;
  double trace_tol = 1e-10;
  double choi_tol = 1e-8;
};

inline LindbladParts assemble(const JumpSet& J, const AlphaMatrix& a, double beta, const AssembleOptions& opt = {}) {
  LindbladParts p;
  p.T = transition_part(J, a);
  p.R = decay_operator(J, a);
  p.B = opt.zero_coherent ? Mat::Zero(J.dim(), J.dim()) : coherent_term(J, a, beta);
  p.L = lindblad_from_parts(p.T, p.R, p.B);
  if (opt.verify) {
    const double tr = trace_annihilation_residual(p.L);
    if (tr > opt.trace_tol) {
      std::ostringstream os;
      os << "assembled generator is not trace-annihilating (residual " << tr << ")";
      throw InternalError(os.str());
    }
    const double cp = cptp_violation(p.L);
    if (cp > opt.choi_tol) {
      std::ostringstream os;
      os << "exp(Lt) has a Choi eigenvalue of " << -cp << "; check alpha positivity";
      throw InternalError(os.str());
    }
  }
  return p;
}

// ----- detailed-balance residuals -----

inline Mat conjugation_super(const StatePowers& rho, double left, double right) {
  return kron(rho.pow(left), rho.pow(right).transpose());
}

// (rho^{-1/4} (x) rho^{-1/4 T}) M (rho^{1/4} (x) rho^{1/4 T})
inline Mat discriminant_matrix(const Superoperator& L, const StatePowers& rho) {
  return conjugation_super(rho, -0.25, -0.25) * L.M * conjugation_super(rho, 0.25, 0.25);
}

inline double kms_db_residual(const Superoperator& L, const StatePowers& rho) {
  const Mat D = discriminant_matrix(L, rho);
  const double n = D.norm();
  return n == 0.0 ? 0.0 : (D - D.adjoint()).norm() / n;
}

inline double s_db_residual(const Superoperator& L, const StatePowers& rho, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InputError("s must lie in [0, 1]");
  const Mat X = conjugation_super(rho, s - 1.0, -s) * L.M * conjugation_super(rho, 1.0 - s, s);
  const double n = op_norm(L.M);
  return n == 0.0 ? 0.0 : op_norm(L.M.adjoint() - X) / n;
}

inline double q_residual(const Mat& B, const Mat& R, const StatePowers& rho) {
  const Mat K = B - 0.5 * I_unit * R;
  const Mat Q = K.adjoint() + rho.pow(-0.5) * K * rho.pow(0.5);
  const Eigen::Index d = Q.rows();
  return (Q - (Q.trace() / double(d)) * Mat::Identity(d, d)).norm();
}

inline double stationarity_residual(const Superoperator& L, const Mat& rho) { return L.apply(rho).norm(); }

// ----- dynamics -----

// Eigenvalues sorted by decreasing real part.
inline std::vector<cplx> spectrum(const Superoperator& L) {
  Eigen::ComplexEigenSolver<Mat> es(L.M, false);
  if (es.info() != Eigen::Success) throw NumericError("Lindbladian eigensolver failed");
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::stable_sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  return ev;
}

// exp(Lt) either through the Hermitian discriminant (exact detailed balance)
// or by scaling-and-squaring.
class Propagator {
 public:
  explicit Propagator(const Superoperator& L) : L_(L) {}

  Propagator(const Superoperator& L, const StatePowers& rho, double db_tol = 1e-9) : L_(L) {
    if (kms_db_residual(L, rho) > db_tol) return;
    Splus_ = conjugation_super(rho, 0.25, 0.25);
    Sminus_ = conjugation_super(rho, -0.25, -0.25);
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(Sminus_ * L.M * Splus_));
    if (es.info() != Eigen::Success) return;
    V_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
    spectral_ = true;
  }

  bool spectral() const { return spectral_; }

  Mat channel(double t) const {
    if (t < 0) throw InputError("evolution time must be nonnegative");
    if (!spectral_) return channel_exp(L_, t);
    const Vec e = (lambda_ * t).array().exp().cast<cplx>().matrix();
    Mat E = Splus_ * V_ * e.asDiagonal() * V_.adjoint() * Sminus_;
    if (!E.allFinite()) throw NumericError("spectral propagator produced non-finite entries");
    return E;
  }

  Mat evolve(const Mat& rho0, double t) const { return unvec(channel(t) * vec(rho0), L_.d); }

 private:
  Superoperator L_;
  bool spectral_ = false;
  Mat Splus_, Sminus_, V_;
  RVec lambda_;
};

inline Mat evolve(const Superoperator& L, const Mat& rho0, double t) { return Propagator(L).evolve(rho0, t); }

struct MixingResult {
  double gap = 0.0;
  double t_mix_bound = 0.0;
  double t_mix_empirical = 0.0;
  bool ergodic = false;
};

inline Mat random_pure_state(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec psi(d);
  for (Eigen::Index i = 0; i < d; ++i) psi(i) = cplx(n01(rng), n01(rng));
  psi.normalize();
  return psi * psi.adjoint();
}

inline double spectral_gap(const std::vector<cplx>& ev) {
  if (ev.size() < 2) return 0.0;
  return -ev[1].real();
}

// Gap from the spectrum of L; empirical halving time from sampled pure-state
// pairs, bracketed on a doubling grid and refined by bisection.
inline MixingResult gap_and_mixing(const Superoperator& L, const StatePowers& rho, std::uint64_t seed,
                                   int pairs = 20, double ergodic_tol = 1e-8) {
  MixingResult r;
  r.gap = spectral_gap(spectrum(L));
  r.ergodic = r.gap > ergodic_tol;
  const double rho_inv_sqrt = 1.0 / std::sqrt(rho.min_eigenvalue());
  if (!r.ergodic) {
    r.t_mix_bound = std::numeric_limits<double>::infinity();
    r.t_mix_empirical = std::numeric_limits<double>::infinity();
    return r;
  }
  r.t_mix_bound = std::log(2.0 * rho_inv_sqrt) / r.gap;

  std::mt19937_64 rng(seed);
  std::vector<Mat> diffs;
  for (int p = 0; p < pairs; ++p) {
    const Mat a = random_pure_state(L.d, rng);
    const Mat b = random_pure_state(L.d, rng);
    diffs.push_back(a - b);
  }
  const Propagator prop(L, rho);
  auto halved = [&](double t) {
    const Mat E = prop.channel(t);
    for (const auto& X : diffs) {
      const double n0 = trace_norm_hermitian(X);
      if (trace_norm_hermitian(unvec(E * vec(X), L.d)) > 0.5 * n0) return false;
    }
    return true;
  };
  double hi = 1e-3 / r.gap;
  int guard = 0;
  while (!halved(hi)) {
    hi *= 2.0;
    if (++guard > 80) throw NumericError("empirical mixing time search did not terminate");
  }
  double lo = guard == 0 ? 0.0 : 0.5 * hi;
  for (int it = 0; it < 50 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (halved(mid) ? hi : lo) = mid;
  }
  r.t_mix_empirical = hi;
  return r;
}

}  // namespace gibbslb
