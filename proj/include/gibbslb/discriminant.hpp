#pragma once

#include "gibbslb/errors.hpp"
#include "gibbslb/lindbladian.hpp"
#include "gibbslb/linalg.hpp"
#include "gibbslb/spectral.hpp"
#include "gibbslb/weights.hpp"

#include <algorithm>
#include <vector>

namespace gibbslb {

struct ParentHamiltonian {
  Mat Hvec;
  std::vector<Mat> perJump;
  Mat N;
  RMat h;  // e^{beta(nu1+nu2)/4} alpha
  double hermiticity_defect = 0.0;  // ||H - H^dag|| / (1 + ||H||) before symmetrization
};

inline Mat discriminant_by_conjugation(const Superoperator& L, const StatePowers& rho) {
  return discriminant_matrix(L, rho);
}

inline RMat h_coefficients(const AlphaMatrix& a, double beta) {
  const int K = a.size();
  RMat h(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) h(i, j) = std::exp(0.25 * beta * (a.nu[i] + a.nu[j])) * a(i, j);
  return h;
}

// Per jump, in the eigenbasis:
//   transition: sum h(nu_ik, nu_jl) At_ik conj(At_jl)
//   N_jl = -sum_k alpha(nu_kl, nu_kj) / cosh(beta(nu_kl - nu_kj)/4) conj(At_kj) At_kl
inline ParentHamiltonian parent_closed_form(const JumpSet& J, const AlphaMatrix& a, double beta) {
  check_alpha_indexing(J, a);
  ParentHamiltonian P;
  P.h = h_coefficients(a, beta);
  const Eigen::Index d = J.dim();
  const Mat W = eigen_to_lab_super(J);
  const Mat Id = Mat::Identity(d, d);
  P.N = Mat::Zero(d, d);
  P.Hvec = Mat::Zero(d * d, d * d);
  Mat raw = Mat::Zero(d * d, d * d);
  for (const auto& At : J.eigen_ops) {
    Mat Ht = Mat::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index k = 0; k < d; ++k) {
        if (At(i, k) == 0.0) continue;
        for (Eigen::Index j = 0; j < d; ++j)
          for (Eigen::Index l = 0; l < d; ++l)
            Ht(i * d + j, k * d + l) += P.h(J.nu_index(i, k), J.nu_index(j, l)) * At(i, k) * std::conj(At(j, l));
      }
    Mat Nt = Mat::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index l = 0; l < d; ++l)
        for (Eigen::Index k = 0; k < d; ++k) {
          const double n1 = J.nu(k, l), n2 = J.nu(k, j);
          Nt(j, l) -= a(J.nu_index(k, l), J.nu_index(k, j)) / std::cosh(0.25 * beta * (n1 - n2)) *
                      std::conj(At(k, j)) * At(k, l);
        }
    const Mat Na = hermitian_part(J.to_lab(Nt));
    const Mat Nraw = J.to_lab(Nt);
    Mat Ha = W * Ht * W.adjoint() + 0.5 * (kron(Nraw, Id) + kron(Id, Nraw.conjugate()));
    raw += Ha;
    Ha = hermitian_part(Ha);
    P.N += Na;
    P.Hvec += Ha;
    P.perJump.push_back(std::move(Ha));
  }
  P.hermiticity_defect = (raw - raw.adjoint()).norm() / (1.0 + raw.norm());
  return P;
}

struct ParentGap {
  double lambda1 = 0.0;
  double gap = 0.0;
  double overlap = 0.0;  // |<sqrt rho|v1>|, when a purified state is given
  bool degenerate = false;
  RVec eigenvalues;      // descending
};

inline ParentGap parent_gap(const Mat& Hvec, const Vec* purified = nullptr, double degeneracy_tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(Hvec));
  if (es.info() != Eigen::Success) throw NumericError("parent Hamiltonian eigensolver failed");
  const Eigen::Index n = es.eigenvalues().size();
  ParentGap g;
  g.eigenvalues = es.eigenvalues().reverse();
  g.lambda1 = g.eigenvalues(0);
  g.gap = n > 1 ? g.eigenvalues(0) - g.eigenvalues(1) : 0.0;
  g.degenerate = g.gap < degeneracy_tol;
  if (purified) g.overlap = std::abs(purified->dot(es.eigenvectors().col(n - 1)));
  return g;
}

inline ParentGap parent_gap(const ParentHamiltonian& P, const Vec* purified = nullptr) {
  return parent_gap(P.Hvec, purified);
}

// Largest scale-aware annihilation residual ||H^a sqrt(rho)|| / (1 + ||H^a||),
// with each label grouped with its adjoint partner.
inline double frustration_residual(const ParentHamiltonian& P, const JumpSet& J, const Vec& purified) {
  double worst = 0.0;
  for (std::size_t a = 0; a < J.size(); ++a) {
    const std::size_t b = static_cast<std::size_t>(J.adjoint[a]);
    if (b < a) continue;
    Mat Hg = P.perJump[a];
    if (b != a) Hg += P.perJump[b];
    worst = std::max(worst, (Hg * purified).norm() / (1.0 + hermitian_op_norm(Hg)));
  }
  return worst;
}

}  // namespace gibbslb
