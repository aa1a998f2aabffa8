#pragma once

#include "gibbslb/errors.hpp"
#include "gibbslb/linalg.hpp"

#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace gibbslb {

// ----- Hamiltonian input -----

struct PauliTerm {
  double coefficient = 0.0;
  std::string word;
};

inline Mat pauli(char c) {
  Mat P(2, 2);
  switch (c) {
    case 'I': P << 1, 0, 0, 1; break;
    case 'X': P << 0, 1, 1, 0; break;
    case 'Y': P << 0, -I_unit, I_unit, 0; break;
    case 'Z': P << 1, 0, 0, -1; break;
    default: throw InputError(std::string("invalid Pauli letter '") + c + "'");
  }
  return P;
}

// Character 0 is the leftmost tensor factor (most significant bit).
inline Mat pauli_word(const std::string& word) {
  Mat M = Mat::Identity(1, 1);
  for (char c : word) M = kron(M, pauli(c));
  return M;
}

inline constexpr int kMaxQubits = 12;

inline Mat build_hamiltonian(const std::vector<PauliTerm>& terms, int n) {
  if (n < 0) throw InputError("qubit count must be nonnegative");
  if (n > kMaxQubits)
    throw ResourceError("n = " + std::to_string(n) + " exceeds the dense limit of " +
                        std::to_string(kMaxQubits) + " qubits");
  const Eigen::Index d = Eigen::Index(1) << n;
  Mat H = Mat::Zero(d, d);
  for (const auto& t : terms) {
    if (static_cast<int>(t.word.size()) != n)
      throw InputError("Pauli word '" + t.word + "' has length " + std::to_string(t.word.size()) +
                       ", expected " + std::to_string(n));
    if (!std::isfinite(t.coefficient)) throw InputError("non-finite coefficient for '" + t.word + "'");
    H += t.coefficient * pauli_word(t.word);
  }
  return H;
}

// ----- eigendecomposition -----

struct SpinSystem {
  int n = 0;
  Mat H;
  RVec energies;                              // ascending
  Mat eigenvectors;                           // columns psi_i
  std::vector<std::vector<int>> clusters;     // index sets, ascending energy
  std::vector<int> cluster_of;                // eigen index -> cluster
  RVec cluster_energy;                        // cluster means
  double eps_deg = 0.0;
  double norm = 0.0;                          // spectral norm of H

  Eigen::Index dim() const { return H.rows(); }
  double spread() const { return energies.size() ? energies(energies.size() - 1) - energies(0) : 0.0; }
};

inline SpinSystem decompose(const Mat& H, double eps_deg = -1.0) {
  if (H.rows() != H.cols() || H.rows() == 0) throw InputError("Hamiltonian must be square and nonempty");
  const Eigen::Index d = H.rows();
  if ((d & (d - 1)) != 0) throw InputError("Hamiltonian dimension must be a power of two");
  const double hn = H.norm();
  if ((H - H.adjoint()).norm() > 1e-12 * hn) throw InputError("Hamiltonian is not Hermitian");

  SpinSystem s;
  s.n = 0;
  while ((Eigen::Index(1) << s.n) < d) ++s.n;
  s.H = hermitian_part(H);
  Eigen::SelfAdjointEigenSolver<Mat> es(s.H);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  s.energies = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  s.norm = s.energies.cwiseAbs().maxCoeff();
  s.eps_deg = eps_deg > 0 ? eps_deg : 1e-9 * std::max(1.0, s.norm);

  // Largest-magnitude entry of each eigenvector made real positive.
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::Index imax = 0;
    s.eigenvectors.col(k).cwiseAbs().maxCoeff(&imax);
    const cplx z = s.eigenvectors(imax, k);
    s.eigenvectors.col(k) *= std::conj(z) / std::abs(z);
  }

  // Single-linkage clustering on the sorted spectrum.
  s.cluster_of.assign(d, 0);
  s.clusters.push_back({0});
  for (Eigen::Index k = 1; k < d; ++k) {
    if (s.energies(k) - s.energies(k - 1) > s.eps_deg) s.clusters.emplace_back();
    s.clusters.back().push_back(static_cast<int>(k));
    s.cluster_of[k] = static_cast<int>(s.clusters.size()) - 1;
  }
  s.cluster_energy.resize(s.clusters.size());
  for (std::size_t c = 0; c < s.clusters.size(); ++c) {
    double acc = 0.0;
    for (int k : s.clusters[c]) acc += s.energies(k);
    s.cluster_energy(c) = acc / s.clusters[c].size();
  }
  return s;
}

inline Mat cluster_projector(const SpinSystem& s, std::size_t c) {
  Mat P = Mat::Zero(s.dim(), s.dim());
  for (int k : s.clusters.at(c)) P += s.eigenvectors.col(k) * s.eigenvectors.col(k).adjoint();
  return P;
}

// ----- Bohr frequencies -----

struct BohrSet {
  std::vector<double> frequencies;  // ascending, exactly negation-symmetric
  Eigen::MatrixXi pairIndex;        // (cluster_i, cluster_j) -> index of E_i - E_j
  std::vector<int> negation;        // index of -nu
  int zero = 0;                     // index of nu = 0
  double tolerance = 0.0;

  int size() const { return static_cast<int>(frequencies.size()); }
  double nu_max() const { return frequencies.empty() ? 0.0 : frequencies.back(); }
};

inline BohrSet bohr_set(const SpinSystem& sys, double eps_bohr = -1.0) {
  BohrSet b;
  b.tolerance = eps_bohr > 0 ? eps_bohr : 2.0 * sys.eps_deg;
  const int C = static_cast<int>(sys.clusters.size());

  struct Diff {
    double value;
    int i, j;
  };
  std::vector<Diff> diffs;
  diffs.reserve(static_cast<std::size_t>(C) * C);
  for (int i = 0; i < C; ++i)
    for (int j = 0; j < C; ++j) diffs.push_back({sys.cluster_energy(i) - sys.cluster_energy(j), i, j});
  std::stable_sort(diffs.begin(), diffs.end(), [](const Diff& a, const Diff& b) { return a.value < b.value; });

  // a - b == -(b - a) exactly in IEEE arithmetic, so the sorted list and its
  // gaps are mirror images and the merged groups come out symmetric.
  std::vector<std::vector<std::size_t>> groups{{0}};
  for (std::size_t k = 1; k < diffs.size(); ++k) {
    if (diffs[k].value - diffs[k - 1].value > b.tolerance) groups.emplace_back();
    groups.back().push_back(k);
  }
  const int K = static_cast<int>(groups.size());
  std::vector<double> means(K);
  for (int g = 0; g < K; ++g) {
    double acc = 0.0;
    for (auto k : groups[g]) acc += diffs[k].value;
    means[g] = acc / groups[g].size();
  }
  b.frequencies.resize(K);
  for (int g = 0; g < K; ++g) b.frequencies[g] = 0.5 * (means[g] - means[K - 1 - g]);
  b.pairIndex.resize(C, C);
  for (int g = 0; g < K; ++g)
    for (auto k : groups[g]) b.pairIndex(diffs[k].i, diffs[k].j) = g;
  b.negation.resize(K);
  for (int g = 0; g < K; ++g) b.negation[g] = K - 1 - g;
  b.zero = K / 2;
  for (int i = 0; i < C; ++i)
    for (int j = 0; j < C; ++j)
      if (b.pairIndex(i, j) != b.negation[b.pairIndex(j, i)] || (i == j && b.pairIndex(i, j) != b.zero))
        throw InternalError("Bohr set lost negation symmetry");
  return b;
}

// ----- jump operators -----

struct Jump {
  std::string label;
  Mat op;
};

struct JumpSet {
  std::vector<std::string> labels;
  std::vector<Mat> operators;                // lab basis, rescaled
  std::vector<Mat> eigen_ops;                // U^dag A U
  std::vector<std::vector<Mat>> components;  // [a][nu] lab basis
  std::vector<int> adjoint;                  // a -> index of A^a dagger
  double s_norm = 1.0;

  // Copied from the system so that downstream builders are self-contained.
  Mat U;
  RVec energies;
  Eigen::MatrixXi nu_index;                  // eigen index pair -> Bohr index
  std::vector<double> frequencies;
  std::vector<int> negation;

  std::size_t size() const { return operators.size(); }
  Eigen::Index dim() const { return U.rows(); }
  double nu(Eigen::Index i, Eigen::Index j) const { return frequencies[nu_index(i, j)]; }

  Mat to_lab(const Mat& X) const { return U * X * U.adjoint(); }
  Mat to_eigen(const Mat& X) const { return U.adjoint() * X * U; }
};

inline JumpSet jump_components(const SpinSystem& sys, const BohrSet& bohr, const std::vector<Jump>& jumps) {
  JumpSet J;
  const Eigen::Index d = sys.dim();
  J.U = sys.eigenvectors;
  J.energies = sys.energies;
  J.frequencies = bohr.frequencies;
  J.negation = bohr.negation;
  J.nu_index.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) J.nu_index(i, j) = bohr.pairIndex(sys.cluster_of[i], sys.cluster_of[j]);

  for (const auto& jp : jumps) {
    if (jp.op.rows() != d || jp.op.cols() != d)
      throw InputError("jump '" + jp.label + "' has dimension " + std::to_string(jp.op.rows()) + ", expected " +
                       std::to_string(d));
    J.labels.push_back(jp.label);
    J.operators.push_back(jp.op);
  }

  // Adjoint closure: every A^a dagger must be present.
  J.adjoint.assign(J.size(), -1);
  for (std::size_t a = 0; a < J.size(); ++a) {
    const Mat Ad = J.operators[a].adjoint();
    const double tol = 1e-10 * std::max(1.0, Ad.norm());
    for (std::size_t b = 0; b < J.size(); ++b) {
      if ((J.operators[b] - Ad).norm() <= tol) {
        J.adjoint[a] = static_cast<int>(b);
        break;
      }
    }
    if (J.adjoint[a] < 0)
      throw InputError("jump set is not adjoint-closed: no partner for the adjoint of '" + J.labels[a] + "'");
  }

  Mat S = Mat::Zero(d, d);
  for (const auto& A : J.operators) S += A.adjoint() * A;
  J.s_norm = std::max(1.0, std::sqrt(hermitian_op_norm(hermitian_part(S))));
  for (auto& A : J.operators) A /= J.s_norm;

  const int K = bohr.size();
  for (const auto& A : J.operators) {
    Mat At = J.to_eigen(A);
    J.eigen_ops.push_back(At);
    std::vector<Mat> comps(K, Mat::Zero(d, d));
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) comps[J.nu_index(i, j)](i, j) = At(i, j);
    for (auto& C : comps) C = J.to_lab(C);
    J.components.push_back(std::move(comps));
  }
  return J;
}

// ----- thermal states -----

inline RVec gibbs_weights(const SpinSystem& sys, double beta) {
  if (!(beta >= 0.0)) throw InputError("beta must be nonnegative");
  const double e0 = sys.energies(0);
  RVec w = (-beta * (sys.energies.array() - e0)).exp().matrix();
  return w / w.sum();
}

inline Mat gibbs_state(const SpinSystem& sys, double beta) {
  const RVec w = gibbs_weights(sys, beta);
  return sys.eigenvectors * w.cast<cplx>().asDiagonal() * sys.eigenvectors.adjoint();
}

// sum_i sqrt(w_i) |psi_i> (x) |psi_i^*> = vec(sqrt(rho)).
inline Vec purified_gibbs(const SpinSystem& sys, double beta) {
  const RVec w = gibbs_weights(sys, beta);
  const Mat root = sys.eigenvectors * w.cwiseSqrt().cast<cplx>().asDiagonal() * sys.eigenvectors.adjoint();
  Vec v = vec(root);
  return v / v.norm();
}

inline Mat partial_trace_second(const Mat& rho_big, Eigen::Index d) {
  Mat r = Mat::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k) r(i, j) += rho_big(i * d + k, j * d + k);
  return r;
}

// Fractional powers rho^p of a full-rank density matrix. Built either from
// the Hamiltonian spectrum (Gibbs state, shifted so min E = 0) or from the
// eigendecomposition of an explicit density matrix.
class StatePowers {
 public:
  static StatePowers gibbs(const SpinSystem& sys, double beta) {
    StatePowers p;
    p.U_ = sys.eigenvectors;
    const double e0 = sys.energies(0);
    RVec x = -beta * (sys.energies.array() - e0).matrix();
    const double logz = std::log(x.array().exp().sum());
    p.logw_ = (x.array() - logz).matrix();
    p.gibbs_ = true;
    p.beta_spread_ = beta * sys.spread();
    return p;
  }

  static StatePowers density(const Mat& rho) {
    StatePowers p;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(rho));
    if (es.eigenvalues().minCoeff() < -1e-10) throw InputError("density matrix is not positive semidefinite");
    if (std::abs(rho.trace() - 1.0) > 1e-10) throw InputError("density matrix trace differs from 1");
    p.U_ = es.eigenvectors();
    p.logw_ = es.eigenvalues().cwiseMax(0.0).array().log().matrix();
    p.min_eig_ = es.eigenvalues().minCoeff();
    return p;
  }

  Mat pow(double e) const {
    if (e < 0.0) guard();
    RVec w = (e * logw_.array()).exp().matrix();
    return U_ * w.cast<cplx>().asDiagonal() * U_.adjoint();
  }
  Mat rho() const { return pow(1.0); }
  double min_eigenvalue() const { return std::exp(logw_.minCoeff()); }
  Eigen::Index dim() const { return U_.rows(); }

 private:
  void guard() const {
    if (gibbs_ && beta_spread_ > 60.0) {
      std::ostringstream os;
      os << "beta*(Emax-Emin) = " << beta_spread_ << " exceeds 60; negative powers of rho are not representable";
      throw ConditioningError(os.str());
    }
    if (!gibbs_ && min_eig_ <= 1e-14)
      throw InputError("density matrix is singular within 1e-14; use a smaller beta or a full-rank state");
  }

  Mat U_;
  RVec logw_;
  bool gibbs_ = false;
  double beta_spread_ = 0.0;
  double min_eig_ = 1.0;
};

}  // namespace gibbslb
