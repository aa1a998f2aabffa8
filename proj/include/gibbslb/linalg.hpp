#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace gibbslb {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// ----- vectorization -----
// vec(|i><j|) = |i> (x) |j>, i.e. row-major stacking: v[i*d + j] = X(i, j).
// Under this map X -> A X B is the matrix kron(A, B^T).

inline Vec vec(const Mat& X) {
  const Eigen::Index d = X.rows();
  Vec v(d * X.cols());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) v(i * X.cols() + j) = X(i, j);
  return v;
}

inline Mat unvec(const Vec& v, Eigen::Index d) {
  Mat X(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = v(i * d + j);
  return X;
}

inline Mat kron(const Mat& A, const Mat& B) { return Eigen::kroneckerProduct(A, B).eval(); }

// Superoperator of X -> A X B.
inline Mat sandwich(const Mat& A, const Mat& B) { return kron(A, B.transpose()); }

inline Mat left_mult(const Mat& A) {
  return kron(A, Mat::Identity(A.rows(), A.rows()));
}

inline Mat right_mult(const Mat& B) {
  return kron(Mat::Identity(B.rows(), B.rows()), B.transpose());
}

// ----- norms -----

inline double op_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues()(0);
}

inline double hermitian_op_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double trace_norm_hermitian(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

inline Mat hermitian_part(const Mat& A) { return 0.5 * (A + A.adjoint()); }

// Choi matrix of the channel with superoperator Phi (row-major vec):
// C[(i,k),(j,l)] = Phi(|i><j|)_{kl}.
inline Mat choi_matrix(const Mat& Phi, Eigen::Index d) {
  Mat C(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) C(i * d + k, j * d + l) = Phi(k * d + l, i * d + j);
  return C;
}

// ----- threading -----

// Worker count: GIBBSLB_THREADS if set (>= 1), else hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("GIBBSLB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(i) for i in [0, n). Each index is written by exactly one worker, so
// results are independent of the thread count.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace gibbslb
