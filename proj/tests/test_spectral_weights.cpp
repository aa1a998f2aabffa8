#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace gibbslb;
using namespace gibbslb::testing;

namespace {

Mat diag2(double a, double b) {
  Mat M = Mat::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier:
// det(lambda I - H) = sum_k c[k] lambda^k.
std::vector<cplx> char_poly(const Mat& H) {
  const Eigen::Index n = H.rows();
  std::vector<cplx> c(n + 1);
  c[n] = 1.0;
  Mat M = Mat::Zero(n, n);
  const Mat I = Mat::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    M = H * M + c[n - k + 1] * I;
    c[n - k] = -(H * M).trace() / double(k);
  }
  return c;
}

cplx poly_eval(const std::vector<cplx>& c, double x) {
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

TEST(BuildHamiltonian, SinglePauliZ) {
  EXPECT_LT((build_hamiltonian({{1.0, "Z"}}, 1) - diag2(1, -1)).norm(), 1e-15);
}

TEST(BuildHamiltonian, Linearity) {
  const Mat H = build_hamiltonian({{0.5, "XX"}, {0.5, "ZI"}}, 2);
  const Mat ref = 0.5 * kron(pauli('X'), pauli('X')) + 0.5 * kron(pauli('Z'), pauli('I'));
  EXPECT_LT((H - ref).norm(), 1e-15);
}

TEST(BuildHamiltonian, EmptySumIsZero) {
  const Mat H = build_hamiltonian({}, 1);
  EXPECT_EQ(H.rows(), 2);
  EXPECT_EQ(H.norm(), 0.0);
}

TEST(BuildHamiltonian, RejectsBadInput) {
  EXPECT_THROW(build_hamiltonian({{1.0, "ZZ"}}, 1), InputError);
  EXPECT_THROW(build_hamiltonian({{1.0, "Q"}}, 1), InputError);
  EXPECT_THROW(build_hamiltonian({{NAN, "Z"}}, 1), InputError);
  EXPECT_THROW(build_hamiltonian({}, kMaxQubits + 1), ResourceError);
}

TEST(Decompose, PauliZ) {
  const SpinSystem s = decompose(pauli('Z'));
  EXPECT_NEAR(s.energies(0), -1.0, 1e-15);
  EXPECT_NEAR(s.energies(1), 1.0, 1e-15);
  EXPECT_EQ(s.clusters.size(), 2u);
}

TEST(Decompose, IdentityIsOneCluster) {
  const SpinSystem s = decompose(Mat::Identity(2, 2));
  EXPECT_NEAR(s.energies(0), 1.0, 1e-15);
  EXPECT_NEAR(s.energies(1), 1.0, 1e-15);
  EXPECT_EQ(s.clusters.size(), 1u);
}

TEST(Decompose, MatchesCharacteristicPolynomialRoots) {
  const Mat H = build_hamiltonian({{0.5, "XX"}, {0.5, "ZI"}}, 2);
  const SpinSystem s = decompose(H);
  const auto c = char_poly(H);
  for (Eigen::Index k = 0; k < 4; ++k) EXPECT_LT(std::abs(poly_eval(c, s.energies(k))), 1e-12);
  // XX and ZI anticommute, so H^2 = I/2 and the roots are +-1/sqrt2, each twice.
  for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(s.energies(k)), 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_EQ(s.clusters.size(), 2u);
}

TEST(Decompose, EigenvectorsDiagonalize) {
  const Mat H = random_hamiltonian(3, 11);
  const SpinSystem s = decompose(H);
  const Mat D = s.eigenvectors.adjoint() * H * s.eigenvectors;
  EXPECT_LT((D - Mat(s.energies.cast<cplx>().asDiagonal())).norm(), 1e-12);
}

TEST(Decompose, RejectsNonHermitian) {
  Mat A = Mat::Zero(2, 2);
  A(0, 1) = 1.0;
  EXPECT_THROW(decompose(A), InputError);
  EXPECT_THROW(decompose(Mat::Identity(3, 3)), InputError);
}

TEST(Bohr, PauliZ) {
  const BohrSet b = bohr_set(decompose(pauli('Z')));
  ASSERT_EQ(b.size(), 3);
  EXPECT_NEAR(b.frequencies[0], -2.0, 1e-15);
  EXPECT_EQ(b.frequencies[1], 0.0);
  EXPECT_NEAR(b.frequencies[2], 2.0, 1e-15);
  EXPECT_EQ(b.zero, 1);
}

TEST(Bohr, Identity) {
  const BohrSet b = bohr_set(decompose(Mat::Identity(2, 2)));
  ASSERT_EQ(b.size(), 1);
  EXPECT_EQ(b.frequencies[0], 0.0);
}

TEST(Bohr, ThreeQubitBruteForce) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SpinSystem s = decompose(random_hamiltonian(3, seed));
    const BohrSet b = bohr_set(s);
    EXPECT_LE(b.size(), 57);
    for (int k = 0; k < b.size(); ++k) EXPECT_EQ(b.frequencies[k], -b.frequencies[b.negation[k]]);
    EXPECT_EQ(b.frequencies[b.zero], 0.0);
    std::vector<double> diffs;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) diffs.push_back(s.energies(i) - s.energies(j));
    std::sort(diffs.begin(), diffs.end());
    int distinct = 1;
    for (std::size_t k = 1; k < diffs.size(); ++k)
      if (diffs[k] - diffs[k - 1] > b.tolerance) ++distinct;
    EXPECT_EQ(distinct, b.size());
    for (double x : diffs) {
      double best = 1e300;
      for (double f : b.frequencies) best = std::min(best, std::abs(f - x));
      EXPECT_LT(best, b.tolerance);
    }
  }
}

TEST(Components, ZX) {
  const SpinSystem s = decompose(pauli('Z'));
  const JumpSet J = jump_components(s, bohr_set(s), {{"X", pauli('X')}});
  Mat up = Mat::Zero(2, 2), down = Mat::Zero(2, 2);
  up(0, 1) = 1.0;
  down(1, 0) = 1.0;
  EXPECT_LT((J.components[0][2] - up).norm(), 1e-15);
  EXPECT_LT((J.components[0][0] - down).norm(), 1e-15);
  EXPECT_EQ(J.components[0][1].norm(), 0.0);
}

TEST(Components, CommutingJumpIsZeroFrequency) {
  const SpinSystem s = decompose(pauli('Z'));
  const JumpSet J = jump_components(s, bohr_set(s), {{"Z", pauli('Z')}});
  EXPECT_LT((J.components[0][1] - pauli('Z')).norm(), 1e-15);
  EXPECT_EQ(J.components[0][0].norm(), 0.0);
  EXPECT_EQ(J.components[0][2].norm(), 0.0);
}

TEST(Components, DegenerateHamiltonian) {
  const SpinSystem s = decompose(Mat::Identity(2, 2));
  const Mat A = pauli('X') + 0.3 * pauli('Z');
  const JumpSet J = jump_components(s, bohr_set(s), {{"A", A}});
  EXPECT_GT(J.s_norm, 1.0);
  EXPECT_LT((J.components[0][0] - A / J.s_norm).norm(), 1e-15);
}

TEST(Components, SumReconstructsOperator) {
  const SpinSystem s = decompose(random_hamiltonian(2, 5));
  const JumpSet J = jump_components(s, bohr_set(s), site_jumps(2, "XY"));
  EXPECT_DOUBLE_EQ(J.s_norm, 2.0);
  for (std::size_t a = 0; a < J.size(); ++a) {
    Mat sum = Mat::Zero(4, 4);
    for (const auto& C : J.components[a]) sum += C;
    EXPECT_LT((sum - J.operators[a]).norm(), 1e-13);
  }
}

TEST(Components, RequiresAdjointClosure) {
  const SpinSystem s = decompose(pauli('Z'));
  Mat lower = Mat::Zero(2, 2);
  lower(1, 0) = 1.0;
  EXPECT_THROW(jump_components(s, bohr_set(s), {{"Sm", lower}}), InputError);
  EXPECT_NO_THROW(jump_components(s, bohr_set(s), {{"Sm", lower}, {"Sp", lower.adjoint()}}));
}

TEST(Gibbs, InfiniteTemperature) {
  const SpinSystem s = decompose(random_hamiltonian(2, 3));
  EXPECT_LT((gibbs_state(s, 0.0) - 0.25 * Mat::Identity(4, 4)).norm(), 1e-14);
  const Vec v = purified_gibbs(s, 0.0);
  EXPECT_LT((v - vec(Mat::Identity(4, 4)) / 2.0).norm(), 1e-14);
}

TEST(Gibbs, PauliZ) {
  const Mat rho = gibbs_state(decompose(pauli('Z')), 1.0);
  const double z = std::exp(-1.0) + std::exp(1.0);
  EXPECT_LT((rho - diag2(std::exp(-1.0) / z, std::exp(1.0) / z)).norm(), 1e-15);
}

TEST(Gibbs, PartialTraceOfPurification) {
  const SpinSystem s = decompose(random_hamiltonian(2, 8));
  const Vec v = purified_gibbs(s, 1.3);
  EXPECT_LT((partial_trace_second(v * v.adjoint(), 4) - gibbs_state(s, 1.3)).norm(), 1e-10);
}

TEST(Gibbs, CommutesWithHamiltonian) {
  const SpinSystem s = decompose(random_hamiltonian(3, 4));
  const Mat rho = gibbs_state(s, 0.7);
  EXPECT_LT((rho * s.H - s.H * rho).norm(), 1e-13);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-14);
}

TEST(StatePowers, FractionalPowersCompose) {
  const SpinSystem s = decompose(random_hamiltonian(2, 9));
  const StatePowers p = StatePowers::gibbs(s, 2.0);
  EXPECT_LT((p.pow(0.25) * p.pow(-0.25) - Mat::Identity(4, 4)).norm(), 1e-12);
  EXPECT_LT((p.pow(0.5) * p.pow(0.5) - p.rho()).norm(), 1e-14);
}

TEST(StatePowers, ConditioningGuard) {
  const SpinSystem s = decompose(pauli('Z'));
  const StatePowers p = StatePowers::gibbs(s, 31.0);
  EXPECT_NO_THROW(p.pow(0.5));
  EXPECT_THROW(p.pow(-0.25), ConditioningError);
}

TEST(StatePowers, SingularDensity) {
  Mat rho = Mat::Zero(2, 2);
  rho(0, 0) = 1.0;
  const StatePowers p = StatePowers::density(rho);
  EXPECT_THROW(p.pow(-0.5), InputError);
}

// ----- weights -----

TEST(Weight, GaussianMaximumAtMinusOmegaGamma) {
  const WeightSpec w = standard_weight(WeightKind::Gaussian, 1.0);
  EXPECT_DOUBLE_EQ(w.sigma_gamma, 1.0);
  EXPECT_DOUBLE_EQ(eval_weight(w, -1.0), 1.0);
  EXPECT_LT(eval_weight(w, -0.9), 1.0);
}

TEST(Weight, MetropolisKink) {
  const WeightSpec w = metropolis_weight(1.0, 1.0);
  EXPECT_DOUBLE_EQ(eval_weight(w, -0.5), 1.0);
  EXPECT_DOUBLE_EQ(eval_weight(w, -3.0), 1.0);
  EXPECT_NEAR(eval_weight(w, 0.0), std::exp(-0.5), 1e-15);
}

TEST(Weight, FiniteSApproachesMetropolis) {
  const WeightSpec m = metropolis_weight(1.0, 1.0);
  const WeightSpec f = finite_s_weight(1.0, 1.0, 50.0);
  for (double om : {-3.0, -1.0, -0.5, 0.0, 0.7, 2.0}) EXPECT_NEAR(eval_weight(f, om), eval_weight(m, om), 1e-6);
}

TEST(Weight, FiniteSMatchesDefiningIntegral) {
  // g(x) = 1/(sqrt(2 pi) sigma_gamma(x)) on [beta sigma^2/2, beta sigma^2/2 + s^2/beta],
  // integrated with x = x0 + u^2 to remove the endpoint singularity.
  const double beta = 1.3, se = 0.8, s = 3.0;
  const WeightSpec f = finite_s_weight(beta, se, s);
  const double x0 = 0.5 * beta * se * se, u1 = s / std::sqrt(beta);
  for (double om : {-2.0, -0.4, 0.0, 1.5}) {
    auto g = [&](double u) {
      return 2.0 / (std::sqrt(2.0 * kPi) * std::sqrt(2.0 / beta)) * gaussian_family_x(f, x0 + u * u, om);
    };
    auto integrand = [&](double u) { return u == 0.0 ? 0.0 : g(u); };
    std::vector<double> edges;
    for (int k = 0; k <= 200; ++k) edges.push_back(u1 * k / 200.0);
    EXPECT_NEAR(composite_gl(integrand, edges, 32), eval_weight(f, om), 1e-9) << "omega = " << om;
  }
}

TEST(Weight, GlauberSmoothBounded) {
  const WeightSpec w = glauber_smooth_weight(2.0, 0.5);
  for (double om = -5; om <= 5; om += 0.25) {
    const double v = eval_weight(w, om);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Weight, ValidateGaussianConstraint) {
  WeightSpec w = gaussian_weight(1.0, 1.0, 1.0);
  w.sigma_gamma = 2.0;
  EXPECT_THROW(validate(w), InputError);
  EXPECT_THROW(validate(gaussian_weight(1.0, 2.0, 1.0)), InputError);
  EXPECT_THROW(standard_weight(WeightKind::Gaussian, 0.0), InputError);
  EXPECT_NO_THROW(validate(gaussian_weight_infinite_temperature(1.0, 1.0)));
}

TEST(Alpha, ClosedFormAtOrigin) {
  EXPECT_NEAR(alpha_closed_form(0, 0, 1, 1, 1), std::exp(-0.25) / (2.0 * std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(alpha_closed_form(0, 0, 1, 1, 1), 0.275348, 1e-6);
}

TEST(Alpha, SwapSymmetry) {
  for (double nu : {0.3, 1.0, 2.5}) EXPECT_DOUBLE_EQ(alpha_closed_form(nu, -nu, 0.7, 1.1, 0.9),
                                                     alpha_closed_form(-nu, nu, 0.7, 1.1, 0.9));
}

TEST(Alpha, ClosedFormMatchesQuadrature) {
  const WeightSpec w = gaussian_weight(1.0, 1.0, 1.0);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const double n1 = -3.0 + i, n2 = -3.0 + j;
      EXPECT_NEAR(alpha_quadrature(n1, n2, w), alpha_closed_form(n1, n2, 1, 1, 1), 1e-8);
    }
}

TEST(Alpha, ZeroWeightGivesZero) {
  WeightSpec w = general_g_weight(1.0, 1.0, {0.5, 0.1, std::vector<double>(20, 0.0)});
  EXPECT_EQ(alpha_general_g(0.3, -0.2, w), 0.0);
}

TEST(Alpha, MetropolisProductForm) {
  const WeightSpec w = metropolis_weight(1.0, 1.0);
  const double q = alpha_quadrature(0, 0, w);
  EXPECT_GT(q, 0.0);
  EXPECT_LT(q, 1.0);
  EXPECT_NEAR(q, alpha_metropolis_product(0, 0, 1.0, 1.0), 1e-8);
  for (double n1 : {-2.0, 0.5, 1.7})
    for (double n2 : {-1.0, 0.0, 2.2}) EXPECT_NEAR(alpha_quadrature(n1, n2, w), alpha_metropolis_product(n1, n2, 1.0, 1.0), 1e-8);
}

TEST(Alpha, GeneralGDeltaReproducesGaussian) {
  // A single trapezoid node at x = omega_gamma with unit weight / dx.
  const double beta = 1.0, se = 1.0, og = 1.0, dx = 1e-3;
  GTable g{0.5 * beta * se * se, dx, {}};
  const int k0 = static_cast<int>(std::llround((og - g.x0) / dx));
  g.values.assign(k0 + 3, 0.0);
  g.values[k0] = 1.0 / dx;
  const WeightSpec w = general_g_weight(beta, se, g);
  const double sg = std::sqrt(2.0 * og / beta - se * se);
  EXPECT_NEAR(alpha_general_g(0.4, -1.1, w), alpha_closed_form(0.4, -1.1, og, sg, se), 1e-12);
}

TEST(AlphaMatrix, PauliZCoolingFavored) {
  const WeightSpec w = standard_weight(WeightKind::Gaussian, 1.0);
  const AlphaMatrix a = alpha_matrix(bohr_set(decompose(pauli('Z'))), w);
  ASSERT_EQ(a.size(), 3);
  EXPECT_LT(a(2, 2), a(0, 0));
  EXPECT_NEAR(a(2, 2), alpha_closed_form(2, 2, 1, 1, 1), 1e-15);
  EXPECT_LT(check_skew_symmetry(a, 1.0), 1e-12);
}

TEST(AlphaMatrix, SingleFrequency) {
  const WeightSpec w = standard_weight(WeightKind::Gaussian, 1.0);
  const AlphaMatrix a = alpha_matrix(bohr_set(decompose(Mat::Identity(2, 2))), w);
  ASSERT_EQ(a.size(), 1);
  EXPECT_DOUBLE_EQ(a(0, 0), alpha_closed_form(0, 0, 1, 1, 1));
  EXPECT_EQ(check_skew_symmetry(a, 1.0), 0.0);
}

TEST(AlphaMatrix, WrongBetaBreaksSkewSymmetry) {
  const WeightSpec w = standard_weight(WeightKind::Gaussian, 1.0);
  const AlphaMatrix a = alpha_matrix(bohr_set(decompose(pauli('Z'))), w);
  EXPECT_GT(check_skew_symmetry(a, 1.1), 0.01);
}

TEST(AlphaMatrix, SkewSymmetryAcrossWeights) {
  const BohrSet b = bohr_set(decompose(random_hamiltonian(2, 21)));
  for (double beta : {0.5, 1.0, 2.0}) {
    EXPECT_LT(check_skew_symmetry(alpha_matrix(b, standard_weight(WeightKind::Gaussian, beta)), beta), 1e-12);
    EXPECT_LT(check_skew_symmetry(alpha_matrix(b, standard_weight(WeightKind::Metropolis, beta)), beta), 1e-8);
  }
  const WeightSpec g = gaussian_weight(0.8, 0.6, 1.4);
  EXPECT_LT(check_skew_symmetry(alpha_matrix(b, g), 2.0 * g.omega_gamma / (g.sigma_e * g.sigma_e + g.sigma_gamma * g.sigma_gamma)), 1e-12);
}

TEST(AlphaMatrix, PositiveSemidefinite) {
  const BohrSet b = bohr_set(decompose(random_hamiltonian(2, 22)));
  EXPECT_GE(check_psd(alpha_matrix(b, standard_weight(WeightKind::Gaussian, 1.0))), -1e-10);
  EXPECT_GE(check_psd(alpha_matrix(b, standard_weight(WeightKind::Metropolis, 1.0))), -1e-10);
  AlphaMatrix r;
  r.values = RMat::Zero(3, 3);
  RVec v(3);
  v << 1.0, -2.0, 0.5;
  r.values = v * v.transpose();
  EXPECT_GE(check_psd(r), -1e-15);
}

TEST(AlphaMatrix, RouteRestrictions) {
  const BohrSet b = bohr_set(decompose(pauli('Z')));
  EXPECT_THROW(alpha_matrix(b, metropolis_weight(1, 1), AlphaRoute::ClosedForm), InputError);
  EXPECT_THROW(alpha_matrix(b, standard_weight(WeightKind::Gaussian, 1), AlphaRoute::Product), InputError);
}
