// Acceptance gate: one PASS/FAIL line per criterion.
#include "test_util.hpp"

#include "gibbslb/report.hpp"
#include "gibbslb/runner.hpp"
#include "gibbslb/timedomain.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace gibbslb;
using namespace gibbslb::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr int kSeeds = 10;
const double kBetas[] = {0.5, 1.0, 2.0};

Mat random_h2(int seed) { return random_hamiltonian(2, 1000 + seed); }

Outcome criterion_1() {
  Outcome o;
  const auto t0 = Clock::now();
  double kms = 0.0, stat = 0.0;
  for (int s = 0; s < kSeeds; ++s)
    for (double b : kBetas) {
      const Instance in = make_instance(random_h2(s), site_jumps(2, "XY"), WeightKind::Gaussian, b);
      kms = std::max(kms, kms_db_residual(in.L(), in.rho()));
      stat = std::max(stat, stationarity_residual(in.L(), in.rho().rho()));
    }
  const double t = seconds_since(t0);
  o.detail << "max kms_db=" << kms << " max stationarity=" << stat << " time=" << t << "s";
  o.require(kms < 1e-10, "kms_db");
  o.require(stat < 1e-10, "stationarity");
  o.require(t < 10.0, "runtime");
  return o;
}

Outcome criterion_2() {
  Outcome o;
  const auto t0 = Clock::now();
  double kms = 0.0;
  for (int s = 0; s < kSeeds; ++s)
    for (double b : kBetas) {
      const Instance in = make_instance(random_h2(s), site_jumps(2, "XY"), WeightKind::Metropolis, b);
      kms = std::max(kms, kms_db_residual(in.L(), in.rho()));
    }
  const double t = seconds_since(t0);
  o.detail << "max kms_db=" << kms << " time=" << t << "s";
  o.require(kms < 1e-8, "kms_db");
  o.require(t < 30.0, "runtime");
  return o;
}

Outcome criterion_3() {
  Outcome o;
  const WeightSpec w = standard_weight(WeightKind::Gaussian, 1.0);
  double diff = 0.0;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      const double n1 = -4.0 + i, n2 = -4.0 + j;
      diff = std::max(diff, std::abs(alpha_quadrature(n1, n2, w) -
                                     alpha_closed_form(n1, n2, w.omega_gamma, w.sigma_gamma, w.sigma_e)));
    }
  double skew = 0.0;
  for (int s = 0; s < kSeeds; ++s)
    for (double b : kBetas) {
      const BohrSet bs = bohr_set(decompose(random_h2(s)));
      skew = std::max(skew, check_skew_symmetry(alpha_matrix(bs, standard_weight(WeightKind::Gaussian, b)), b));
    }
  o.detail << "max |closed-quadrature|=" << diff << " max skew=" << skew;
  o.require(diff <= 1e-8, "closed form vs quadrature");
  o.require(skew < 1e-12, "skew symmetry");
  return o;
}

Outcome criterion_4() {
  Outcome o;
  AssembleOptions zero;
  zero.zero_coherent = true;
  const Mat H = random_h2(0);
  const Instance full = make_instance(H, site_jumps(2, "XY"), WeightKind::Gaussian, 1.0);
  const Instance cut = make_instance(H, site_jumps(2, "XY"), WeightKind::Gaussian, 1.0, zero);
  const double bnorm = op_norm(full.parts.B);
  const double kms = kms_db_residual(cut.L(), cut.rho());
  const Mat drift = cut.J.to_eigen(cut.L().apply(cut.rho().rho()));
  const double pop = drift.diagonal().norm();
  o.detail << "||B||=" << bnorm << " kms_db(B=0)=" << kms << " population drift=" << pop;
  o.require(bnorm > 1e-6, "B nonzero");
  o.require(kms > 1e-3, "kms_db with B zeroed");
  o.require(pop < 1e-10, "population stationarity");
  return o;
}

Outcome criterion_5() {
  Outcome o;
  double herm = 0.0, top = 0.0, ann = 0.0, spec = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    const Instance in = make_instance(random_h2(s), site_jumps(2, "XY"), WeightKind::Gaussian, 1.0);
    const ParentHamiltonian P = parent_closed_form(in.J, in.alpha, in.beta);
    const Vec v = purified_gibbs(in.sys, in.beta);
    herm = std::max(herm, P.hermiticity_defect);
    const ParentGap g = parent_gap(P);
    top = std::max(top, std::abs(g.lambda1));
    for (const auto& Ha : P.perJump) ann = std::max(ann, (Ha * v).norm());
    const auto ev = spectrum(in.L());
    for (std::size_t k = 0; k < ev.size(); ++k)
      spec = std::max(spec, std::abs(ev[k] - cplx(g.eigenvalues(static_cast<Eigen::Index>(k)), 0.0)));
  }
  o.detail << "hermiticity=" << herm << " |lambda1|=" << top << " annihilation=" << ann << " spectrum=" << spec;
  o.require(herm < 1e-10, "Hermitian");
  o.require(top < 1e-8, "top eigenvalue");
  o.require(ann < 1e-10, "per-jump annihilation");
  o.require(spec < 1e-8, "spectrum match");
  return o;
}

TimeProfile profile(ProfileKind k) {
  TimeProfile p;
  p.kind = k;
  return p;
}

Outcome criterion_6() {
  Outcome o;
  const double b2 = l1_norm(profile(ProfileKind::B2));
  const double n1 = l1_norm(profile(ProfileKind::N1));
  const double b1 = l1_norm(profile(ProfileKind::B1));
  const double hp = l1_norm(profile(ProfileKind::HPlusMetropolis));
  const double b2_target = std::exp(-0.25) / (4.0 * kPi);
  o.detail << "||b2||=" << b2 << " (target " << b2_target << ") ||n1||=" << n1 << " ||b1||=" << b1
           << " ||h+M||=" << hp;
  o.require(std::abs(b2 - b2_target) <= 1e-6, "||b2||_1");
  o.require(std::abs(n1 - kPi / std::sqrt(32.0)) <= 1e-6, "||n1||_1");
  o.require(b1 < 1.0, "||b1||_1");
  o.require(std::abs(hp - 0.773389) <= 1e-4, "||h+M||_1");
  return o;
}

struct TdCase {
  Mat H;
  std::vector<Jump> jumps;
};

std::vector<TdCase> td_cases() {
  Mat sm = Mat::Zero(2, 2);
  sm(1, 0) = 1.0;
  return {
      {0.9 * pauli('Z') + 0.4 * pauli('X'), {{"Sm", sm}, {"Sp", sm.adjoint()}}},
      {0.7 * pauli('Z') - 0.5 * pauli('Y'), {{"X", pauli('X')}}},
      {random_h2(0), site_jumps(2, "XY")},
  };
}

Outcome criterion_7() {
  Outcome o;
  const auto t0 = Clock::now();
  double eb = 0.0, en = 0.0, ratio = std::numeric_limits<double>::infinity();
  int qualifying = 0;
  for (const auto& c : td_cases()) {
    const Instance in = make_instance(c.H, c.jumps, WeightKind::Gaussian, 1.0);
    const TimeDomainGrid g = default_time_domain_grid(1.0, detail::nu_max_exact(in.J));
    const ParentHamiltonian P = parent_closed_form(in.J, in.alpha, in.beta);
    const Mat Bt = reconstruct_B(in.J, 1.0, TimeDomainKind::Gaussian, g);
    eb = std::max(eb, op_norm(Bt - in.parts.B) / std::max(1.0, op_norm(in.parts.B)));
    en = std::max(en, op_norm(reconstruct_N(in.J, 1.0, TimeDomainKind::Gaussian, g) - P.N));
    const TimeDomainStudy st = grid_convergence_study(in.J, 1.0, in.parts.B);
    if (st.qualifying_pairs > 0) {
      ratio = std::min(ratio, st.min_ratio);
      qualifying += st.qualifying_pairs;
    }
  }
  const double t = seconds_since(t0);
  o.detail << "B rel err=" << eb << " N err=" << en << " min halving ratio=" << ratio << " (" << qualifying
           << " pairs) time=" << t << "s";
  o.require(eb < 1e-4, "B reconstruction");
  o.require(en < 1e-4, "N reconstruction");
  o.require(qualifying > 0 && ratio >= 3.5, "convergence under halving");
  o.require(t < 120.0, "runtime");
  return o;
}

Outcome criterion_8() {
  Outcome o;
  double worst = 0.0;  // error / bound
  const Mat Hs[] = {0.8 * pauli('Z') + 0.3 * pauli('X'), pauli('Z') - 0.6 * pauli('Y')};
  for (const Mat& H : Hs)
    for (double beta : {1.0, 2.0}) {
      const Instance in = make_instance(H, {{"X", pauli('X')}}, WeightKind::Metropolis, beta);
      const TimeDomainGrid g = default_time_domain_grid(beta, detail::nu_max_exact(in.J));
      for (double eta : {1e-2, 1e-3}) {
        const double err = op_norm(reconstruct_B(in.J, beta, TimeDomainKind::Metropolis, g, eta) - in.parts.B);
        const double bound = metropolis_eta_bound(in.J, in.sys, beta, eta);
        worst = std::max(worst, err / bound);
      }
    }
  o.detail << "max error/bound=" << worst;
  o.require(worst < 1.0, "eta bound");
  return o;
}

Outcome criterion_9() {
  Outcome o;
  double worst = 0.0;
  int ergodic = 0;
  for (int s = 0; s < kSeeds; ++s)
    for (double b : kBetas) {
      const Instance in = make_instance(random_h2(s), site_jumps(2, "XY"), WeightKind::Gaussian, b);
      const MixingResult m = gap_and_mixing(in.L(), in.rho(), static_cast<std::uint64_t>(s + 1));
      if (!m.ergodic) continue;
      ++ergodic;
      worst = std::max(worst, m.t_mix_empirical / m.t_mix_bound);
    }
  o.detail << "ergodic instances=" << ergodic << " max empirical/bound=" << worst;
  o.require(ergodic > 0, "ergodic instances");
  o.require(worst <= 1.0, "mixing bound");
  return o;
}

Outcome criterion_10() {
  Outcome o;
  const Instance in = make_instance(random_h2(3), site_jumps(2, "XY"), WeightKind::Gaussian, 1.0);
  const double r0 = s_db_residual(in.L(), in.rho(), 0.0);
  const double r25 = s_db_residual(in.L(), in.rho(), 0.25);
  const double r50 = s_db_residual(in.L(), in.rho(), 0.5);
  o.detail << "s=0: " << r0 << " s=0.25: " << r25 << " s=0.5: " << r50;
  o.require(r0 > 1e-2, "s=0");
  o.require(r25 > 1e-2, "s=0.25");
  o.require(r50 < 1e-10, "s=0.5");
  return o;
}

Outcome criterion_11() {
  Outcome o;
  const double beta = 1.0, delta = std::sqrt(2.0), kappa = std::sqrt(2.0);
  const double a = beta * (1.0 / (delta * delta) + 1.0 / (2.0 * kappa * kappa));
  const auto grid = symmetric_grid(2.0, 0.2);
  const double r = functional_equation_residual(beta, delta, kappa, a, grid);
  const double rp = functional_equation_residual(beta, delta, kappa, 1.1 * a, grid);
  o.detail << "grid=" << grid.size() << "x" << grid.size() << " exact=" << r << " perturbed=" << rp;
  o.require(grid.size() == 21, "grid size");
  o.require(r < 1e-12, "exact parameter");
  o.require(rp > 1e-3, "perturbed parameter");
  return o;
}

std::string g_cli;
std::string g_config;

json run_cli_json(const std::string& out) {
  const std::string cmd = "\"" + g_cli + "\" verify --config \"" + g_config + "\" --out \"" + out + "\"";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) throw std::runtime_error("could not launch " + g_cli);
  std::ifstream in(out);
  if (!in) throw std::runtime_error("CLI did not write " + out);
  json j = json::parse(in);
  j.erase("timings");
  return j;
}

Outcome criterion_12() {
  Outcome o;
  if (g_cli.empty() || g_config.empty()) {
    o.require(false, "--cli and --config are required");
    return o;
  }
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "gibbslb_accept_a.json").string(), b = (dir / "gibbslb_accept_b.json").string();
  const json ja = run_cli_json(a), jb = run_cli_json(b);
  const bool same = ja.dump() == jb.dump();
  o.detail << "checks=" << ja["checks"].size() << " identical=" << (same ? "yes" : "no");
  o.require(!ja["checks"].empty(), "nonempty report");
  o.require(same, "identical JSON");
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-12)")->check(CLI::Range(1, 12));
  app.add_option("--cli", g_cli, "Path to the gibbslb executable");
  app.add_option("--config", g_config, "Config used for the determinism check");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,  criterion_6,
      criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12,
  };
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only && static_cast<int>(k + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "error: " << e.what();
    }
    std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str() << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
