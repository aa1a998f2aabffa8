#pragma once

#include "gibbslb/config.hpp"
#include "gibbslb/discriminant.hpp"
#include "gibbslb/errors.hpp"
#include "gibbslb/lindbladian.hpp"
#include "gibbslb/model_io.hpp"
#include "gibbslb/report.hpp"
#include "gibbslb/spectral.hpp"
#include "gibbslb/timedomain.hpp"
#include "gibbslb/weights.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gibbslb {

inline constexpr const char* kVersion = "0.1.0";

inline std::string error_category(const std::exception& e) {
  if (dynamic_cast<const ConditioningError*>(&e)) return "conditioning error";
  if (dynamic_cast<const InputError*>(&e)) return "input error";
  if (dynamic_cast<const ResourceError*>(&e)) return "resource error";
  if (dynamic_cast<const NumericError*>(&e)) return "numeric error";
  if (dynamic_cast<const InternalError*>(&e)) return "internal error";
  if (dynamic_cast<const IoError*>(&e)) return "io error";
  return "error";
}

// Lazily built pipeline for one (config, beta) pair.
class Context {
 public:
  Context(const ExperimentConfig& cfg, double beta) : cfg_(cfg), beta_(beta) {}

  double beta() const { return beta_; }
  const ExperimentConfig& config() const { return cfg_; }

  const Model& model() {
    if (!model_) model_ = load_model(cfg_.model);
    return *model_;
  }
  const SpinSystem& sys() {
    if (!sys_) sys_ = decompose(model().H());
    return *sys_;
  }
  const BohrSet& bohr() {
    if (!bohr_) bohr_ = bohr_set(sys());
    return *bohr_;
  }
  const JumpSet& jumps() {
    if (!jumps_) jumps_ = jump_components(sys(), bohr(), model().jumps());
    return *jumps_;
  }
  const WeightSpec& weight() {
    if (!weight_) weight_ = cfg_.weight_spec(beta_);
    return *weight_;
  }
  const AlphaMatrix& alpha() {
    if (!alpha_) alpha_ = alpha_matrix(bohr(), weight());
    return *alpha_;
  }
  const LindbladParts& parts() {
    if (!parts_) {
      AssembleOptions opt;
      opt.verify = false;
      jumps();
      parts_ = assemble(*jumps_, alpha(), beta_, opt);
    }
    return *parts_;
  }
  const Superoperator& L() { return parts().L; }
  const StatePowers& rho() {
    if (!rho_) rho_ = StatePowers::gibbs(sys(), beta_);
    return *rho_;
  }
  const ParentHamiltonian& parent() {
    if (!parent_) {
      jumps();
      parent_ = parent_closed_form(*jumps_, alpha(), beta_);
    }
    return *parent_;
  }
  const std::vector<cplx>& spectrum() {
    if (!spectrum_) spectrum_ = gibbslb::spectrum(L());
    return *spectrum_;
  }
  const MixingResult& mixing() {
    if (!mixing_) {
      rho();
      mixing_ = gap_and_mixing(L(), *rho_, cfg_.seed);
    }
    return *mixing_;
  }

  json env() {
    json e;
    e["n"] = model().qubits;
    e["jumps"] = jumps().size();
    e["bohr_frequencies"] = bohr().size();
    e["s_norm"] = jumps().s_norm;
    e["beta"] = beta_;
    e["beta_norm_H"] = beta_ * sys().norm;
    e["weight"] = to_string(cfg_.weight);
    e["version"] = kVersion;
    return e;
  }

 private:
  const ExperimentConfig& cfg_;
  double beta_;
  std::optional<Model> model_;
  std::optional<SpinSystem> sys_;
  std::optional<BohrSet> bohr_;
  std::optional<JumpSet> jumps_;
  std::optional<WeightSpec> weight_;
  std::optional<AlphaMatrix> alpha_;
  std::optional<LindbladParts> parts_;
  std::optional<StatePowers> rho_;
  std::optional<ParentHamiltonian> parent_;
  std::optional<std::vector<cplx>> spectrum_;
  std::optional<MixingResult> mixing_;
};

struct CheckDef {
  std::string stage;
  std::string comparison = "le";
  std::function<double(Context&)> run;
};

inline int stage_rank(const std::string& s) {
  static const std::vector<std::string> order = {"spectral", "weights", "lindbladian", "discriminant", "dynamics",
                                                 "timedomain"};
  const auto it = std::find(order.begin(), order.end(), s);
  return static_cast<int>(it - order.begin());
}

inline double alpha_route_difference(Context& c) {
  const WeightSpec& w = c.weight();
  const AlphaMatrix& a = c.alpha();
  AlphaMatrix b;
  switch (w.kind) {
    case WeightKind::Gaussian: b = alpha_matrix(c.bohr(), w, AlphaRoute::Quadrature); break;
    case WeightKind::Metropolis: b = alpha_matrix(c.bohr(), w, AlphaRoute::Product); break;
    default: {
      QuadratureSpec fine;
      fine.order = 96;
      fine.rel_tol = 1e-12;
      fine.window = 14.0;
      b = alpha_matrix(c.bohr(), w, AlphaRoute::Quadrature, fine);
    }
  }
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

inline double parent_spectrum_mismatch(Context& c) {
  const auto& ev = c.spectrum();
  const ParentGap g = parent_gap(c.parent());
  if (static_cast<Eigen::Index>(ev.size()) != g.eigenvalues.size()) throw InternalError("spectrum size mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < ev.size(); ++k)
    worst = std::max(worst, std::abs(ev[k] - cplx(g.eigenvalues(static_cast<Eigen::Index>(k)), 0.0)));
  return worst;
}

inline const std::map<std::string, CheckDef>& check_registry() {
  static const std::map<std::string, CheckDef> r = {
      {"spectrum_residual",
       {"spectral", "le",
        [](Context& c) {
          const SpinSystem& s = c.sys();
          const Mat HU = s.H * s.eigenvectors;
          const Mat UE = s.eigenvectors * s.energies.cast<cplx>().asDiagonal();
          return op_norm(HU - UE) / std::max(1.0, s.norm);
        }}},
      {"alpha_skew", {"weights", "le", [](Context& c) { return check_skew_symmetry(c.alpha(), c.beta()); }}},
      {"alpha_psd", {"weights", "le", [](Context& c) { return std::max(0.0, -check_psd(c.alpha())); }}},
      {"alpha_routes", {"weights", "le", alpha_route_difference}},
      {"trace_preservation", {"lindbladian", "le", [](Context& c) { return trace_annihilation_residual(c.L()); }}},
      {"cptp", {"lindbladian", "le", [](Context& c) { return cptp_violation(c.L()); }}},
      {"kms_db", {"lindbladian", "le", [](Context& c) { return kms_db_residual(c.L(), c.rho()); }}},
      {"stationarity", {"lindbladian", "le", [](Context& c) { return stationarity_residual(c.L(), c.rho().rho()); }}},
      {"q_residual",
       {"lindbladian", "le", [](Context& c) { return q_residual(c.parts().B, c.parts().R, c.rho()); }}},
      {"coherent_routes",
       {"lindbladian", "le",
        [](Context& c) {
          return op_norm(coherent_term(c.jumps(), c.alpha(), c.beta()) -
                         coherent_term_double_sum(c.jumps(), c.alpha(), c.beta()));
        }}},
      {"transition_routes",
       {"lindbladian", "le",
        [](Context& c) {
          return (transition_part(c.jumps(), c.alpha()).M - transition_part_bohr_sum(c.jumps(), c.alpha()).M).norm();
        }}},
      {"sdb",
       {"lindbladian", "le",
        [](Context& c) {
          double worst = 0.0;
          for (double s : c.config().sdb_s) worst = std::max(worst, s_db_residual(c.L(), c.rho(), s));
          return worst;
        }}},
      {"sdb_falsification",
       {"lindbladian", "gt",
        [](Context& c) {
          return std::min(s_db_residual(c.L(), c.rho(), 0.0), s_db_residual(c.L(), c.rho(), 0.25));
        }}},
      {"parent_hermitian", {"discriminant", "le", [](Context& c) { return c.parent().hermiticity_defect; }}},
      {"parent_top_eigenvalue",
       {"discriminant", "le", [](Context& c) { return std::abs(parent_gap(c.parent()).lambda1); }}},
      {"frustration",
       {"discriminant", "le",
        [](Context& c) {
          return frustration_residual(c.parent(), c.jumps(), purified_gibbs(c.sys(), c.beta()));
        }}},
      {"parent_spectrum", {"discriminant", "le", parent_spectrum_mismatch}},
      {"parent_conjugation",
       {"discriminant", "le",
        [](Context& c) { return op_norm(c.parent().Hvec - discriminant_by_conjugation(c.L(), c.rho())); }}},
      {"mixing_bound",
       {"dynamics", "le",
        [](Context& c) {
          const MixingResult& m = c.mixing();
          return m.ergodic ? m.t_mix_empirical / m.t_mix_bound : 0.0;
        }}},
  };
  return r;
}

template <class F>
CheckRecord timed_check(const std::string& name, const std::string& stage, const std::string& comparison,
                        double tolerance, F&& f, json& timings) {
  CheckRecord rec;
  rec.name = name;
  rec.stage = stage;
  rec.comparison = comparison;
  rec.tolerance = tolerance;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    rec.value = f();
  } catch (const std::exception& e) {
    rec.error = error_category(e) + " in stage " + stage + ": " + e.what();
  }
  timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.decide();
  return rec;
}

inline void add_env(Report& rep, Context& c) {
  try {
    rep.env = c.env();
  } catch (const std::exception& e) {
    rep.env = {{"error", error_category(e) + ": " + e.what()}};
  }
}

// Runs the requested checks in stage order; a failing stage fails its checks
// and everything downstream of it, but the report is always complete.
inline Report run_verify(const ExperimentConfig& cfg, double beta, const std::string& suffix = "") {
  std::vector<std::string> names = cfg.checks_given ? cfg.checks : default_verify_checks();
  if (names.empty()) throw InputError("no checks requested");
  const auto& reg = check_registry();
  for (const auto& n : names)
    if (!reg.count(n)) throw InputError("check '" + n + "' is not available in verify");
  std::stable_sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
    return stage_rank(reg.at(a).stage) < stage_rank(reg.at(b).stage);
  });
  Report rep;
  rep.command = "verify";
  Context ctx(cfg, beta);
  for (const auto& n : names) {
    const CheckDef& d = reg.at(n);
    rep.checks.push_back(
        timed_check(n + suffix, d.stage, d.comparison, cfg.tolerance(n), [&] { return d.run(ctx); }, rep.timings));
  }
  add_env(rep, ctx);
  return rep;
}

inline json complex_list(const std::vector<cplx>& v) {
  json re = json::array(), im = json::array();
  for (const auto& z : v) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"re", re}, {"im", im}};
}

inline Report run_spectrum(const ExperimentConfig& cfg, double beta) {
  ExperimentConfig c2 = cfg;
  if (!c2.checks_given) {
    c2.checks = {"trace_preservation", "parent_spectrum"};
    c2.checks_given = true;
  }
  Report rep = run_verify(c2, beta);
  rep.command = "spectrum";
  Context ctx(cfg, beta);
  try {
    rep.data["lindbladian_eigenvalues"] = complex_list(ctx.spectrum());
    const ParentGap g = parent_gap(ctx.parent());
    rep.data["parent_eigenvalues"] = std::vector<double>(g.eigenvalues.data(), g.eigenvalues.data() + g.eigenvalues.size());
    rep.data["gap"] = spectral_gap(ctx.spectrum());
    rep.data["parent_gap"] = g.gap;
    rep.data["energies"] = std::vector<double>(ctx.sys().energies.data(), ctx.sys().energies.data() + ctx.sys().dim());
    rep.data["bohr_frequencies"] = ctx.bohr().frequencies;
  } catch (const std::exception& e) {
    rep.data["error"] = error_category(e) + ": " + e.what();
  }
  return rep;
}

inline Mat initial_state(const std::string& spec, const SpinSystem& sys, std::uint64_t seed) {
  const Eigen::Index d = sys.dim();
  if (spec == "random") {
    std::mt19937_64 rng(seed);
    return random_pure_state(d, rng);
  }
  if (spec == "maximally_mixed") return Mat::Identity(d, d) / double(d);
  if (spec == "ground") {
    const Vec g = sys.eigenvectors.col(0);
    return g * g.adjoint();
  }
  if (spec.rfind("basis:", 0) == 0) {
    long k = -1;
    try {
      k = std::stol(spec.substr(6));
    } catch (const std::exception&) {
    }
    if (k < 0 || k >= d) throw InputError("initial state '" + spec + "' is out of range");
    Mat r = Mat::Zero(d, d);
    r(k, k) = 1.0;
    return r;
  }
  throw InputError("unknown initial state '" + spec + "' (random, maximally_mixed, ground, basis:<k>)");
}

inline Report run_evolve(const ExperimentConfig& cfg, double beta) {
  Report rep;
  rep.command = "evolve";
  Context ctx(cfg, beta);
  json rows = json::array();
  double trace_err = 0.0, herm_err = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  std::string err;
  try {
    for (double t : cfg.times)
      if (!(t >= 0.0)) throw InputError("evolution times must be nonnegative");
    const Mat rho0 = initial_state(cfg.initial, ctx.sys(), cfg.seed);
    const Propagator prop(ctx.L(), ctx.rho());
    const Mat& rb = ctx.rho().rho();
    for (double t : cfg.times) {
      const Mat r = prop.evolve(rho0, t);
      trace_err = std::max(trace_err, std::abs(r.trace() - 1.0));
      herm_err = std::max(herm_err, (r - r.adjoint()).norm());
      rows.push_back({{"t", t}, {"trace_distance", 0.5 * trace_norm_hermitian(r - rb)}, {"trace", r.trace().real()}});
    }
  } catch (const std::exception& e) {
    err = error_category(e) + " in stage dynamics: " + e.what();
  }
  rep.timings["evolve"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& [name, value] : {std::pair{"evolve_trace", trace_err}, std::pair{"evolve_hermitian", herm_err}}) {
    CheckRecord rec;
    rec.name = name;
    rec.stage = "dynamics";
    rec.tolerance = cfg.tolerance(name);
    rec.value = value;
    rec.error = err;
    rec.decide();
    rep.checks.push_back(rec);
  }
  rep.data["initial"] = cfg.initial;
  rep.data["trajectory"] = rows;
  add_env(rep, ctx);
  return rep;
}

struct SweepRow {
  double beta, gap, t_mix_bound, t_mix_empirical, parent_gap, kms_db, stationarity;
  bool pass;
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "beta,gap,t_mix_bound,t_mix_empirical,parent_gap,kms_db,stationarity,pass\n";
  for (const auto& r : rows)
    s += format_g17(r.beta) + "," + format_g17(r.gap) + "," + format_g17(r.t_mix_bound) + "," +
         format_g17(r.t_mix_empirical) + "," + format_g17(r.parent_gap) + "," + format_g17(r.kms_db) + "," +
         format_g17(r.stationarity) + "," + (r.pass ? "true" : "false") + "\n";
  return s;
}

inline Report run_sweep(const ExperimentConfig& cfg, const std::vector<double>& betas, std::vector<SweepRow>* rows_out) {
  if (betas.empty()) throw InputError("sweep needs at least one beta (--beta or betas=)");
  Report rep;
  rep.command = "sweep";
  json rows = json::array();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double b : betas) {
    ExperimentConfig c = cfg;
    c.checks = {"kms_db", "stationarity"};
    c.checks_given = true;
    const std::string suffix = "@beta=" + format_g17(b);
    Report one = run_verify(c, b, suffix);
    SweepRow row{b, nan, nan, nan, nan, one.checks[0].value, one.checks[1].value, one.all_pass()};
    Context ctx(cfg, b);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const MixingResult& m = ctx.mixing();
      row.gap = m.gap;
      row.t_mix_bound = m.t_mix_bound;
      row.t_mix_empirical = m.t_mix_empirical;
      row.parent_gap = parent_gap(ctx.parent()).gap;
    } catch (const std::exception& e) {
      one.checks.push_back({});
      CheckRecord& r = one.checks.back();
      r.name = "sweep_point" + suffix;
      r.stage = "dynamics";
      r.error = error_category(e) + ": " + e.what();
      r.decide();
      row.pass = false;
    }
    rep.timings["mixing" + suffix] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& r : one.checks) rep.checks.push_back(r);
    for (auto& [k, v] : one.timings.items()) rep.timings[k] = v;
    rows.push_back({{"beta", b},
                    {"gap", number_or_null(row.gap)},
                    {"t_mix_bound", number_or_null(row.t_mix_bound)},
                    {"t_mix_empirical", number_or_null(row.t_mix_empirical)},
                    {"parent_gap", number_or_null(row.parent_gap)}});
    if (rows_out) rows_out->push_back(row);
    if (rep.env.empty()) rep.env = one.env;
  }
  rep.env.erase("beta");
  rep.env.erase("beta_norm_H");
  rep.data["sweep"] = rows;
  return rep;
}

// ----- time-domain checks -----

struct TimeDomainStudy {
  std::vector<double> tau0;
  std::vector<double> error;
  double min_ratio = std::numeric_limits<double>::quiet_NaN();
  int qualifying_pairs = 0;
};

// Relative B error on t0 = t_start / 2^k, k = 0..levels-1. The study starts
// beyond the Nyquist guard (t_start * beta * nu_max = pi, capped at 1) so
// that the aliasing error is resolved above roundoff. Ratios count only
// where the coarse error sits 100x above `floor`.
inline TimeDomainStudy grid_convergence_study(const JumpSet& J, double beta, const Mat& B_freq, int levels = 5,
                                              double floor = 1e-13) {
  TimeDomainStudy st;
  const double nu_max = J.energies.maxCoeff() - J.energies.minCoeff();
  double t = 1.0;
  if (nu_max > 0.0) t = std::min(t, kPi / (nu_max * beta));
  const double scale = std::max(1.0, op_norm(B_freq));
  for (int k = 0; k < levels; ++k, t *= 0.5) {
    TimeDomainGrid g;
    g.tau0 = t;
    g.nyquist_guard = false;
    st.tau0.push_back(t);
    st.error.push_back(op_norm(reconstruct_B(J, beta, TimeDomainKind::Gaussian, g) - B_freq) / scale);
  }
  for (int k = 0; k + 1 < levels; ++k) {
    if (st.error[k] <= 100.0 * floor) continue;
    const double r = st.error[k] / std::max(st.error[k + 1], floor);
    st.min_ratio = st.qualifying_pairs == 0 ? r : std::min(st.min_ratio, r);
    ++st.qualifying_pairs;
  }
  return st;
}

inline double metropolis_eta_bound(const JumpSet& J, const SpinSystem& sys, double beta, double eta) {
  Mat S = Mat::Zero(J.dim(), J.dim());
  for (const auto& A : J.operators) S += A.adjoint() * A;
  return op_norm(S) * eta * beta * sys.norm / (std::sqrt(2.0) * kPi);
}

inline Report run_timedomain(const ExperimentConfig& cfg, double beta) {
  Report rep;
  rep.command = "timedomain-check";
  Context ctx(cfg, beta);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto add = [&](const std::string& name, double t0, double T, auto&& f, const std::string& comparison = "le") {
    CheckRecord r = timed_check(name, "timedomain", comparison, cfg.tolerance(name), f, rep.timings);
    r.grid_t0 = t0;
    r.grid_T = T;
    rep.checks.push_back(r);
  };

  TimeDomainGrid grid;
  TimeDomainKind kind = TimeDomainKind::Gaussian;
  std::exception_ptr setup_error;
  try {
    if (!(beta > 0.0)) throw InputError("time-domain checks require beta > 0");
    kind = time_domain_kind(cfg.weight);
    grid = default_time_domain_grid(beta, ctx.bohr().nu_max());
    if (cfg.grid.tau0) grid.tau0 = *cfg.grid.tau0;
    if (cfg.grid.T) grid.T = *cfg.grid.T;
    if (cfg.grid.T_inner) grid.T_inner = *cfg.grid.T_inner;
  } catch (const std::exception&) {
    setup_error = std::current_exception();
  }
  auto guarded = [&](auto&& f) {
    return [&, f]() -> double {
      if (setup_error) std::rethrow_exception(setup_error);
      return f();
    };
  };
  const double gt0 = grid.tau0 * beta, gT = grid.T * beta;

  add("td_B", gt0, gT, guarded([&] {
        const Mat Bf = ctx.parts().B;
        return op_norm(reconstruct_B(ctx.jumps(), beta, kind, grid, cfg.eta) - Bf) / std::max(1.0, op_norm(Bf));
      }));
  add("td_N", gt0, gT, guarded([&] {
        return op_norm(reconstruct_N(ctx.jumps(), beta, kind, grid, cfg.eta) - ctx.parent().N);
      }));
  add("td_transition", gt0, gT, guarded([&] {
        const ParentHamiltonian& P = ctx.parent();
        const Eigen::Index d = ctx.jumps().dim();
        const Mat Id = Mat::Identity(d, d);
        const Mat T_closed = P.Hvec - 0.5 * (kron(P.N, Id) + kron(Id, P.N.conjugate()));
        return op_norm(reconstruct_transition(ctx.jumps(), beta, kind, grid) - T_closed);
      }));
  if (kind == TimeDomainKind::Gaussian) {
    TimeDomainStudy study;
    add("td_convergence", nan, gT, guarded([&] {
          study = grid_convergence_study(ctx.jumps(), beta, ctx.parts().B);
          // Every grid at the noise floor: nothing left to converge.
          if (study.qualifying_pairs == 0) return std::numeric_limits<double>::infinity();
          return study.min_ratio;
        }), "ge");
    rep.data["grid_study"] = {
        {"tau0", study.tau0}, {"error", study.error}, {"qualifying_pairs", study.qualifying_pairs}};
  } else {
    json eta_rows = json::array();
    add("td_metropolis_eta", nan, gT, guarded([&] {
          const Mat Bf = ctx.parts().B;
          double worst = 0.0;
          for (double eta : {1e-2, 1e-3}) {
            const double err = op_norm(reconstruct_B(ctx.jumps(), beta, TimeDomainKind::Metropolis, grid, eta) - Bf);
            const double bound = metropolis_eta_bound(ctx.jumps(), ctx.sys(), beta, eta);
            eta_rows.push_back({{"eta", eta}, {"error", err}, {"bound", bound}});
            worst = std::max(worst, err / bound);
          }
          return worst;
        }));
    rep.data["eta_sweep"] = eta_rows;
  }

  const double se = cfg.sigma_e.value_or(1.0 / (beta > 0 ? beta : 1.0));
  TimeGrid og;
  add("oft", nan, nan, guarded([&] {
        const JumpSet& J = ctx.jumps();
        const double nu_max = std::max(ctx.bohr().nu_max(), 1e-12);
        og.t0 = std::min(0.1 / se, kPi / (8.0 * nu_max));
        og.T = 9.0 / se;
        double worst = 0.0;
        for (std::size_t a = 0; a < J.size(); ++a)
          for (double w : {-2.0 * nu_max, -nu_max, 0.0, 0.5 * nu_max, nu_max}) {
            // The time integral with unit-norm f carries sqrt(2) times the Bohr prefactor.
            const Mat d = oft_quadrature(J, a, w, se, og) - std::sqrt(2.0) * oft_bohr(J, a, w, se);
            worst = std::max(worst, op_norm(d));
          }
        return worst;
      }));
  rep.checks.back().grid_t0 = og.t0;
  rep.checks.back().grid_T = og.T;
  add("filter_norm", nan, nan, [&] {
    TimeProfile f;
    f.kind = ProfileKind::FFilter;
    f.sigma_e = se;
    const TimeGrid g{0.02 / se, 10.0 / se};
    double s = 0.0;
    for (double t : g.nodes()) s += std::norm(eval_profile(f, t)) * g.t0;
    return std::abs(s - 1.0);
  });
  auto l1 = [](ProfileKind k) {
    TimeProfile p;
    p.kind = k;
    return l1_norm(p);
  };
  add("l1_b2", nan, 8.0, [&] { return std::abs(l1(ProfileKind::B2) - 1.0 / (4.0 * kPi)); });
  add("l1_n1", nan, 8.0, [&] { return std::abs(l1(ProfileKind::N1) - kPi / std::sqrt(32.0)); });
  add("l1_b1", nan, 8.0, [&] { return l1(ProfileKind::B1); }, "lt");
  add("l1_h_plus_metropolis", nan, 8.0, [&] {
    return std::abs(l1(ProfileKind::HPlusMetropolis) - std::sqrt(kPi / 2.0) * std::erfc(1.0 / std::sqrt(8.0)));
  });
  add("functional_equation", 0.2, 2.0, [&] {
    const double b = beta > 0 ? beta : 1.0;
    const double d = std::sqrt(2.0), k = std::sqrt(2.0);
    return functional_equation_residual(b, d, k, b * (1.0 / (d * d) + 1.0 / (2.0 * k * k)), symmetric_grid(2.0, 0.2));
  });
  add_env(rep, ctx);
  return rep;
}

inline std::string timedomain_csv(const Report& r) {
  std::string s = "check,grid_t0,grid_T,residual,tolerance,pass\n";
  for (const auto& c : r.checks)
    s += c.name + "," + format_g17(c.grid_t0) + "," + format_g17(c.grid_T) + "," + format_g17(c.value) + "," +
         format_g17(c.tolerance) + "," + (c.pass ? "true" : "false") + "\n";
  return s;
}

}  // namespace gibbslb
