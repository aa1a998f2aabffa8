#include "gibbslb/config.hpp"
#include "gibbslb/errors.hpp"
#include "gibbslb/report.hpp"
#include "gibbslb/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

using namespace gibbslb;

namespace {

struct Options {
  std::string config;
  std::string betas;
  std::string weight;
  std::string out;
  std::string format;
  std::string seed;
  std::vector<std::string> tols;
};

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig c = load_config(o.config);
  if (!o.betas.empty()) {
    c.betas = parse_real_list(o.betas, "--beta");
    if (c.betas.empty()) throw InputError("--beta needs at least one value");
    c.beta = c.betas.front();
  }
  if (!o.weight.empty()) c.weight = parse_weight_kind(o.weight);
  if (!o.out.empty()) c.output = o.out;
  if (!o.format.empty()) c.format = o.format;
  if (!o.seed.empty()) set_key(c, "seed", o.seed);
  for (const auto& t : o.tols) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("--tol expects <check>=<value>, got '" + t + "'");
    set_key(c, "tol." + trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  validate(c);
  return c;
}

int finish(const Report& r, const ExperimentConfig& c, const std::string& csv) {
  if (c.format == "csv") write_text(csv, c.output);
  else emit(r, "json", c.output);
  return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detailed-balanced quantum Gibbs sampler: construction and verification"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Config file (key = value)")->required()->check(CLI::ExistingFile);
    sub->add_option("--beta", o.betas, "Inverse temperature, or comma-separated list for sweep");
    sub->add_option("--weight", o.weight, "gaussian | metropolis | finite_s | glauber_smooth");
    sub->add_option("--out", o.out, "Output path (default stdout)");
    sub->add_option("--format", o.format, "json | csv");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--tol", o.tols, "Tolerance override <check>=<value> (repeatable)");
  };
  auto* verify = app.add_subcommand("verify", "Run verification checks");
  auto* spectrum = app.add_subcommand("spectrum", "Lindbladian and parent Hamiltonian spectra");
  auto* evolve = app.add_subcommand("evolve", "Evolve an initial state under exp(Lt)");
  auto* td = app.add_subcommand("timedomain-check", "Cross-validate the time-domain constructions");
  auto* sweep = app.add_subcommand("sweep", "Gap and mixing data over a list of beta values");
  for (auto* s : {verify, spectrum, evolve, td, sweep}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  ExperimentConfig cfg;
  try {
    cfg = resolve(o);
  } catch (const std::exception& e) {
    std::cerr << "gibbslb: " << error_category(e) << ": " << e.what() << "\n";
    return 2;
  }

  try {
    if (*verify) {
      const Report r = run_verify(cfg, cfg.beta);
      return finish(r, cfg, to_csv(r));
    }
    if (*spectrum) {
      const Report r = run_spectrum(cfg, cfg.beta);
      return finish(r, cfg, to_csv(r));
    }
    if (*evolve) {
      const Report r = run_evolve(cfg, cfg.beta);
      return finish(r, cfg, to_csv(r));
    }
    if (*td) {
      const Report r = run_timedomain(cfg, cfg.beta);
      return finish(r, cfg, timedomain_csv(r));
    }
    if (*sweep) {
      std::vector<SweepRow> rows;
      const Report r = run_sweep(cfg, cfg.betas.empty() ? std::vector<double>{cfg.beta} : cfg.betas, &rows);
      return finish(r, cfg, sweep_csv(rows));
    }
  } catch (const std::exception& e) {
    std::cerr << "gibbslb: " << error_category(e) << ": " << e.what() << "\n";
    return 2;
  }
  return 2;
}
