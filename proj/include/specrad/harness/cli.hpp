#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "specrad/errors.hpp"
#include "specrad/harness/config.hpp"
#include "specrad/harness/experiments.hpp"
#include "specrad/harness/io.hpp"
#include "specrad/harness/svg.hpp"
#include "specrad/ident.hpp"
#include "specrad/stabtest.hpp"

namespace specrad::harness {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

// Environment variable that overrides the output directory (below --out-dir).
inline constexpr const char* kOutDirEnv = "SPECRAD_OUT_DIR";

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << contents;
}

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> threads;
};

inline ExperimentConfig resolve_config(const GlobalFlags& g) {
  ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) cfg.out_dir = env;
  if (g.out_dir) cfg.out_dir = *g.out_dir;
  cfg.validate();
  return cfg;
}

inline std::vector<Trajectory> simulated_data(const ExperimentConfig& cfg, std::size_t trajectories,
                                              bool noiseless) {
  SimOptions opts;
  opts.x0 = cfg.system.x0;
  opts.noiseless = noiseless;
  return simulate_ensemble(cfg.system.build(), cfg.horizon, trajectories,
                           derive_seed(cfg.seed, ExperimentId::simulate, trajectories, 0), opts, cfg.threads);
}

}  // namespace detail

/// Command-line front end. Returns the process exit code: 0 on success, 1 on
/// usage/config/domain errors, 2 when a planner reports an infeasible target.
inline int cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Spectral-radius estimation and lossy-channel stabilizability toolkit", "specrad"};
  app.require_subcommand(1);
  detail::GlobalFlags g;
  app.add_option("--config", g.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master seed (u64)");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--runs", g.runs, "runs per grid point")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "simulate trajectories and write them as CSV");
  std::optional<std::size_t> sim_n;
  std::string sim_output = "-";
  bool sim_noiseless = false;
  sim->add_option("--n", sim_n, "number of trajectories")->check(CLI::PositiveNumber);
  sim->add_option("--output", sim_output, "CSV path, '-' for stdout");
  sim->add_flag("--noiseless", sim_noiseless, "force process noise to zero");

  auto* est = app.add_subcommand("estimate", "estimate rho(A) with an error bound; prints JSON");
  std::string est_input;
  std::optional<std::string> est_method;
  std::optional<double> est_delta;
  std::optional<std::size_t> est_n;
  bool est_noiseless = false;
  est->add_option("--input", est_input, "trajectory CSV (default: simulate from the config)");
  est->add_option("--method", est_method, "pooled | multi_trajectory")
      ->check(CLI::IsMember({"pooled", "multi_trajectory"}));
  est->add_option("--delta", est_delta, "failure probability");
  est->add_option("--n", est_n, "trajectories to simulate")->check(CLI::PositiveNumber);
  est->add_flag("--noiseless", est_noiseless, "simulate without process noise");

  auto* stab = app.add_subcommand("stabtest", "three-way stabilizability test; prints JSON");
  std::string stab_gammas;
  std::optional<double> stab_rho_hat, stab_eps, stab_delta_q, stab_q;
  std::optional<std::size_t> stab_nq;
  stab->add_option("--gammas", stab_gammas, "file of 0/1 reception bits (default: simulate)");
  stab->add_option("--rho-hat", stab_rho_hat, "spectral-radius estimate");
  stab->add_option("--epsilon", stab_eps, "spectral-radius error radius");
  stab->add_option("--delta-q", stab_delta_q, "channel failure probability");
  stab->add_option("--q", stab_q, "reception rate used when simulating");
  stab->add_option("--nq", stab_nq, "channel samples when simulating")->check(CLI::PositiveNumber);

  auto* fig1 = app.add_subcommand("fig1", "error and bound comparison versus N; writes fig1.csv/fig1.svg");
  auto* fig2 = app.add_subcommand("fig2", "TSPP versus ESPR over N_q; writes fig2.csv/fig2.svg");
  auto* plan = app.add_subcommand("plan", "sample-size planning; prints JSON");
  std::optional<double> plan_eps;
  plan->add_option("--epsilon", plan_eps, "target spectral-radius accuracy");

  for (auto* sc : {sim, est, stab, fig1, fig2, plan}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitError;
  }

  try {
    ExperimentConfig cfg = detail::resolve_config(g);

    if (*sim) {
      const auto trajs =
          detail::simulated_data(cfg, sim_n.value_or(cfg.estimate.trajectories), sim_noiseless);
      if (sim_output == "-") {
        write_trajectories_csv(out, trajs);
      } else {
        std::ostringstream buf;
        write_trajectories_csv(buf, trajs);
        detail::write_file(sim_output, buf.str());
      }
      return kExitOk;
    }

    if (*est) {
      const Method method = est_method ? detail::parse_method(*est_method) : cfg.estimate.method;
      const double delta = est_delta.value_or(cfg.estimate.delta);
      std::vector<Trajectory> trajs;
      if (!est_input.empty()) {
        std::ifstream in(est_input);
        if (!in) throw ConfigError("cannot open '" + est_input + "'");
        trajs = read_trajectories_csv(in);
      } else {
        trajs = detail::simulated_data(cfg, est_n.value_or(cfg.estimate.trajectories),
                                       est_noiseless || cfg.estimate.noiseless);
      }
      const auto tuples = method == Method::pooled ? pool_tuples(trajs) : last_tuples(trajs);
      RhoEstimateReport report = estimate_rho(tuples, delta, method, cfg.system.sigma_w);
      if (method == Method::multi_trajectory) {
        const LtiSystem sys = cfg.system.build();
        attach_data_independent_bound(report, oracle_params(sys, trajs.front().horizon()));
      }
      out << to_json(report).dump(2) << '\n';
      return kExitOk;
    }

    if (*stab) {
      const double rho_hat = stab_rho_hat.value_or(cfg.fig2.rho_hat);
      const double eps = stab_eps.value_or(cfg.fig2.epsilon);
      const double delta_q = stab_delta_q.value_or(cfg.fig2.delta_q);
      ChannelTrace trace;
      if (!stab_gammas.empty()) {
        std::ifstream in(stab_gammas);
        if (!in) throw ConfigError("cannot open '" + stab_gammas + "'");
        trace = read_gammas(in);
      } else {
        const std::size_t nq = stab_nq.value_or(cfg.fig2.nq_grid.back());
        trace = simulate_channel(stab_q.value_or(cfg.fig2.q), nq,
                                 derive_seed(cfg.seed, ExperimentId::stabtest, nq, 0));
      }
      out << to_json(stabilizability_test(rho_hat, eps, trace, delta_q)).dump(2) << '\n';
      return kExitOk;
    }

    const auto out_dir = std::filesystem::path(cfg.out_dir);
    if (*fig1) {
      if (g.runs) cfg.fig1.runs = *g.runs;
      const auto records = run_fig1(cfg);
      detail::write_file(out_dir / "fig1.csv", fig1_csv(records));
      detail::write_file(out_dir / "fig1.svg", fig1_svg(summarize_fig1(records)));
      out << "wrote " << (out_dir / "fig1.csv").string() << " (" << records.size() << " records)\n";
      return kExitOk;
    }

    if (*fig2) {
      if (g.runs) cfg.fig2.runs = *g.runs;
      const auto res = run_fig2(cfg);
      detail::write_file(out_dir / "fig2.csv", fig2_csv(res));
      detail::write_file(out_dir / "fig2.svg", fig2_svg(res));
      out << "wrote " << (out_dir / "fig2.csv").string() << " (" << res.points.size() << " grid points)\n";
      return kExitOk;
    }

    if (*plan) {
      const LtiSystem sys = cfg.system.build();
      const double rho = spectral_radius(sys.A());
      const double eps = plan_eps.value_or(cfg.plan.epsilon);
      bool infeasible = false;
      nlohmann::json j;
      const std::uint64_t nq_min = sample_complexity_nq(cfg.plan.q, rho, cfg.plan.delta_q);
      j["channel"] = {{"q", cfg.plan.q}, {"rho", rho}, {"delta_q", cfg.plan.delta_q}, {"N_q_min", nq_min}};
      try {
        const RhoSamplePlan rp = plan_rho_samples(oracle_params(sys, cfg.horizon), eps, cfg.plan.delta);
        j["rho_estimation"] = {{"epsilon", eps}, {"delta", cfg.plan.delta}, {"N", rp.count},
                               {"N1", rp.n1},    {"N_floor", rp.floor_n},   {"b", rp.b}};
      } catch (const InfeasibleError& e) {
        infeasible = true;
        j["rho_estimation"] = {{"epsilon", eps}, {"delta", cfg.plan.delta}, {"infeasible", e.what()}};
      }
      const std::size_t nq = cfg.plan.n_samples.value_or(nq_min);
      try {
        const TestSamplePlan tp =
            sample_complexity_n_for_test(sys, cfg.horizon, cfg.plan.q, nq, cfg.plan.delta, cfg.plan.delta_q);
        j["stabilizability_test"] = {{"N_q", nq}, {"epsilon", tp.epsilon}, {"b", tp.b}, {"N", tp.trajectories}};
      } catch (const InfeasibleError& e) {
        infeasible = true;
        j["stabilizability_test"] = {{"N_q", nq}, {"infeasible", e.what()}};
      }
      out << j.dump(2) << '\n';
      return infeasible ? kExitInfeasible : kExitOk;
    }
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace specrad::harness
