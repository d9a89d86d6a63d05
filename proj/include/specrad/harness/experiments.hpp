#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "specrad/channel.hpp"
#include "specrad/harness/config.hpp"
#include "specrad/harness/io.hpp"
#include "specrad/ident.hpp"
#include "specrad/matops.hpp"
#include "specrad/parallel.hpp"
#include "specrad/rng.hpp"
#include "specrad/simkit.hpp"
#include "specrad/stabtest.hpp"

namespace specrad::harness {

enum class ExperimentId : std::uint64_t { fig1 = 1, fig2 = 2, simulate = 3, stabtest = 4 };

inline const char* to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::fig1:
      return "fig1";
    case ExperimentId::fig2:
      return "fig2";
    case ExperimentId::simulate:
      return "simulate";
    case ExperimentId::stabtest:
      return "stabtest";
  }
  return "?";
}

// Stream of one run, a pure function of its identifying tuple.
inline RngSeed derive_seed(std::uint64_t master, ExperimentId id, std::uint64_t grid_value, std::uint64_t run) {
  const std::uint64_t h = hash_combine(hash_combine(mix64(static_cast<std::uint64_t>(id)), grid_value), run);
  return {master, h};
}

struct RunKey {
  ExperimentId experiment;
  std::size_t grid_value;
  std::size_t run_index;
};

struct Fig1Record {
  RunKey key;
  RngSeed seed;
  double rho_hat_alg1 = 0.0;
  double err_alg1 = 0.0;
  double bound_f2 = 0.0;
  double rho_hat_alg2 = 0.0;
  double err_alg2 = 0.0;
  double bound_f4 = 0.0;
};

struct Fig2Record {
  RunKey key;
  RngSeed seed;
  StabVerdict verdict;
  bool correct = false;
};

struct Fig2Point {
  std::size_t n_samples = 0;
  double espr = 0.0;
  double tspp = 0.0;
  VerdictConditions conditions;
};

struct Fig2Result {
  std::vector<Fig2Record> records;
  std::vector<Fig2Point> points;
  bool truth_holds = false;
};

/// One fig1 run: simulate N trajectories, estimate with both algorithms on the
/// same data, and attach f2 (data-dependent) and f4 (oracle) bounds.
inline Fig1Record run_fig1_single(const ExperimentConfig& cfg, const LtiSystem& sys, const OracleParams& oracle,
                                  double rho_true, std::size_t trajectories, std::size_t run) {
  Fig1Record rec;
  rec.key = {ExperimentId::fig1, trajectories, run};
  rec.seed = derive_seed(cfg.seed, ExperimentId::fig1, trajectories, run);
  SimOptions opts;
  opts.x0 = cfg.system.x0;
  const auto trajs = simulate_ensemble(sys, cfg.horizon, trajectories, rec.seed, opts);

  const auto pooled = estimate_rho(pool_tuples(trajs), cfg.fig1.delta, Method::pooled, sys.sigma_w());
  rec.rho_hat_alg1 = pooled.rho_hat;
  rec.err_alg1 = std::abs(rho_true - pooled.rho_hat);
  rec.bound_f2 = pooled.bound;

  auto multi = estimate_rho(last_tuples(trajs), cfg.fig1.delta, Method::multi_trajectory, sys.sigma_w());
  attach_data_independent_bound(multi, oracle);
  rec.rho_hat_alg2 = multi.rho_hat;
  rec.err_alg2 = std::abs(rho_true - multi.rho_hat);
  rec.bound_f4 = multi.bound;
  return rec;
}

/// Grid-major, run-minor table of fig1 records; identical for any thread count.
inline std::vector<Fig1Record> run_fig1(const ExperimentConfig& cfg) {
  cfg.validate();
  const LtiSystem sys = cfg.system.build();
  const OracleParams oracle = oracle_params(sys, cfg.horizon);
  const double rho_true = spectral_radius(sys.A());
  const std::size_t runs = cfg.fig1.runs;
  std::vector<Fig1Record> out(cfg.fig1.n_grid.size() * runs);
  parallel_for(out.size(), cfg.threads, [&](std::size_t k) {
    out[k] = run_fig1_single(cfg, sys, oracle, rho_true, cfg.fig1.n_grid[k / runs], k % runs);
  });
  return out;
}

inline bool stabilizability_truth(double q, double rho) { return q > stab_margin_rhs(rho); }

/// TSPP from the oracle conditions and ESPR over independent channel traces.
inline Fig2Result run_fig2(const ExperimentConfig& cfg) {
  cfg.validate();
  const LtiSystem sys = cfg.system.build();
  const double rho_true = spectral_radius(sys.A());
  const SystemTruth truth{cfg.fig2.q, rho_true, spectral_norm(sys.A())};
  const std::size_t runs = cfg.fig2.runs;

  Fig2Result res;
  res.truth_holds = stabilizability_truth(cfg.fig2.q, rho_true);
  const Outcome expected = res.truth_holds ? Outcome::holds : Outcome::does_not_hold;
  res.records.resize(cfg.fig2.nq_grid.size() * runs);
  parallel_for(res.records.size(), cfg.threads, [&](std::size_t k) {
    const std::size_t nq = cfg.fig2.nq_grid[k / runs];
    Fig2Record& rec = res.records[k];
    rec.key = {ExperimentId::fig2, nq, k % runs};
    rec.seed = derive_seed(cfg.seed, ExperimentId::fig2, nq, k % runs);
    const ChannelTrace trace = simulate_channel(cfg.fig2.q, nq, rec.seed);
    rec.verdict = stabilizability_test(cfg.fig2.rho_hat, cfg.fig2.epsilon, trace, cfg.fig2.delta_q);
    rec.correct = rec.verdict.outcome == expected;
  });

  for (std::size_t g = 0; g < cfg.fig2.nq_grid.size(); ++g) {
    Fig2Point pt;
    pt.n_samples = cfg.fig2.nq_grid[g];
    pt.conditions = verdict_conditions(truth, pt.n_samples, cfg.fig2.delta, cfg.fig2.delta_q, cfg.fig2.epsilon);
    pt.tspp = pt.conditions.tspp;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < runs; ++r) correct += res.records[g * runs + r].correct ? 1 : 0;
    pt.espr = static_cast<double>(correct) / static_cast<double>(runs);
    res.points.push_back(pt);
  }
  return res;
}

inline std::string fig1_csv(const std::vector<Fig1Record>& records) {
  std::ostringstream out;
  out << "N,run_idx,rho_hat_alg1,err_alg1,bound_f2,rho_hat_alg2,err_alg2,bound_f4\n";
  for (const auto& r : records) {
    out << r.key.grid_value << ',' << r.key.run_index << ',' << fmt9(r.rho_hat_alg1) << ',' << fmt9(r.err_alg1)
        << ',' << fmt9(r.bound_f2) << ',' << fmt9(r.rho_hat_alg2) << ',' << fmt9(r.err_alg2) << ','
        << fmt9(r.bound_f4) << '\n';
  }
  return out.str();
}

inline std::string fig2_csv(const Fig2Result& res) {
  std::ostringstream out;
  out << "N_q,espr,tspp\n";
  for (const auto& p : res.points) out << p.n_samples << ',' << fmt9(p.espr) << ',' << fmt9(p.tspp) << '\n';
  return out.str();
}

// Linear-interpolation quantile of unsorted data, 0 <= prob <= 1.
inline double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw DomainError("quantile: no data");
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

inline Quartiles quartiles(const std::vector<double>& v) {
  return {quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
}

struct Fig1Summary {
  std::size_t trajectories = 0;
  Quartiles err_alg1, bound_f2, err_alg2, bound_f4;
};

inline std::vector<Fig1Summary> summarize_fig1(const std::vector<Fig1Record>& records) {
  std::vector<Fig1Summary> out;
  std::size_t i = 0;
  while (i < records.size()) {
    const std::size_t n = records[i].key.grid_value;
    std::vector<double> e1, b2, e2, b4;
    for (; i < records.size() && records[i].key.grid_value == n; ++i) {
      e1.push_back(records[i].err_alg1);
      b2.push_back(records[i].bound_f2);
      e2.push_back(records[i].err_alg2);
      b4.push_back(records[i].bound_f4);
    }
    out.push_back({n, quartiles(e1), quartiles(b2), quartiles(e2), quartiles(b4)});
  }
  return out;
}

}  // namespace specrad::harness
