#include "contagion/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "contagion/analysis.hpp"
#include "contagion/config.hpp"
#include "contagion/csv_io.hpp"
#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"
#include "contagion/optimizer.hpp"
#include "contagion/parallel.hpp"
#include "contagion/process.hpp"
#include "contagion/rng.hpp"
#include "contagion/stats.hpp"
#include "contagion/valuation.hpp"

namespace contagion {

namespace {

namespace fs = std::filesystem;

struct RunContext {
  ScenarioConfig cfg;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 0;

  std::string header() const {
    return artifact_header(cfg.config_hash, seed);
  }
  std::string path(const std::string& name) const {
    return (fs::path(out_dir) / name).string();
  }
};

RunContext make_context(const RunOptions& options) {
  RunContext ctx;
  ctx.cfg = load_scenario_config(options.config_path);
  ctx.out_dir = options.out_dir;
  ctx.seed = options.seed_override.value_or(ctx.cfg.master_seed);
  ctx.workers = options.workers;
  fs::create_directories(ctx.out_dir);
  return ctx;
}

Policy constant_policy(const RunContext& ctx) {
  if (!ctx.cfg.policy_u_set)
    throw ConfigError("missing key run.policy_u (constant policy level)");
  return Policy::constant(ctx.cfg.policy_u);
}

int cmd_simulate(const RunContext& ctx) {
  const ModelParams& params = ctx.cfg.model;
  for (std::size_t k = 0; k < ctx.cfg.sim_paths; ++k) {
    const PathRecord path =
        simulate_exact(params, derive_stream(ctx.seed, k));
    char name[32];
    std::snprintf(name, sizeof(name), "path_%04zu.csv", k);
    write_path_csv(ctx.path(name), params, path, ctx.header());
  }

  // Time-change diagnostic: compensator increments between claims, pooled by
  // gluing each path's censored tail onto the next path.
  const std::vector<double> increments = pooled_time_change_sample(
      params, ctx.seed ^ 0x7463ULL, ctx.cfg.timechange_min_claims, 400000);
  const KsResult ks = ks_test_exponential(increments);
  {
    std::ofstream out(ctx.path("timechange_summary.csv"), std::ios::binary);
    out << ctx.header() << "\n";
    out << "n_claims,ks_statistic,p_value\n";
    out << increments.size() << ',' << format_float(ks.statistic) << ','
        << format_float(ks.p_value) << "\n";
  }
  std::cout << "simulate: wrote " << ctx.cfg.sim_paths << " paths; time-change"
            << " KS statistic " << ks.statistic << " (p=" << ks.p_value
            << ", n=" << increments.size() << ")\n";
  return 0;
}

PhiTable estimate_phi_grid(const RunContext& ctx, const Policy& policy) {
  const auto ts = ctx.cfg.t_grid();
  const auto ls = ctx.cfg.lambda_grid();
  PhiTable table;
  table.phi = GridTable(ts, ls, 1.0);
  table.stderr_ = GridTable(ts, ls, 0.0);
  parallel_for(
      ts.size() * ls.size(),
      [&](std::size_t cell) {
        const std::size_t i = cell / ls.size();
        const std::size_t j = cell % ls.size();
        const Estimate est = estimate_phi(
            ctx.cfg.model, ts[i], ls[j], policy, ctx.cfg.contract,
            ctx.cfg.principle, ctx.cfg.n_paths, derive_stream(ctx.seed, i),
            /*workers=*/1);
        table.phi.at(i, j) = est.mean;
        table.stderr_.at(i, j) = est.stderr_;
      },
      ctx.workers);
  return table;
}

int cmd_phi(const RunContext& ctx) {
  const Policy policy = constant_policy(ctx);
  const PhiTable table = estimate_phi_grid(ctx, policy);
  write_phi_csv(ctx.path("phi.csv"), table, ctx.header());
  double lo = table.phi.values()[0], hi = lo;
  for (double v : table.phi.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::cout << "phi: table " << table.phi.nt() << "x" << table.phi.nl()
            << " under constant u=" << ctx.cfg.policy_u << ", range [" << lo
            << ", " << hi << "]\n";
  return 0;
}

PolicyIterationResult run_policy_iteration(const RunContext& ctx,
                                           const ModelParams& params) {
  IterationGrids grids{ctx.cfg.t_grid(), ctx.cfg.lambda_grid()};
  McConfig mc;
  mc.n_paths = ctx.cfg.n_paths;
  mc.master_seed = ctx.seed;
  mc.workers = ctx.workers;
  mc.policy_tol = ctx.cfg.policy_tol;
  mc.max_iterations = ctx.cfg.max_iterations;
  return policy_iteration(params, ctx.cfg.contract, ctx.cfg.principle, grids,
                          mc);
}

void write_diagnostics(const RunContext& ctx,
                       const PolicyIterationResult& result) {
  std::ofstream out(ctx.path("diagnostics.jsonl"), std::ios::binary);
  out << "{\"config_hash\":\"" << std::hex << ctx.cfg.config_hash << std::dec
      << "\",\"seed\":" << ctx.seed << "}\n";
  for (std::size_t k = 0; k < result.sup_deltas.size(); ++k)
    out << "{\"iteration\":" << (k + 1)
        << ",\"sup_delta\":" << format_float(result.sup_deltas[k]) << "}\n";
  out << "{\"converged\":" << (result.converged ? "true" : "false")
      << ",\"iterations\":" << result.iterations << "}\n";
}

int cmd_optimize(const RunContext& ctx) {
  const PolicyIterationResult result =
      run_policy_iteration(ctx, ctx.cfg.model);
  write_policy_csv(ctx.path("policy.csv"), result.policy, ctx.header());
  write_phi_csv(ctx.path("phi.csv"), result.phi, ctx.header());
  write_diagnostics(ctx, result);
  std::cout << "optimize: " << (result.converged ? "converged" : "NOT converged")
            << " after " << result.iterations << " iteration(s); last sup-delta "
            << (result.sup_deltas.empty() ? 0.0 : result.sup_deltas.back())
            << "\n";
  return 0;
}

/// Monotonicity precondition gate: the sufficient-condition margins over a
/// sweep of constant policies, or (since the condition is only sufficient)
/// coupled monotonicity probes all nonnegative within 3 paired stderr.
bool monotonicity_gate(const RunContext& ctx, const ModelParams& params,
                       StranaReport* worst_report) {
  const auto& contract = ctx.cfg.contract;
  const auto t_probe = linspace(0.0, params.horizon,
                                std::max<std::size_t>(ctx.cfg.probe_points, 2));
  bool strana_pass = true;
  double worst = std::numeric_limits<double>::infinity();
  const auto u_values = linspace(contract.u_min(), contract.u_hi(),
                                 std::max<std::size_t>(ctx.cfg.check_u_points, 2));
  for (double u : u_values) {
    const StranaReport report =
        strana_check(params, Policy::constant(u), ctx.cfg.principle, contract,
                     t_probe);
    if (report.min_margin < worst) {
      worst = report.min_margin;
      if (worst_report) *worst_report = report;
    }
    strana_pass = strana_pass && report.pass;
  }
  if (strana_pass) return true;

  const double u_mid = 0.5 * (contract.u_min() + contract.u_hi());
  const auto ls = linspace(ctx.cfg.lambda_min, ctx.cfg.lambda_max,
                           std::max<std::size_t>(ctx.cfg.probe_points, 2));
  for (double t : t_probe) {
    if (t >= params.horizon) continue;
    for (std::size_t j = 0; j + 1 < ls.size(); ++j) {
      const PairedEstimate est = coupled_monotonicity(
          params, t, ls[j], ls[j + 1], Policy::constant(u_mid), contract,
          ctx.cfg.principle, ctx.cfg.n_paths, derive_stream(ctx.seed, 3000 + j),
          ctx.workers);
      if (est.mean < -3.0 * est.stderr_) return false;
    }
  }
  return true;
}

int cmd_compare(const RunContext& ctx) {
  const ModelParams& params = ctx.cfg.model;
  ModelParams cox_params = params;
  cox_params.excitation = SelfExcitation::zero();  // the shot-noise twin

  StranaReport gate_report;
  const bool gate = monotonicity_gate(ctx, params, &gate_report);
  const char* label = gate ? "verified" : "unverified-precondition";

  const PolicyIterationResult contagion = run_policy_iteration(ctx, params);
  auto cox_curve = [&](double t) {
    return cox_optimal(t, ctx.cfg.contract, ctx.cfg.principle, cox_params);
  };
  // FOC root tolerance on top of the configured comparison tolerance.
  const double tol = ctx.cfg.compare_tol + 1e-10;
  const ComparisonReport report =
      compare_policies(contagion.policy, cox_curve, tol);

  {
    std::ofstream out(ctx.path("comparison.csv"), std::ios::binary);
    out << ctx.header() << "\n";
    out << "# precondition=" << label << "\n";
    out << "t,lambda,u_star,u_cox,violation\n";
    for (const auto& cell : report.cells)
      out << format_float(cell.t) << ',' << format_float(cell.lam) << ','
          << format_float(cell.u_star) << ',' << format_float(cell.u_cox)
          << ',' << (cell.violation ? 1 : 0) << "\n";
  }
  write_policy_csv(ctx.path("policy.csv"), contagion.policy, ctx.header());
  write_diagnostics(ctx, contagion);
  std::cout << "compare: precondition " << label << " (min margin "
            << gate_report.min_margin << "); violations " << report.violations
            << " of " << report.cells.size() << " cells at tol " << tol
            << "\n";
  return 0;
}

int cmd_check(const RunContext& ctx) {
  const ModelParams& params = ctx.cfg.model;
  const Policy policy = constant_policy(ctx);
  const auto t_probe =
      linspace(0.0, params.horizon, std::max<std::size_t>(ctx.cfg.probe_points, 2));
  const StranaReport report =
      strana_check(params, policy, ctx.cfg.principle, ctx.cfg.contract, t_probe);
  write_strana_csv(ctx.path("strana.csv"), report, ctx.header());

  // Coupled monotonicity probes across the lambda grid.
  const auto ls = linspace(ctx.cfg.lambda_min, ctx.cfg.lambda_max,
                           std::max<std::size_t>(ctx.cfg.probe_points, 2));
  std::ofstream out(ctx.path("monotonicity.csv"), std::ios::binary);
  out << ctx.header() << "\n";
  out << "t,lambda1,lambda2,diff,stderr,pass\n";
  std::size_t probe_failures = 0;
  for (double t : t_probe) {
    if (t >= params.horizon) continue;
    for (std::size_t j = 0; j + 1 < ls.size(); ++j) {
      const PairedEstimate est = coupled_monotonicity(
          params, t, ls[j], ls[j + 1], policy, ctx.cfg.contract,
          ctx.cfg.principle, ctx.cfg.n_paths, derive_stream(ctx.seed, j),
          ctx.workers);
      const bool ok = est.mean >= -3.0 * est.stderr_;
      if (!ok) ++probe_failures;
      out << format_float(t) << ',' << format_float(ls[j]) << ','
          << format_float(ls[j + 1]) << ',' << format_float(est.mean) << ','
          << format_float(est.stderr_) << ',' << (ok ? 1 : 0) << "\n";
    }
  }
  std::cout << "check: strana min margin " << report.min_margin << " ("
            << (report.pass ? "pass" : "FAIL") << "); monotonicity probe "
            << "failures " << probe_failures << "\n";
  return 0;
}

}  // namespace

int run_command(const std::string& command, const RunOptions& options) {
  try {
    const RunContext ctx = make_context(options);
    if (command == "simulate") return cmd_simulate(ctx);
    if (command == "phi") return cmd_phi(ctx);
    if (command == "optimize") return cmd_optimize(ctx);
    if (command == "compare") return cmd_compare(ctx);
    if (command == "check") return cmd_check(ctx);
    std::cerr << "unknown command: " << command << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedPolicyError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace contagion
