#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "contagion/analysis.hpp"
#include "contagion/errors.hpp"
#include "contagion/optimizer.hpp"
#include "contagion/process.hpp"
#include "contagion/runner.hpp"
#include "contagion/valuation.hpp"

namespace py = pybind11;
using namespace contagion;

namespace {

SelfExcitation make_excitation(const std::string& form, double a) {
  if (form == "zero") return SelfExcitation::zero();
  if (form == "constant") return SelfExcitation::constant(a);
  if (form == "linear") return SelfExcitation::linear(a);
  throw ConfigError("unknown self-excitation form: " + form);
}

py::dict grid_to_dict(const GridTable& g) {
  py::dict out;
  out["t_grid"] = g.t_grid();
  out["lambda_grid"] = g.lambda_grid();
  std::vector<std::vector<double>> rows(g.nt());
  for (std::size_t i = 0; i < g.nt(); ++i) {
    rows[i].resize(g.nl());
    for (std::size_t j = 0; j < g.nl(); ++j) rows[i][j] = g.at(i, j);
  }
  out["values"] = rows;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dynamic contagion reinsurance toolkit (C++ core)";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

  py::class_<MarkDistribution>(m, "MarkDistribution")
      .def_static("uniform", &MarkDistribution::uniform, py::arg("a"),
                  py::arg("b"))
      .def_static("truncated_exponential",
                  &MarkDistribution::truncated_exponential, py::arg("rate"),
                  py::arg("cap"), py::arg("allow_unbounded") = false)
      .def_static("point_mass", &MarkDistribution::point_mass, py::arg("z0"))
      .def_property_readonly("mean", &MarkDistribution::mean)
      .def_property_readonly("second_moment", &MarkDistribution::second_moment)
      .def("mgf", &MarkDistribution::mgf, py::arg("a"))
      .def("cdf", &MarkDistribution::cdf, py::arg("z"))
      .def("__repr__", &MarkDistribution::describe);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double alpha, double beta, double lambda0, double rho,
                       double r, double eta, double horizon,
                       const MarkDistribution& claim_dist,
                       const MarkDistribution& ext_dist,
                       const std::string& excitation, double excitation_coeff,
                       bool unsafe_moments) {
             ModelParams p;
             p.alpha = alpha;
             p.beta = beta;
             p.lambda0 = lambda0;
             p.rho = rho;
             p.r = r;
             p.eta = eta;
             p.horizon = horizon;
             p.claim_dist = claim_dist;
             p.ext_dist = ext_dist;
             p.excitation = make_excitation(excitation, excitation_coeff);
             p.unsafe_moments = unsafe_moments;
             p.validate();
             return p;
           }),
           py::arg("alpha"), py::arg("beta"), py::arg("lambda0"),
           py::arg("rho"), py::arg("r"), py::arg("eta"), py::arg("horizon"),
           py::arg("claim_dist") = MarkDistribution::uniform(0.0, 1.0),
           py::arg("ext_dist") = MarkDistribution::uniform(0.0, 1.0),
           py::arg("excitation") = "zero", py::arg("excitation_coeff") = 0.0,
           py::arg("unsafe_moments") = false)
      .def_readonly("alpha", &ModelParams::alpha)
      .def_readonly("beta", &ModelParams::beta)
      .def_readonly("lambda0", &ModelParams::lambda0)
      .def_readonly("rho", &ModelParams::rho)
      .def_readonly("r", &ModelParams::r)
      .def_readonly("eta", &ModelParams::eta)
      .def_readonly("horizon", &ModelParams::horizon);

  py::class_<RetentionContract>(m, "RetentionContract")
      .def_static("proportional", &RetentionContract::proportional)
      .def_static("excess_of_loss", &RetentionContract::excess_of_loss,
                  py::arg("u_cap"))
      .def_static("limited_xl", &RetentionContract::limited_xl,
                  py::arg("coverage"), py::arg("u_cap"))
      .def("retention", &RetentionContract::retention, py::arg("z"),
           py::arg("u"))
      .def("retention_deriv", &RetentionContract::retention_deriv,
           py::arg("z"), py::arg("u"))
      .def_property_readonly("u_min", &RetentionContract::u_min)
      .def_property_readonly("u_cap", &RetentionContract::u_cap)
      .def("__repr__", &RetentionContract::describe);

  py::class_<PremiumPrinciple>(m, "PremiumPrinciple")
      .def_static("evp", &PremiumPrinciple::evp, py::arg("theta_i"),
                  py::arg("theta_r"))
      .def_static("vpp", &PremiumPrinciple::vpp, py::arg("eta_i"),
                  py::arg("eta_r"))
      .def_static("mvp", &PremiumPrinciple::mvp, py::arg("theta_i"),
                  py::arg("eta_i"), py::arg("theta_r"), py::arg("eta_r"))
      .def("__repr__", &PremiumPrinciple::describe);

  py::class_<Policy>(m, "Policy")
      .def_static("constant", &Policy::constant, py::arg("u"))
      .def_static("time_curve", &Policy::time_curve, py::arg("t_knots"),
                  py::arg("u_values"))
      .def("value", &Policy::value, py::arg("t"), py::arg("lam"));

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("mean", &Estimate::mean)
      .def_readonly("stderr", &Estimate::stderr_)
      .def_readonly("n_paths", &Estimate::n_paths)
      .def("__repr__", [](const Estimate& e) {
        return "Estimate(mean=" + std::to_string(e.mean) +
               ", stderr=" + std::to_string(e.stderr_) +
               ", n_paths=" + std::to_string(e.n_paths) + ")";
      });

  m.def(
      "simulate",
      [](const ModelParams& params, std::uint64_t seed) {
        const PathRecord path = simulate_exact(params, seed);
        py::list jumps;
        for (const auto& j : path.jumps)
          jumps.append(py::make_tuple(
              j.time, j.kind == JumpKind::Claim ? "claim" : "external",
              j.mark));
        return jumps;
      },
      py::arg("params"), py::arg("seed"),
      "Exact simulation; returns (time, kind, mark) tuples.");

  m.def("mean_intensity", &mean_intensity, py::arg("params"), py::arg("t"));

  m.def(
      "estimate_phi",
      [](const ModelParams& params, double t, double lam, const Policy& policy,
         const RetentionContract& contract, const PremiumPrinciple& principle,
         std::size_t n_paths, std::uint64_t seed, int workers) {
        return estimate_phi(params, t, lam, policy, contract, principle,
                            n_paths, seed, workers);
      },
      py::arg("params"), py::arg("t"), py::arg("lam"), py::arg("policy"),
      py::arg("contract"), py::arg("principle"), py::arg("n_paths"),
      py::arg("seed"), py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "estimate_phi_q",
      [](const ModelParams& params, double t, double lam, const Policy& policy,
         const RetentionContract& contract, const PremiumPrinciple& principle,
         std::size_t n_paths, std::uint64_t seed, int workers) {
        return estimate_phi_q(params, t, lam, policy, contract, principle,
                              n_paths, seed, workers);
      },
      py::arg("params"), py::arg("t"), py::arg("lam"), py::arg("policy"),
      py::arg("contract"), py::arg("principle"), py::arg("n_paths"),
      py::arg("seed"), py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def("phi_closed_form_poisson", &phi_closed_form_poisson,
        py::arg("params"), py::arg("contract"), py::arg("principle"),
        py::arg("u"), py::arg("t"));

  m.def("value_function", &value_function, py::arg("params"), py::arg("t"),
        py::arg("x"), py::arg("phi_value"));

  m.def("cox_optimal", &cox_optimal, py::arg("t"), py::arg("contract"),
        py::arg("principle"), py::arg("params"));

  m.def(
      "solve_foc",
      [](const std::function<double(double, double, double)>& phi_ratio,
         const RetentionContract& contract, const PremiumPrinciple& principle,
         const ModelParams& params, double t, double lam) {
        FocSpec foc;
        foc.phi_ratio = phi_ratio;
        foc.contract = contract;
        foc.principle = principle;
        foc.params = params;
        const FocSolution sol = solve_foc(foc, t, lam);
        return py::make_tuple(sol.u, to_string(sol.region));
      },
      py::arg("phi_ratio"), py::arg("contract"), py::arg("principle"),
      py::arg("params"), py::arg("t"), py::arg("lam"),
      "Three-region optimal control; returns (u, region).");

  m.def(
      "thresholds",
      [](const std::function<double(double, double, double)>& phi_ratio,
         const RetentionContract& contract, const PremiumPrinciple& principle,
         const ModelParams& params, double t, double lam) {
        FocSpec foc;
        foc.phi_ratio = phi_ratio;
        foc.contract = contract;
        foc.principle = principle;
        foc.params = params;
        const ThresholdReport rep = thresholds(foc, t, lam);
        py::dict out;
        if (rep.theta_f) out["theta_f"] = *rep.theta_f;
        if (rep.theta_n) out["theta_n"] = *rep.theta_n;
        if (rep.theta_l) out["theta_l"] = *rep.theta_l;
        return out;
      },
      py::arg("phi_ratio"), py::arg("contract"), py::arg("principle"),
      py::arg("params"), py::arg("t"), py::arg("lam"));

  m.def(
      "policy_iteration",
      [](const ModelParams& params, const RetentionContract& contract,
         const PremiumPrinciple& principle, std::vector<double> t_grid,
         std::vector<double> lambda_grid, std::size_t n_paths,
         std::uint64_t seed, int workers, double tol, int max_iterations) {
        IterationGrids grids{std::move(t_grid), std::move(lambda_grid)};
        McConfig mc;
        mc.n_paths = n_paths;
        mc.master_seed = seed;
        mc.workers = workers;
        mc.policy_tol = tol;
        mc.max_iterations = max_iterations;
        PolicyIterationResult res;
        {
          py::gil_scoped_release release;
          res = policy_iteration(params, contract, principle, grids, mc);
        }
        py::dict out;
        out["policy"] = grid_to_dict(res.policy.u);
        out["phi"] = grid_to_dict(res.phi.phi);
        out["phi_stderr"] = grid_to_dict(res.phi.stderr_);
        out["sup_deltas"] = res.sup_deltas;
        out["converged"] = res.converged;
        out["iterations"] = res.iterations;
        return out;
      },
      py::arg("params"), py::arg("contract"), py::arg("principle"),
      py::arg("t_grid"), py::arg("lambda_grid"), py::arg("n_paths"),
      py::arg("seed"), py::arg("workers") = 0, py::arg("tol") = 1e-4,
      py::arg("max_iterations") = 50);

  m.def(
      "strana_check",
      [](const ModelParams& params, const Policy& policy,
         const PremiumPrinciple& principle, const RetentionContract& contract,
         std::vector<double> t_grid, double tolerance) {
        const StranaReport rep =
            strana_check(params, policy, principle, contract, t_grid,
                         tolerance);
        py::dict out;
        out["t_grid"] = rep.t_grid;
        out["margins"] = rep.margins;
        out["min_margin"] = rep.min_margin;
        out["pass"] = rep.pass;
        return out;
      },
      py::arg("params"), py::arg("policy"), py::arg("principle"),
      py::arg("contract"), py::arg("t_grid"), py::arg("tolerance") = 1e-9);

  m.def(
      "coupled_monotonicity",
      [](const ModelParams& params, double t, double lam1, double lam2,
         const Policy& policy, const RetentionContract& contract,
         const PremiumPrinciple& principle, std::size_t n_paths,
         std::uint64_t seed) {
        const PairedEstimate est = coupled_monotonicity(
            params, t, lam1, lam2, policy, contract, principle, n_paths,
            seed);
        return py::make_tuple(est.mean, est.stderr_);
      },
      py::arg("params"), py::arg("t"), py::arg("lam1"), py::arg("lam2"),
      py::arg("policy"), py::arg("contract"), py::arg("principle"),
      py::arg("n_paths"), py::arg("seed"),
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "run_scenario",
      [](const std::string& command, const std::string& config_path,
         const std::string& out_dir, int workers,
         std::optional<std::uint64_t> seed) {
        RunOptions opt;
        opt.config_path = config_path;
        opt.out_dir = out_dir;
        opt.workers = workers;
        opt.seed_override = seed;
        return run_command(command, opt);
      },
      py::arg("command"), py::arg("config_path"), py::arg("out_dir"),
      py::arg("workers") = 0, py::arg("seed") = py::none(),
      "Runs a CLI command (simulate|phi|optimize|compare|check); returns the "
      "exit code.");
}
