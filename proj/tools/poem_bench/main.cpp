#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "commands.hpp"

namespace {

using poem::bench::ExperimentSpec;

void add_common(CLI::App& cmd, ExperimentSpec& spec, std::string& problem, std::string& algo, std::string& averaging,
                std::string& tpge_mu, double& lbar, double& s0) {
  cmd.add_option("--problem", problem, "libsvm | synthetic | synthetic-unbounded | hard-f1 | hard-f2")
      ->capture_default_str();
  cmd.add_option("--dataset", spec.problem.dataset, "LIBSVM file (.gz accepted)");
  cmd.add_option("--radius", spec.problem.radius, "ball radius")->capture_default_str();
  cmd.add_option("--dim", spec.problem.dim, "dimension of synthetic and hard problems")->capture_default_str();
  cmd.add_option("--noise", spec.problem.noise, "noise scale of the synthetic problem")->capture_default_str();
  cmd.add_option("--problem-seed", spec.problem.problem_seed, "seed that places the synthetic optimum")
      ->capture_default_str();
  cmd.add_option("--hard-L", spec.problem.hard_L, "scale of the hard instance")->capture_default_str();
  cmd.add_option("--hard-T", spec.problem.hard_T, "horizon parameter of the hard instance")->capture_default_str();
  cmd.add_option("--algo", algo, "poem | poem-unbounded | tpbco | tpge | rsnso")->capture_default_str();
  cmd.add_option("-T", spec.T, "iterations")->capture_default_str();
  cmd.add_option("--seeds", spec.seeds, "comma-separated seeds")->delimiter(',')->capture_default_str();
  cmd.add_option("--r-eps", spec.r_eps, "initial movement")->capture_default_str();
  cmd.add_option("--lbar", lbar, "Lipschitz overestimate for poem-unbounded");
  cmd.add_option("--delta", spec.delta, "confidence level for poem-unbounded")->capture_default_str();
  cmd.add_option("--s0", s0, "initial distance to the optimum (rsnso)");
  cmd.add_option("--grid", spec.grid, "r_eps values (poem) or 1/L multipliers (baselines)")->delimiter(',');
  cmd.add_option("--stride", spec.stride, "trace thinning stride")->capture_default_str();
  cmd.add_option("--out", spec.out, "output directory")->capture_default_str();
  cmd.add_option("--threads", spec.threads, "worker threads, 0 = hardware");
  cmd.add_option("--averaging", averaging, "baseline output: uniform | last | weighted")->capture_default_str();
  cmd.add_option("--tpge-mu", tpge_mu, "tpge smoothing: inverse-t | inverse-d2t2")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeroth-order optimization benchmark runner"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file supplying any flag");
  app.set_version_flag("--version", std::string(poem::kVersion));

  ExperimentSpec spec;
  std::string problem = "libsvm";
  std::string algo = "poem";
  std::string averaging = "uniform";
  std::string tpge_mu = "inverse-t";
  double lbar = 0.0;
  double s0 = 0.0;

  auto* run = app.add_subcommand("run", "one trace CSV per (seed, grid point)");
  auto* sweep = app.add_subcommand("sweep", "summary CSV of final objectives over a grid");
  auto* steps = app.add_subcommand("stepsize-trace", "long-format step sizes across r_eps values");
  add_common(app, spec, problem, algo, averaging, tpge_mu, lbar, s0);
  for (auto* cmd : {run, sweep, steps}) cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : poem::bench::kExitBadSpec;
  }

  const auto* active = app.get_subcommands().front();
  const auto kind = poem::bench::parse_problem_kind(problem);
  const auto alg = poem::parse_algorithm(algo);
  const std::map<std::string, poem::Averaging> averagings{
      {"uniform", poem::Averaging::Uniform}, {"last", poem::Averaging::Last}, {"weighted", poem::Averaging::PoemWeighted}};
  if (!kind || !alg || !averagings.count(averaging) || (tpge_mu != "inverse-t" && tpge_mu != "inverse-d2t2")) {
    std::cerr << "error: unknown --problem, --algo, --averaging or --tpge-mu value\n";
    return poem::bench::kExitBadSpec;
  }
  spec.problem.kind = *kind;
  spec.algorithm = *alg;
  spec.averaging = averagings.at(averaging);
  spec.tpge_mu = tpge_mu == "inverse-t" ? poem::TpgeSmoothing::InverseT : poem::TpgeSmoothing::InverseD2T2;
  if (app.count("--lbar")) spec.lbar = lbar;
  if (app.count("--s0")) spec.s0 = s0;
  for (int i = 0; i < argc; ++i) spec.command_line += (i ? " " : "") + std::string(argv[i]);

  if (active == run) return poem::bench::cmd_run(spec);
  if (active == sweep) return poem::bench::cmd_sweep(spec);
  return poem::bench::cmd_stepsize_trace(spec);
}
