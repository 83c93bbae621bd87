#pragma once

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "poem.hpp"

namespace poem::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadSpec = 1;
inline constexpr int kExitIo = 2;

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { Libsvm, Synthetic, SyntheticUnbounded, HardF1, HardF2 };

inline std::string_view problem_kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::Libsvm: return "libsvm";
    case ProblemKind::Synthetic: return "synthetic";
    case ProblemKind::SyntheticUnbounded: return "synthetic-unbounded";
    case ProblemKind::HardF1: return "hard-f1";
    case ProblemKind::HardF2: return "hard-f2";
  }
  return "unknown";
}

inline std::optional<ProblemKind> parse_problem_kind(std::string_view s) {
  for (auto k : {ProblemKind::Libsvm, ProblemKind::Synthetic, ProblemKind::SyntheticUnbounded, ProblemKind::HardF1,
                 ProblemKind::HardF2}) {
    if (problem_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Libsvm;
  std::filesystem::path dataset;
  double radius = 1.0;
  std::size_t dim = 10;
  double noise = 0.1;
  std::uint64_t problem_seed = 1;
  double hard_L = 1.0;
  std::size_t hard_T = 100;
};

struct ExperimentSpec {
  ProblemSpec problem;
  Algorithm algorithm = Algorithm::Poem;
  std::size_t T = 10000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  /// POEM: r_eps values. Baselines: the multiplier that replaces 1/L.
  std::vector<double> grid;
  double r_eps = 1e-2;
  std::optional<double> lbar;
  double delta = 0.1;
  std::optional<double> s0;
  std::size_t stride = 1000;
  std::filesystem::path out = "out";
  std::size_t threads = 0;
  Averaging averaging = Averaging::Uniform;
  TpgeSmoothing tpge_mu = TpgeSmoothing::InverseT;
  std::string command_line;
};

using AnyProblem = std::variant<HingeLossProblem, SyntheticNormProblem, HardInstance>;

inline void validate(const ExperimentSpec& spec) {
  if (spec.seeds.empty()) throw SpecError("at least one seed is required");
  if (spec.T == 0) throw SpecError("T must be >= 1");
  if (spec.stride == 0) throw SpecError("stride must be >= 1");
  if (!(spec.problem.radius > 0.0)) throw SpecError("radius must be positive");
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) throw SpecError("delta must lie in (0, 1)");
  for (double g : spec.grid) {
    if (!(g > 0.0)) throw SpecError("grid values must be positive");
  }
  if (!(spec.r_eps > 0.0)) throw SpecError("r_eps must be positive");
  if (spec.problem.kind == ProblemKind::Libsvm && spec.problem.dataset.empty()) {
    throw SpecError("--dataset is required for libsvm problems");
  }
  if (spec.algorithm == Algorithm::Rsnso && !spec.s0) throw SpecError("rsnso needs --s0");
  if (spec.algorithm == Algorithm::FixedSchedule) throw SpecError("unsupported algorithm 'fixed'");
}

inline AnyProblem build_problem(const ProblemSpec& p) {
  switch (p.kind) {
    case ProblemKind::Libsvm: {
      if (!std::filesystem::exists(p.dataset)) throw IoError("dataset not found: " + p.dataset.string());
      try {
        return make_hinge_svm(load_libsvm(p.dataset), p.radius);
      } catch (const ParseError& e) {
        throw IoError(p.dataset.string() + ": " + e.what());
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
    }
    case ProblemKind::Synthetic:
    case ProblemKind::SyntheticUnbounded: {
      SyntheticOptions opts;
      opts.radius = p.radius;
      opts.bounded = p.kind == ProblemKind::Synthetic;
      return make_synthetic_known_optimum(p.dim, p.noise, p.problem_seed, opts);
    }
    case ProblemKind::HardF1:
    case ProblemKind::HardF2:
      if (p.hard_T < 2) throw SpecError("hard instance needs --hard-T >= 2");
      return make_hard_instance(p.kind == ProblemKind::HardF1 ? HardFunction::F1 : HardFunction::F2, p.hard_L,
                                p.hard_T, p.dim);
  }
  throw SpecError("unknown problem kind");
}

/// Grid values actually run: POEM defaults to the single r_eps, baselines to 1/L.
inline std::vector<double> effective_grid(const ExperimentSpec& spec, double problem_L) {
  if (!spec.grid.empty()) return spec.grid;
  const bool poem_like = spec.algorithm == Algorithm::Poem || spec.algorithm == Algorithm::PoemUnbounded;
  if (poem_like) return {spec.r_eps};
  if (!(problem_L > 0.0)) throw SpecError("problem Lipschitz constant is zero; pass --grid");
  return {1.0 / problem_L};
}

struct RunOutcome {
  Trace trace;
  Vector output;
  Vector last;
  std::optional<double> f_output;
  std::optional<double> f_last;
};

template <class P>
Vector initial_point(const P& problem) {
  if constexpr (std::is_same_v<P, HardInstance>) {
    return Vector::ones(problem.dimension());
  } else {
    return Vector(problem.dimension());
  }
}

template <class P>
RunOutcome run_single(const P& problem, const ExperimentSpec& spec, double param, std::uint64_t seed,
                      std::size_t objective_stride) {
  RngStream rng(seed);
  const Vector x0 = initial_point(problem);
  const std::size_t d = problem.dimension();
  RunOutcome out;
  switch (spec.algorithm) {
    case Algorithm::Poem:
    case Algorithm::PoemUnbounded: {
      RunOptions opts;
      opts.objective_stride = objective_stride;
      PoemResult res;
      if (spec.algorithm == Algorithm::Poem) {
        // Grid values past the diameter are clamped; the manifest records it.
        const double D = problem.domain().diameter();
        res = poem_run(problem, x0, std::isfinite(D) ? std::min(param, D) : param, spec.T, rng, opts);
      } else {
        const double Lbar = spec.lbar.value_or(problem.lipschitz());
        res = poem_unbounded_run(problem, x0, param, spec.T, spec.delta, Lbar, rng, opts);
      }
      out.trace = std::move(res.trace);
      out.output = std::move(res.output);
      out.last = res.state.x;
      break;
    }
    case Algorithm::Tpbco:
    case Algorithm::Tpge:
    case Algorithm::Rsnso: {
      const double L_eff = 1.0 / param;
      Schedule schedule;
      if (spec.algorithm == Algorithm::Rsnso) {
        schedule = rsnso_schedule(*spec.s0, L_eff, spec.T, d);
      } else {
        const double D = problem.domain().diameter();
        if (!std::isfinite(D)) throw SpecError(std::string(algorithm_name(spec.algorithm)) + " needs a bounded domain");
        schedule = spec.algorithm == Algorithm::Tpbco ? tpbco_schedule(D, L_eff, spec.T, d)
                                                      : tpge_schedule(D, L_eff, d, spec.tpge_mu);
      }
      SgdOptions opts;
      opts.averaging = spec.averaging;
      opts.objective_stride = objective_stride;
      if (spec.averaging == Averaging::PoemWeighted) opts.rbar_floor = spec.r_eps;
      SgdResult res = projected_sgd_fixed(problem, x0, schedule, spec.T, rng, opts);
      out.trace = std::move(res.trace);
      out.output = std::move(res.output);
      out.last = std::move(res.last);
      break;
    }
    case Algorithm::FixedSchedule: throw SpecError("unsupported algorithm 'fixed'");
  }
  out.f_output = problem.objective(out.output);
  out.f_last = problem.objective(out.last);
  return out;
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
  return s;
}

inline std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline void write_manifest(const ExperimentSpec& spec, std::string_view command, const std::vector<double>& grid,
                           double problem_L, std::size_t dimension, double diameter) {
  auto f = open_out(spec.out / "manifest.txt");
  f << "version = " << kVersion << '\n'
    << "command = " << command << '\n'
    << "algorithm = " << algorithm_name(spec.algorithm) << '\n'
    << "problem = " << problem_kind_name(spec.problem.kind) << '\n';
  if (spec.problem.kind == ProblemKind::Libsvm) f << "dataset = " << spec.problem.dataset.string() << '\n';
  f << "dimension = " << dimension << '\n'
    << "radius = " << format_real(spec.problem.radius) << '\n'
    << "lipschitz = " << format_real(problem_L) << '\n'
    << "T = " << spec.T << '\n'
    << "seeds = " << join(spec.seeds) << '\n'
    << "grid = " << join(grid) << '\n'
    << "stride = " << spec.stride << '\n'
    << "delta = " << format_real(spec.delta) << '\n';
  if (spec.algorithm == Algorithm::Poem && std::isfinite(diameter) &&
      std::any_of(grid.begin(), grid.end(), [&](double v) { return v > diameter; })) {
    f << "r_eps_clamped_to = " << format_real(diameter) << '\n';
  }
  if (spec.lbar) f << "lbar = " << format_real(*spec.lbar) << '\n';
  if (spec.s0) f << "s0 = " << format_real(*spec.s0) << '\n';
  f << "aggregation = median over seeds\n";
  if (!spec.command_line.empty()) f << "argv = " << spec.command_line << '\n';
  if (!f) throw IoError("failed writing manifest");
}

struct Job {
  std::size_t grid_index;
  std::size_t seed_index;
};

inline std::vector<Job> jobs_for(std::size_t grid_size, std::size_t seed_count) {
  std::vector<Job> jobs;
  for (std::size_t g = 0; g < grid_size; ++g) {
    for (std::size_t s = 0; s < seed_count; ++s) jobs.push_back({g, s});
  }
  return jobs;
}

/// Runs every (grid, seed) job in the pool; collects failures instead of aborting.
template <class Fn>
int run_jobs(const ExperimentSpec& spec, const std::vector<double>& grid, const std::vector<Job>& jobs, Fn&& fn,
             std::ostream& err) {
  std::mutex mtx;
  std::vector<std::string> failures;
  int code = kExitOk;
  parallel_for(jobs.size(), spec.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    try {
      fn(job);
    } catch (const std::exception& e) {
      std::lock_guard lock(mtx);
      failures.push_back(fmt::format("seed={} grid={}: {}", spec.seeds[job.seed_index],
                                     format_real(grid[job.grid_index]), e.what()));
      code = std::max(code, dynamic_cast<const IoError*>(&e) ? kExitIo : kExitBadSpec);
    }
  });
  std::sort(failures.begin(), failures.end());
  for (const auto& f : failures) err << "failed run " << f << '\n';
  return code;
}

inline std::string run_file_name(const ExperimentSpec& spec, std::size_t grid_index, std::uint64_t seed) {
  return fmt::format("{}_p{}_seed{}.csv", algorithm_name(spec.algorithm), grid_index, seed);
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadSpec;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadSpec;
  }
}

/// One trace CSV per (seed, grid point) with the exact objective every `stride` steps.
inline int cmd_run(const ExperimentSpec& spec, std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    validate(spec);
    const AnyProblem problem = build_problem(spec.problem);
    return std::visit(
        [&](const auto& p) {
          const auto grid = effective_grid(spec, p.lipschitz());
          ensure_dir(spec.out);
          write_manifest(spec, "run", grid, p.lipschitz(), p.dimension(), p.domain().diameter());
          return run_jobs(
              spec, grid, jobs_for(grid.size(), spec.seeds.size()),
              [&](const Job& job) {
                const std::uint64_t seed = spec.seeds[job.seed_index];
                RunOutcome o = run_single(p, spec, grid[job.grid_index], seed, spec.stride);
                auto f = open_out(spec.out / run_file_name(spec, job.grid_index, seed));
                write_trace_csv(f, o.trace, spec.stride);
                if (!f) throw IoError("failed writing trace");
              },
              err);
        },
        problem);
  });
}

/// Summary CSV with one row per (algorithm, grid value, seed).
inline int cmd_sweep(const ExperimentSpec& spec, std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    validate(spec);
    if (spec.grid.empty()) throw SpecError("sweep needs a nonempty --grid");
    const AnyProblem problem = build_problem(spec.problem);
    return std::visit(
        [&](const auto& p) {
          const auto& grid = spec.grid;
          ensure_dir(spec.out);
          write_manifest(spec, "sweep", grid, p.lipschitz(), p.dimension(), p.domain().diameter());
          const auto jobs = jobs_for(grid.size(), spec.seeds.size());
          std::vector<std::optional<RunOutcome>> results(jobs.size());
          const int code = run_jobs(
              spec, grid, jobs,
              [&](const Job& job) {
                const std::size_t slot = job.grid_index * spec.seeds.size() + job.seed_index;
                RunOutcome o = run_single(p, spec, grid[job.grid_index], spec.seeds[job.seed_index], 0);
                o.trace.rows.clear();
                results[slot] = std::move(o);
              },
              err);
          auto f = open_out(spec.out / "summary.csv");
          f << "algorithm,param,seed,f_output,f_last\n";
          for (std::size_t i = 0; i < jobs.size(); ++i) {
            if (!results[i]) continue;
            f << algorithm_name(spec.algorithm) << ',' << format_real(grid[jobs[i].grid_index]) << ','
              << spec.seeds[jobs[i].seed_index] << ',' << format_optional(results[i]->f_output) << ','
              << format_optional(results[i]->f_last) << '\n';
          }
          if (!f) throw IoError("failed writing summary");
          return code;
        },
        problem);
  });
}

/// Long-format (r_eps, seed, t, eta) rows at t % stride == 0.
inline int cmd_stepsize_trace(const ExperimentSpec& spec, std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    validate(spec);
    if (spec.algorithm != Algorithm::Poem) throw SpecError("stepsize-trace requires --algo poem");
    const AnyProblem problem = build_problem(spec.problem);
    return std::visit(
        [&](const auto& p) {
          const auto grid = effective_grid(spec, p.lipschitz());
          ensure_dir(spec.out);
          write_manifest(spec, "stepsize-trace", grid, p.lipschitz(), p.dimension(), p.domain().diameter());
          const auto jobs = jobs_for(grid.size(), spec.seeds.size());
          std::vector<std::string> blocks(jobs.size());
          const int code = run_jobs(
              spec, grid, jobs,
              [&](const Job& job) {
                const std::uint64_t seed = spec.seeds[job.seed_index];
                RunOutcome o = run_single(p, spec, grid[job.grid_index], seed, 0);
                std::string block;
                for (const auto& row : o.trace.rows) {
                  if (row.t % spec.stride != 0) continue;
                  block += fmt::format("{},{},{},{}\n", format_real(grid[job.grid_index]), seed, row.t,
                                       format_real(row.eta));
                }
                blocks[job.grid_index * spec.seeds.size() + job.seed_index] = std::move(block);
              },
              err);
          auto f = open_out(spec.out / "stepsize.csv");
          f << "r_eps,seed,t,eta\n";
          for (const auto& b : blocks) f << b;
          if (!f) throw IoError("failed writing step sizes");
          return code;
        },
        problem);
  });
}

}  // namespace poem::bench
