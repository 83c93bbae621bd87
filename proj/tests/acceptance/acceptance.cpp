// Acceptance checks, one per criterion.
//
//   acceptance                 run everything, one PASS/FAIL/SKIP line each
//   acceptance --criterion N   run one; exit 0 pass, 1 fail, 77 skip
//
// Criteria that need the benchmark datasets look in $POEM_DATA_DIR (default:
// <source>/data) and SKIP when a file is missing. Lines marked
// "supplementary" run on generated stand-in data and never decide a result.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../../tools/poem_bench/commands.hpp"
#include "poem.hpp"
#include "support/oracles.hpp"
#include "support/surrogate.hpp"

namespace fs = std::filesystem;
using namespace poem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Pass;
  std::string detail;
  std::vector<std::string> notes;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail), {}}; }

// ---- data lookup ----

fs::path data_dir() {
  if (const char* env = std::getenv("POEM_DATA_DIR"); env && *env) return env;
  return POEM_DEFAULT_DATA_DIR;
}

std::optional<fs::path> find_dataset(const std::string& name) {
  for (const char* suffix : {"", ".gz", ".txt", ".libsvm"}) {
    const fs::path p = data_dir() / (name + suffix);
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

std::optional<HingeLossProblem> mushrooms() {
  const auto path = find_dataset("mushrooms");
  if (!path) return std::nullopt;
  return make_hinge_svm(load_libsvm(*path));
}

HingeLossProblem mushrooms_surrogate() { return make_hinge_svm(oracle::make_mushrooms_like()); }

std::string missing_data(const std::string& name) {
  return fmt::format("{} not found in {} (see data/datasets.txt)", name, data_dir().string());
}

// ---- shared pieces ----

/// Fresh (x, mu, v, xi) draws; returns the estimate norms.
template <class P, class PointFn>
std::vector<double> random_estimate_norms(const P& p, std::size_t n, RngStream& rng, PointFn&& point) {
  std::vector<double> norms;
  norms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector x = point(rng);
    const double mu = std::pow(10.0, -4.0 + 4.0 * rng.uniform01());
    const Vector v = sample_unit_sphere(rng, p.dimension());
    const auto xi = p.sample_noise(rng);
    norms.push_back(norm(finite_difference(p, x, mu, v, xi).g));
  }
  return norms;
}

template <class P>
std::string norm_check(const P& p, const std::string& label, RngStream& rng, bool& ok,
                       std::function<Vector(RngStream&)> point) {
  const auto norms = random_estimate_norms(p, 100000, rng, point);
  const auto r = check_estimate_norm(norms, p.lipschitz(), p.dimension());
  ok = ok && !r.violated;
  return fmt::format("{}: {} violations / {}, max ||g||/(Ld) = {:.4f}", label, r.violations(), norms.size(),
                     r.worst_ratio);
}

std::string smoothing_gap_check(const HingeLossProblem& p, RngStream& rng, bool& ok) {
  std::size_t cases = 0, bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Vector x = oracle::random_point_in_ball(rng, p.dimension(), 1.0);
    const double f = p.objective(x);
    for (double mu : {0.01, 0.1, 1.0}) {
      const auto est = smoothed_value_mc(p, x, mu, 100000, rng);
      const double allowed = p.lipschitz() * mu + 4.0 * est.std_error;
      worst = std::max(worst, std::abs(est.mean - f) / allowed);
      ++cases;
      bad += std::abs(est.mean - f) <= allowed ? 0 : 1;
    }
  }
  ok = ok && bad == 0;
  return fmt::format("{} / {} cases outside L mu + 4 se, worst |fhat - f| / allowance = {:.4f}", bad, cases, worst);
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *lo;
}

struct Sensitivity {
  std::vector<double> poem_medians;
  std::vector<double> tpbco_medians;
};

/// Median final objective over seeds 1..5 per grid value: POEM over r_eps and
/// TPBCO over the multiplier that replaces 1/L. Both start from 0.
Sensitivity sensitivity(const HingeLossProblem& p, std::size_t T) {
  const std::vector<double> grid{1e-6, 1e-4, 1e-2, 1.0};
  const std::size_t seeds = 5;
  const std::size_t d = p.dimension();
  std::vector<double> fp(grid.size() * seeds), ft(grid.size() * seeds);
  parallel_for(grid.size() * seeds, 0, [&](std::size_t job) {
    const double param = grid[job / seeds];
    const std::uint64_t seed = job % seeds + 1;
    RngStream a(seed);
    fp[job] = p.objective(poem_run(p, Vector(d), param, T, a).output);
    RngStream b(seed);
    const auto sched = tpbco_schedule(p.domain().diameter(), 1.0 / param, T, d);
    ft[job] = p.objective(projected_sgd_fixed(p, Vector(d), sched, T, b).output);
  });
  Sensitivity s;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    s.poem_medians.push_back(oracle::median({fp.begin() + g * seeds, fp.begin() + (g + 1) * seeds}));
    s.tpbco_medians.push_back(oracle::median({ft.begin() + g * seeds, ft.begin() + (g + 1) * seeds}));
  }
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt::format("{:.5g}", x);
  return s;
}

struct Coalescence {
  double gap_tenth;
  double gap_end;
};

/// Median over seeds 1..5 of |log eta(1e-4, t) - log eta(1e-2, t)| at t = T/10
/// and at the final step t = T - 1. Both runs of a seed share its stream.
Coalescence coalescence(const HingeLossProblem& p, std::size_t T) {
  const std::size_t seeds = 5;
  std::vector<double> tenth(seeds), end(seeds);
  parallel_for(seeds, 0, [&](std::size_t i) {
    RngStream a(i + 1), b(i + 1);
    const auto ra = poem_run(p, Vector(p.dimension()), 1e-4, T, a);
    const auto rb = poem_run(p, Vector(p.dimension()), 1e-2, T, b);
    auto gap = [&](std::size_t t) { return std::abs(std::log(ra.trace.rows[t].eta) - std::log(rb.trace.rows[t].eta)); };
    tenth[i] = gap(T / 10);
    end[i] = gap(T - 1);
  });
  return {oracle::median(tenth), oracle::median(end)};
}

// ---- criteria ----

Outcome sphere_isotropy() {
  const std::size_t d = 10, n = 200000;
  RngStream rng(101);
  std::vector<double> mean(d, 0.0), second(d * d, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const Vector v = sample_unit_sphere(rng, d);
    for (std::size_t i = 0; i < d; ++i) {
      mean[i] += v[i];
      for (std::size_t j = 0; j < d; ++j) second[i * d + j] += v[i] * v[j];
    }
  }
  const double N = static_cast<double>(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double cov = (second[i * d + j] - mean[i] * mean[j] / N) / (N - 1.0);
      worst = std::max(worst, std::abs(cov - (i == j ? 1.0 / d : 0.0)));
    }
  }
  return pass_if(worst < 5e-3, fmt::format("max |cov - I/10| = {:.3e} (limit 5e-3)", worst));
}

Outcome estimator_norm() {
  RngStream rng(202);
  bool ok = true;
  Outcome out;
  const auto syn = make_synthetic_known_optimum(10, 0.1, 7);
  out.notes.push_back(norm_check(syn, "synthetic-norm", rng, ok,
                                 [](RngStream& r) { return oracle::random_point_in_ball(r, 10, 1.0); }));
  const auto hard = make_hard_instance(HardFunction::F1, 1.0, 100, 10);
  out.notes.push_back(
      norm_check(hard, "hard-f1", rng, ok, [](RngStream& r) { return oracle::random_gaussian(r, 10, 2.0); }));
  const auto mush = mushrooms();
  if (mush) {
    out.notes.push_back(norm_check(*mush, "hinge-mushrooms", rng, ok, [&](RngStream& r) {
      return oracle::random_point_in_ball(r, mush->dimension(), 1.0);
    }));
  } else {
    bool sup_ok = true;
    const auto sur = mushrooms_surrogate();
    out.notes.push_back("supplementary " + norm_check(sur, "hinge-surrogate", rng, sup_ok, [&](RngStream& r) {
                          return oracle::random_point_in_ball(r, sur.dimension(), 1.0);
                        }));
    ok = ok && sup_ok;  // a violation anywhere is a real failure
  }
  if (!ok) return {Status::Fail, "norm bound violated", out.notes};
  if (!mush) return {Status::Skip, missing_data("mushrooms"), out.notes};
  return {Status::Pass, "zero violations on all three problems", out.notes};
}

Outcome estimator_unbiased() {
  const std::size_t d = 20;
  RngStream rng(303);
  const Vector c = oracle::random_gaussian(rng, d);
  const SyntheticLinearProblem p(c, 0.1, Domain::unbounded(d));
  const Vector x = oracle::random_gaussian(rng, d);
  const auto est = smoothed_grad_mc(p, x, 0.5, 1000000, rng);
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) worst = std::max(worst, std::abs(est.mean[i] - c[i]) / est.std_error[i]);
  return pass_if(worst <= 4.0, fmt::format("max |mean - c| / stderr = {:.3f} over {} components (limit 4)", worst, d));
}

Outcome smoothing_gap() {
  RngStream rng(404);
  Outcome out;
  const auto mush = mushrooms();
  if (!mush) {
    bool sup_ok = true;
    out.notes.push_back("supplementary hinge-surrogate: " + smoothing_gap_check(mushrooms_surrogate(), rng, sup_ok));
    return {Status::Skip, missing_data("mushrooms"), out.notes};
  }
  bool ok = true;
  const std::string detail = smoothing_gap_check(*mush, rng, ok);
  return pass_if(ok, detail);
}

struct PathwiseTally {
  std::size_t traces = 0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t strict_norm_violations = 0;
  std::vector<std::string> first_failures;

  void add(const BoundReport& r, const std::string& where) {
    checked += r.t.size();
    violations += r.violations();
    if (r.violated && first_failures.size() < 5) first_failures.push_back(where + ": " + r.name);
  }

  /// `f0` bounds |F(0; xi)| over all xi, so |F(y; xi)| <= f0 + L ||y||.
  template <class P>
  void add_run(const P& p, const PoemResult& res, const std::vector<Vector>& comparators, double f0,
               const std::string& where) {
    ++traces;
    const double L = p.lipschitz();
    std::vector<double> value_bounds;
    for (std::size_t k = 0; k < res.trace.rows.size(); ++k) {
      value_bounds.push_back(f0 + L * (norm(res.history.x[k]) + res.trace.rows[k].mu));
    }
    add(check_estimate_norm(res.trace, L, p.dimension(), value_bounds), where);
    strict_norm_violations += check_estimate_norm(res.trace, L, p.dimension()).violations();
    if (res.trace.algorithm == Algorithm::Poem) add(check_mu_noise_bound(res.trace, p.lipschitz(), p.dimension()), where);
    if (res.trace.algorithm == Algorithm::PoemUnbounded) add(check_gprime_dominates(res.trace), where);
    for (const auto& x : comparators) add(check_regret_bound(res, x), where);
    add(check_dog_tau(rbar_history(res)), where);
  }
};

Outcome pathwise_bounds() {
  PathwiseTally tally;
  RunOptions opts;
  opts.record_history = true;

  for (std::size_t d : {1, 2, 5, 10, 40}) {
    for (double noise : {0.0, 0.1, 1.0}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto p = make_synthetic_known_optimum(d, noise, 50 + seed);
        for (double r_eps : {1e-6, 1e-3, 1e-1, 1.0}) {
          RngStream rng(seed);
          const auto res = poem_run(p, Vector(d), r_eps, 2000, rng, opts);
          tally.add_run(p, res, {*p.minimizer(), Vector(d)}, norm(*p.minimizer()),
                        fmt::format("synthetic d={} seed={}", d, seed));
        }
        const auto pu = make_synthetic_known_optimum(d, noise, 50 + seed, {.radius = 1.0, .bounded = false});
        RngStream rng(seed);
        const auto res = poem_unbounded_run(pu, Vector(d), 0.5, 2000, 0.1, pu.lipschitz(), rng, opts);
        tally.add_run(pu, res, {*pu.minimizer()}, norm(*pu.minimizer()), fmt::format("synthetic-unbounded d={} seed={}", d, seed));
      }
    }
  }

  // Hinge: the regret bound holds against any feasible comparator.
  auto hinge_runs = [&](const HingeLossProblem& p, const std::string& label) {
    RngStream cmp(9);
    std::vector<Vector> comparators{Vector(p.dimension())};
    for (int i = 0; i < 3; ++i) comparators.push_back(oracle::random_point_in_ball(cmp, p.dimension(), 1.0));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      for (double r_eps : {1e-6, 1e-2, 1.0}) {
        RngStream rng(seed);
        tally.add_run(p, poem_run(p, Vector(p.dimension()), r_eps, 3000, rng, opts), comparators, 1.0, label);
      }
    }
  };
  hinge_runs(make_hinge_svm(oracle::make_mushrooms_like(2000, 5)), "hinge-surrogate");
  hinge_runs(make_hinge_svm(oracle::make_w8a_like(1000, 6)), "hinge-w8a-surrogate");
  if (const auto mush = mushrooms()) hinge_runs(*mush, "hinge-mushrooms");

  for (auto which : {HardFunction::F1, HardFunction::F2}) {
    for (std::size_t d : {1, 5}) {
      for (std::size_t hT : {10, 100}) {
        const auto p = make_hard_instance(which, 1.0, hT, d);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
          RngStream rng(seed);
          const auto res = poem_unbounded_run(p, Vector(d, 1.0), 1e-2, 1000, 0.1, p.lipschitz(), rng, opts);
          // F2(0; 1) = T L ||u||_1 <= T L d; F1(0) = 0.
          const double f0 = which == HardFunction::F1 ? 0.0 : static_cast<double>(hT * d);
          tally.add_run(p, res, {*p.minimizer(), Vector(d)}, f0, fmt::format("hard d={} T={}", d, hT));
        }
      }
    }
  }

  {
    const auto zero = make_zero_problem(Domain::centered_ball(3, 1.0));
    RngStream rng(1);
    tally.add_run(zero, poem_run(zero, Vector(3), 0.1, 200, rng, opts), {Vector(3)}, 0.0, "zero");
    const SyntheticLinearProblem lin(Vector{1.0, -2.0, 0.5}, 0.2, Domain::box(Vector(3, -1.0), Vector(3, 1.0)));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      RngStream r(seed);
      tally.add_run(lin, poem_run(lin, Vector(3), 1e-3, 2000, r, opts), {Vector{-1.0, 1.0, -1.0}, Vector(3)}, 0.0,
                    "linear-box");
    }
  }

  // The tau inequality on random nondecreasing sequences of mixed growth.
  RngStream rng(505);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t len = 2 + rng.uniform_index(499);
    std::vector<double> a{std::pow(10.0, -6.0 + 6.0 * rng.uniform01())};
    for (std::size_t k = 1; k < len; ++k) {
      const double u = rng.uniform01();
      double step = 0.0;
      if (u < 0.4) step = 0.0;
      else if (u < 0.9) step = a.back() * 0.05 * rng.uniform01();
      else step = a.back() * 10.0 * rng.uniform01();
      a.push_back(a.back() + step);
    }
    tally.add(check_dog_tau(a), fmt::format("sequence {}", i));
  }

  Outcome out = pass_if(tally.violations == 0,
                        fmt::format("{} violations over {} checked inequalities ({} traces + 1000 sequences)",
                                    tally.violations, tally.checked, tally.traces));
  out.notes = tally.first_failures;
  out.notes.push_back(fmt::format("norm bound without the rounding allowance: {} entries over by floating-point error",
                                  tally.strict_norm_violations));
  return out;
}

Outcome rate_scaling() {
  const std::size_t d = 10, T = 10000;
  std::vector<double> g1(10), g4(10);
  parallel_for(10, 0, [&](std::size_t i) {
    const std::uint64_t seed = 600 + i;
    const auto p = make_synthetic_known_optimum(d, 0.1, 7000 + seed);
    RngStream a = RngStream(seed).derive(1), b = RngStream(seed).derive(4);
    g1[i] = p.objective(poem_run(p, Vector(d), 1e-3, T, a).output);
    g4[i] = p.objective(poem_run(p, Vector(d), 1e-3, 4 * T, b).output);
  });
  const double m1 = oracle::median(g1), m4 = oracle::median(g4);
  return pass_if(m4 < m1 && m1 / m4 >= 1.5,
                 fmt::format("median gap {:.4g} at T=1e4, {:.4g} at T=4e4, ratio {:.3f} (need >= 1.5)", m1, m4, m1 / m4));
}

Outcome parameter_freeness() {
  const auto mush = mushrooms();
  const auto describe = [](const Sensitivity& s) {
    return fmt::format("POEM spread {:.4f} (limit 0.2) [{}], TPBCO spread {:.4f} (need > 1) [{}]", spread(s.poem_medians),
                       join(s.poem_medians), spread(s.tpbco_medians), join(s.tpbco_medians));
  };
  if (!mush) {
    return {Status::Skip, missing_data("mushrooms"),
            {"supplementary hinge-surrogate: " + describe(sensitivity(mushrooms_surrogate(), 100000))}};
  }
  const auto s = sensitivity(*mush, 100000);
  return pass_if(spread(s.poem_medians) <= 0.2 && spread(s.tpbco_medians) > 1.0, describe(s));
}

Outcome unbounded_safety() {
  const std::size_t d = 10, T = 10000, n = 100;
  const auto p = make_synthetic_known_optimum(d, 0.1, 8, {.radius = 1.0, .bounded = false});
  const double s0 = norm(*p.minimizer());
  std::vector<char> escaped(n);
  parallel_for(n, 0, [&](std::size_t i) {
    RngStream rng(800 + i);
    escaped[i] = poem_unbounded_run(p, Vector(d), s0, T, 0.1, p.lipschitz(), rng).final_rbar > 3.0 * s0;
  });
  const double rate = static_cast<double>(std::count(escaped.begin(), escaped.end(), 1)) / n;
  const double limit = binomial_upper(0.1, n, 3.0);
  return pass_if(rate <= limit, fmt::format("P(rbar_T > 3 s0) = {:.3f} over {} seeds (limit {:.3f})", rate, n, limit));
}

Outcome dataset_ingestion() {
  struct Expect {
    const char* name;
    std::size_t n, d;
  };
  Outcome out;
  bool ok = true, missing = false;
  for (const Expect e : {Expect{"mushrooms", 8124, 112}, Expect{"a9a", 32561, 123}, Expect{"w8a", 49749, 300}}) {
    const auto path = find_dataset(e.name);
    if (!path) {
      missing = true;
      out.notes.push_back(missing_data(e.name));
      continue;
    }
    // Raw parse: the dimension is the largest index seen, not the table entry.
    LibsvmOptions opts;
    opts.use_known_dimension = false;
    const auto ds = load_libsvm(*path, opts);
    const bool match = ds.size() == e.n && ds.dimension() == e.d;
    ok = ok && match;
    out.notes.push_back(fmt::format("{}: parsed ({}, {}), expected ({}, {}){}", e.name, ds.size(), ds.dimension(), e.n,
                                    e.d, match ? "" : "  MISMATCH"));
  }
  if (!ok) return {Status::Fail, "parsed sizes differ", out.notes};
  if (missing) return {Status::Skip, "dataset files missing", out.notes};
  return {Status::Pass, "all three datasets match", out.notes};
}

Outcome hard_instance_premise() {
  const std::size_t T = 100, trials = 100000;
  const auto p = make_hard_instance(HardFunction::F2, 1.0, T, 1);
  RngStream rng(1010);
  std::size_t all_zero = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    bool zero = true;
    for (std::size_t k = 0; k < T; ++k) zero = (p.sample_noise(rng) == 0) && zero;
    all_zero += zero ? 1 : 0;
  }
  const double phat = static_cast<double>(all_zero) / trials;
  const double p0 = std::pow(1.0 - 1.0 / T, static_cast<double>(T));
  const double sigma = oracle::binomial_sigma(p0, trials);
  const bool ok = std::abs(phat - p0) <= 3.0 * sigma && phat >= 1.0 / std::numbers::e - 0.01;
  return pass_if(ok, fmt::format("empirical {:.5f}, exact {:.5f}, 3 sigma {:.5f}, floor {:.5f}", phat, p0, 3.0 * sigma,
                                 1.0 / std::numbers::e - 0.01));
}

void write_libsvm(const SparseDataset& ds, const fs::path& path) {
  std::ofstream f(path);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    f << (ds.label(i) > 0 ? 1 : 2);
    const auto idx = ds.row_indices(i);
    const auto val = ds.row_values(i);
    for (std::size_t j = 0; j < idx.size(); ++j) f << ' ' << idx[j] + 1 << ':' << format_real(val[j]);
    f << '\n';
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  using namespace poem::bench;
  const fs::path root = fs::temp_directory_path() / "poem_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path data = root / "surrogate.txt";
  write_libsvm(oracle::make_mushrooms_like(1000, 21), data);

  std::vector<ExperimentSpec> specs;
  auto add = [&](ProblemKind kind, Algorithm algo) {
    ExperimentSpec s;
    s.problem.kind = kind;
    s.problem.dataset = data;
    s.algorithm = algo;
    s.T = 3000;
    s.seeds = {1, 2, 3};
    s.stride = 50;
    s.s0 = 1.0;
    s.grid = algo == Algorithm::Poem || algo == Algorithm::PoemUnbounded ? std::vector<double>{1e-4, 1e-1}
                                                                           : std::vector<double>{0.1, 10.0};
    specs.push_back(s);
  };
  for (auto algo : {Algorithm::Poem, Algorithm::Tpbco, Algorithm::Tpge, Algorithm::Rsnso}) add(ProblemKind::Libsvm, algo);
  add(ProblemKind::Synthetic, Algorithm::Poem);
  add(ProblemKind::SyntheticUnbounded, Algorithm::PoemUnbounded);
  add(ProblemKind::HardF2, Algorithm::PoemUnbounded);
  add(ProblemKind::HardF1, Algorithm::Rsnso);
  if (const auto real = find_dataset("mushrooms")) {
    add(ProblemKind::Libsvm, Algorithm::Poem);
    specs.back().problem.dataset = *real;
  }

  std::size_t files = 0, differing = 0;
  Outcome out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    ExperimentSpec a = specs[i], b = specs[i];
    a.out = root / fmt::format("{}a", i);
    a.threads = 1;
    b.out = root / fmt::format("{}b", i);
    b.threads = 3;
    std::ostringstream err;
    if (cmd_run(a, err) != kExitOk || cmd_run(b, err) != kExitOk) {
      out.notes.push_back(fmt::format("spec {} failed: {}", i, err.str()));
      ++differing;
      continue;
    }
    for (const auto& entry : fs::directory_iterator(a.out)) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const std::string x = slurp(entry.path());
      if (x.empty() || x != slurp(b.out / entry.path().filename())) {
        ++differing;
        out.notes.push_back("differs: " + entry.path().string());
      }
    }
  }
  fs::remove_all(root);
  Outcome res = pass_if(differing == 0 && files > 0,
                        fmt::format("{} of {} trace CSVs differ between two runs ({} specs, 1 vs 3 threads)", differing,
                                    files, specs.size()));
  res.notes = out.notes;
  return res;
}

Outcome stepsize_coalescence() {
  const auto mush = mushrooms();
  const auto describe = [](const Coalescence& c) {
    return fmt::format("median log-gap {:.4g} at t=T/10, {:.4g} at t=T", c.gap_tenth, c.gap_end);
  };
  if (!mush) {
    return {Status::Skip, missing_data("mushrooms"),
            {"supplementary hinge-surrogate: " + describe(coalescence(mushrooms_surrogate(), 100000))}};
  }
  const auto c = coalescence(*mush, 100000);
  return pass_if(c.gap_end < c.gap_tenth, describe(c));
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // 0: no runtime limit
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "sphere sampler isotropy", 5, sphere_isotropy},
      {2, "estimator norm bound", 30, estimator_norm},
      {3, "estimator unbiasedness", 30, estimator_unbiased},
      {4, "smoothing gap", 60, smoothing_gap},
      {5, "deterministic pathwise bounds", 0, pathwise_bounds},
      {6, "convergence-rate scaling", 120, rate_scaling},
      {7, "parameter-freeness", 600, parameter_freeness},
      {8, "unbounded-domain safety", 300, unbounded_safety},
      {9, "dataset ingestion", 0, dataset_ingestion},
      {10, "hard-instance premise", 0, hard_instance_premise},
      {11, "determinism", 0, determinism},
      {12, "step-size coalescence", 0, stepsize_coalescence},
  };
  return all;
}

Status run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {Status::Fail, std::string("exception: ") + e.what(), {}};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string budget;
  if (c.budget_s > 0) {
    budget = fmt::format(", budget {:.0f}s", c.budget_s);
    // Supplementary work in a skipped criterion does not count against it.
    if (o.status == Status::Pass && secs > c.budget_s) {
      o.status = Status::Fail;
      o.detail += "; over runtime budget";
    }
  }
  const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
  std::cout << fmt::format("criterion {:2}: {} {}: {} ({:.1f}s{})\n", c.id, tag, c.title, o.detail, secs, budget);
  for (const auto& n : o.notes) std::cout << "    " << n << '\n';
  std::cout.flush();
  return o.status;
}

int exit_code(Status s) { return s == Status::Pass ? 0 : s == Status::Fail ? 1 : 77; }

}  // namespace

int main(int argc, char** argv) {
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    const int id = std::atoi(argv[2]);
    for (const auto& c : criteria()) {
      if (c.id == id) return exit_code(run_one(c));
    }
    std::cerr << "unknown criterion " << argv[2] << '\n';
    return 2;
  }
  if (argc != 1) {
    std::cerr << "usage: acceptance [--criterion N]\n";
    return 2;
  }
  std::size_t failed = 0, skipped = 0;
  for (const auto& c : criteria()) {
    const Status s = run_one(c);
    failed += s == Status::Fail ? 1 : 0;
    skipped += s == Status::Skip ? 1 : 0;
  }
  std::cout << fmt::format("{} passed, {} failed, {} skipped\n", criteria().size() - failed - skipped, failed, skipped);
  return failed == 0 ? 0 : 1;
}
