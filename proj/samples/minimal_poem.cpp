// Minimizes a noisy distance-to-point objective on the unit ball with POEM
// and compares against the known optimum.
#include <fmt/format.h>

#include "poem.hpp"

int main() {
  const auto problem = poem::make_synthetic_known_optimum(10, 0.1, /*seed=*/7);
  poem::RngStream rng(42);
  const poem::Vector x0(problem.dimension());

  poem::RunOptions opts;
  opts.objective_stride = 2000;
  const auto res = poem::poem_run(problem, x0, /*r_eps=*/1e-4, 20000, rng, opts);

  for (const auto& row : res.trace.rows) {
    if (row.f_xbar) fmt::print("t={:6d} szo={:6d} eta={:.3e} f(xbar)={:.6f}\n", row.t, row.szo_calls, row.eta, *row.f_xbar);
  }
  const double gap = problem.objective(res.output) - *problem.optimal_value();
  fmt::print("gap {:.3e}, distance to optimum {:.3e}\n", gap, poem::distance(res.output, *problem.minimizer()));
  return gap < 0.1 ? 0 : 1;
}
