#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

#include "poem/estimator.hpp"
#include "poem/optimizer.hpp"
#include "poem/problems.hpp"
#include "poem/trace.hpp"

namespace poem {

/// Step size and smoothing parameter as functions of the 0-based iteration counter.
struct Schedule {
  Algorithm algorithm = Algorithm::FixedSchedule;
  std::function<double(std::size_t)> eta;
  std::function<double(std::size_t)> mu;
};

inline Schedule constant_schedule(double eta, double mu, Algorithm tag = Algorithm::FixedSchedule) {
  return {tag, [eta](std::size_t) { return eta; }, [mu](std::size_t) { return mu; }};
}

namespace detail {
inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
}
}  // namespace detail

/// eta = D / (L sqrt(d T)), mu = D sqrt(d / T).
inline Schedule tpbco_schedule(double D, double L, std::size_t T, std::size_t d) {
  detail::require_positive(D, "D");
  detail::require_positive(L, "L");
  if (T == 0 || d == 0) throw std::invalid_argument("T and d must be >= 1");
  const double dT = static_cast<double>(d) * static_cast<double>(T);
  return constant_schedule(D / (L * std::sqrt(dT)), D * std::sqrt(static_cast<double>(d) / static_cast<double>(T)),
                           Algorithm::Tpbco);
}

enum class TpgeSmoothing {
  InverseT,        // mu_t = D / t
  InverseD2T2,     // mu_t = D / (d^2 t^2)
};

/// eta_t = D / (L sqrt(d log(2d) t)) with t counted from 1.
inline Schedule tpge_schedule(double D, double L, std::size_t d, TpgeSmoothing variant = TpgeSmoothing::InverseT) {
  detail::require_positive(D, "D");
  detail::require_positive(L, "L");
  if (d == 0) throw std::invalid_argument("d must be >= 1");
  const double dd = static_cast<double>(d);
  const double base = dd * std::log(2.0 * dd);
  Schedule s;
  s.algorithm = Algorithm::Tpge;
  s.eta = [=](std::size_t k) { return D / (L * std::sqrt(base * (static_cast<double>(k) + 1.0))); };
  if (variant == TpgeSmoothing::InverseT) {
    s.mu = [=](std::size_t k) { return D / (static_cast<double>(k) + 1.0); };
  } else {
    s.mu = [=](std::size_t k) {
      const double t = static_cast<double>(k) + 1.0;
      return D / (dd * dd * t * t);
    };
  }
  return s;
}

/// eta = s0 / (d L sqrt(T)), mu = s0 sqrt(d / T).
inline Schedule rsnso_schedule(double s0, double L, std::size_t T, std::size_t d) {
  detail::require_positive(s0, "s0");
  detail::require_positive(L, "L");
  if (T == 0 || d == 0) throw std::invalid_argument("T and d must be >= 1");
  const double dd = static_cast<double>(d);
  const double sqT = std::sqrt(static_cast<double>(T));
  return constant_schedule(s0 / (dd * L * sqT), s0 * std::sqrt(dd / static_cast<double>(T)), Algorithm::Rsnso);
}

enum class Averaging { Uniform, Last, PoemWeighted };

struct SgdOptions {
  Averaging averaging = Averaging::Uniform;
  /// Floor for the r-bar weights; must be positive for PoemWeighted.
  double rbar_floor = 0.0;
  bool record_history = false;
  std::size_t objective_stride = 0;
};

struct SgdResult {
  Vector output;
  Vector last;
  Trace trace;
  RunHistory history;
};

/// x_{t+1} = Proj(x_t - eta_t g_t) with g_t the two-point estimate at mu_t.
/// Uniform averaging returns the mean of x_0..x_{T-1}, summed as offsets from x_0.
template <StochasticProblem P>
SgdResult projected_sgd_fixed(const P& problem, const Vector& x0, const Schedule& schedule, std::size_t T,
                              RngStream& rng, const SgdOptions& options = {}) {
  if (T == 0) throw std::invalid_argument("iteration budget T must be >= 1");
  if (!schedule.eta || !schedule.mu) throw std::invalid_argument("schedule is incomplete");
  if (x0.size() != problem.dimension()) throw std::invalid_argument("x0 dimension mismatch");
  require_finite(x0, "x0");
  if (!problem.domain().contains(x0)) throw std::invalid_argument("x0 must lie in the domain");
  if (options.averaging == Averaging::PoemWeighted && !(options.rbar_floor > 0.0)) {
    throw std::invalid_argument("weighted averaging needs a positive rbar floor");
  }

  const std::size_t d = problem.dimension();
  SgdResult res;
  res.trace.algorithm = schedule.algorithm;
  res.trace.rows.reserve(T);
  if (options.record_history) {
    res.history.x.reserve(T + 1);
    res.history.x.push_back(x0);
  }

  Vector x = x0;
  CompensatedVectorSum uniform_sum(d);
  WeightedOutputTracker weighted(d);
  CompensatedSum G_acc;
  double rbar = options.rbar_floor;
  std::size_t szo = 0;

  auto current_output = [&](std::size_t steps_done) -> Vector {
    switch (options.averaging) {
      case Averaging::Uniform: {
        Vector out = uniform_sum.value();
        for (std::size_t i = 0; i < d; ++i) out[i] = x0[i] + out[i] / static_cast<double>(steps_done);
        return out;
      }
      case Averaging::Last: return x;
      case Averaging::PoemWeighted: return weighted.output();
    }
    return x;
  };

  for (std::size_t t = 0; t < T; ++t) {
    const double eta = schedule.eta(t);
    const double mu = schedule.mu(t);
    if (!(eta >= 0.0) || !(mu > 0.0)) throw std::invalid_argument("schedule must be positive");

    const double r_t = distance(x, x0);
    rbar = std::max(rbar, r_t);
    const Vector x_t = x;

    const Vector v = sample_unit_sphere(rng, d);
    const auto xi = problem.sample_noise(rng);
    TwoPointEstimate est = finite_difference(problem, x, mu, v, xi);
    szo += est.szo_cost;
    const double g_sq = squared_norm(est.g);
    G_acc.add(g_sq);

    uniform_sum.add_scaled(1.0, x - x0);
    if (options.averaging == Averaging::PoemWeighted) weighted.add(rbar, x);

    if (eta != 0.0) {
      Vector next = x;
      next.axpy(-eta, est.g);
      x = problem.domain().project(next);
    }
    if (options.averaging == Averaging::PoemWeighted) weighted.offer(std::max(rbar, distance(x, x0)));

    TraceRecord rec;
    rec.t = t;
    rec.szo_calls = szo;
    rec.eta = eta;
    rec.mu = mu;
    rec.rbar = rbar;
    rec.G = G_acc.value();
    rec.G_step = rec.G;
    rec.r = r_t;
    rec.g_norm = std::sqrt(g_sq);
    if constexpr (HasExactObjective<P>) {
      if (options.objective_stride > 0 && on_stride(t, options.objective_stride, T - 1)) {
        rec.f_xt = problem.objective(x_t);
        rec.f_xbar = problem.objective(current_output(t + 1));
      }
    }
    res.trace.rows.push_back(rec);
    if (options.record_history) {
      res.history.g.push_back(std::move(est.g));
      res.history.x.push_back(x);
    }
  }
  res.last = x;
  res.output = current_output(T);
  return res;
}

}  // namespace poem
