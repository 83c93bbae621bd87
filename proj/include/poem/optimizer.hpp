#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "poem/domain.hpp"
#include "poem/estimator.hpp"
#include "poem/problems.hpp"
#include "poem/sampling.hpp"
#include "poem/trace.hpp"
#include "poem/vector.hpp"

namespace poem {

/// log(z) + 1
inline double log_plus(double z) { return std::log(z) + 1.0; }

/// theta_{T,delta} = log(60 log(6 T / delta)).
inline double theta_horizon(std::size_t T, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double inner = 6.0 * static_cast<double>(T) / delta;
  if (!(inner > 1.0)) throw std::invalid_argument("6T/delta must exceed 1");
  return std::log(60.0 * std::log(inner));
}

/// G'_t = 8^4 theta log_+^2(t + 2) (G_{t-1} + 16 theta d^2 Lbar^2), with
/// theta = theta_{T,delta} and G_{-1} = 0.
inline double gprime(double G_prev, std::size_t t, std::size_t T, double delta, double Lbar, std::size_t d) {
  if (!(G_prev >= 0.0)) throw std::invalid_argument("G_prev must be nonnegative");
  if (!(Lbar > 0.0)) throw std::invalid_argument("Lbar must be positive");
  const double theta = theta_horizon(T, delta);
  const double lp = log_plus(static_cast<double>(t) + 2.0);
  const double dd = static_cast<double>(d);
  return 4096.0 * theta * lp * lp * (G_prev + 16.0 * theta * dd * dd * Lbar * Lbar);
}

/// Running r-bar weighted average and the tau selection
///   tau = argmax_{1 <= t <= T} sum_{k<t} rbar_k / rbar_t   (smallest t on ties).
/// Weights are folded in before each step, so after t steps the candidate
/// average covers k = 0 .. t-1. Points are summed as offsets from the first
/// one, so an average of identical points reproduces that point exactly.
class WeightedOutputTracker {
 public:
  WeightedOutputTracker() = default;
  explicit WeightedOutputTracker(std::size_t d) : sum_(d) {}

  /// Fold weight rbar_k and point x_k (top of step k).
  void add(double rbar_k, const Vector& x_k) {
    if (count_ == 0) anchor_ = x_k;
    sum_.add_scaled(rbar_k, x_k - anchor_);
    weight_.add(rbar_k);
    ++count_;
  }

  /// Offer candidate tau = count() with rbar at that index.
  void offer(double rbar_t) {
    const double score = weight_.value() / rbar_t;
    if (score > best_score_) {
      best_score_ = score;
      best_ = count_;
      point_ = average();
    }
  }

  [[nodiscard]] Vector average() const {
    Vector out = sum_.value();
    const double w = weight_.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = anchor_[i] + out[i] / w;
    return out;
  }

  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  [[nodiscard]] double weight_total() const noexcept { return weight_.value(); }
  [[nodiscard]] std::size_t tau() const noexcept { return best_; }
  [[nodiscard]] double tau_score() const noexcept { return best_score_; }
  [[nodiscard]] const Vector& output() const noexcept { return point_; }

 private:
  CompensatedVectorSum sum_;
  Vector anchor_;
  CompensatedSum weight_;
  std::size_t count_ = 0;
  std::size_t best_ = 0;
  double best_score_ = -std::numeric_limits<double>::infinity();
  Vector point_;
};

/// Smallest t in {1..T} maximizing sum_{k<t} h_k / h_t, for h = h_0..h_T.
inline std::size_t select_tau(std::span<const double> rbar_history) {
  if (rbar_history.size() < 2) throw std::invalid_argument("tau selection needs rbar_0..rbar_T with T >= 1");
  CompensatedSum prefix;
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < rbar_history.size(); ++t) {
    const double h = rbar_history[t];
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("rbar history must be positive and finite");
    if (t > 0 && h < rbar_history[t - 1]) throw std::invalid_argument("rbar history must be nondecreasing");
    if (t > 0) {
      const double score = prefix.value() / h;
      if (score > best_score) {
        best_score = score;
        best = t;
      }
    }
    prefix.add(h);
  }
  return best;
}

struct PoemState {
  std::size_t t = 0;
  Vector x;
  Vector x0;
  double rbar = 0.0;  // rbar_{t-1} between steps (r_eps before the first)
  double G = 0.0;     // G_{t-1}
  std::size_t szo_count = 0;
  WeightedOutputTracker output;
  CompensatedSum G_acc;
};

/// eta_t = rbar_t / sqrt(G_t), mu_t = rbar_t sqrt(d / (t + 1)).
struct BoundedStepRule {
  static constexpr Algorithm algorithm = Algorithm::Poem;
  [[nodiscard]] double smoothing(double rbar, std::size_t t, std::size_t d) const {
    return rbar * std::sqrt(static_cast<double>(d) / (static_cast<double>(t) + 1.0));
  }
  /// Quantity under the square root of eta; G_prev = G_{t-1}, G_now = G_t.
  [[nodiscard]] double step_denominator_sq(double /*G_prev*/, double G_now, std::size_t /*t*/,
                                           std::size_t /*d*/) const {
    return G_now;
  }
};

/// eta_t = rbar_t / sqrt(G'_t), mu_t = d rbar_t / (t + 1)^2.
struct UnboundedStepRule {
  static constexpr Algorithm algorithm = Algorithm::PoemUnbounded;
  std::size_t horizon;
  double delta;
  double Lbar;

  [[nodiscard]] double smoothing(double rbar, std::size_t t, std::size_t d) const {
    const double tp1 = static_cast<double>(t) + 1.0;
    return static_cast<double>(d) * rbar / (tp1 * tp1);
  }
  [[nodiscard]] double step_denominator_sq(double G_prev, double /*G_now*/, std::size_t t, std::size_t d) const {
    return gprime(G_prev, t, horizon, delta, Lbar, d);
  }
};

/// Validates inputs and builds the state before step 0.
template <StochasticProblem P>
PoemState poem_init(const P& problem, const Vector& x0, double r_eps) {
  if (x0.size() != problem.dimension()) throw std::invalid_argument("x0 dimension mismatch");
  require_finite(x0, "x0");
  if (!(r_eps > 0.0) || !std::isfinite(r_eps)) throw std::invalid_argument("r_eps must be positive");
  if (!problem.domain().contains(x0)) throw std::invalid_argument("x0 must lie in the domain");
  PoemState s;
  s.x = x0;
  s.x0 = x0;
  s.rbar = r_eps;
  s.output = WeightedOutputTracker(x0.size());
  return s;
}

struct StepOutcome {
  TraceRecord record;
  Vector g;
};

/// One iteration of the parameter-free loop. The G = 0 case (every estimate
/// so far exactly zero) uses eta = 0.
template <StochasticProblem P, class Rule>
StepOutcome poem_step(PoemState& s, const P& problem, RngStream& rng, const Rule& rule) {
  const std::size_t d = problem.dimension();
  const std::size_t t = s.t;

  const double r_t = distance(s.x, s.x0);
  s.rbar = std::max(s.rbar, r_t);
  const double mu = rule.smoothing(s.rbar, t, d);

  const Vector v = sample_unit_sphere(rng, d);
  const auto xi = problem.sample_noise(rng);
  TwoPointEstimate est = finite_difference(problem, s.x, mu, v, xi);
  s.szo_count += est.szo_cost;

  const double g_sq = squared_norm(est.g);
  const double G_prev = s.G;
  s.G_acc.add(g_sq);
  s.G = s.G_acc.value();
  const double denom_sq = rule.step_denominator_sq(G_prev, s.G, t, d);
  const double eta = denom_sq > 0.0 ? s.rbar / std::sqrt(denom_sq) : 0.0;

  s.output.add(s.rbar, s.x);

  TraceRecord rec;
  rec.t = t;
  rec.szo_calls = s.szo_count;
  rec.eta = eta;
  rec.mu = mu;
  rec.rbar = s.rbar;
  rec.G = s.G;
  rec.G_step = denom_sq;
  rec.r = r_t;
  rec.g_norm = std::sqrt(g_sq);

  if (eta != 0.0) {
    Vector next = s.x;
    next.axpy(-eta, est.g);
    s.x = problem.domain().project(next);
  }
  s.t = t + 1;
  // rbar_{t+1} is what the next step will compute; it closes candidate tau = t + 1.
  s.output.offer(std::max(s.rbar, distance(s.x, s.x0)));
  return {rec, std::move(est.g)};
}

struct RunOptions {
  /// Keep x_0..x_T and g_0..g_{T-1} (memory grows as T d).
  bool record_history = false;
  /// Evaluate the exact objective every `objective_stride` steps and at the
  /// last step; 0 disables.
  std::size_t objective_stride = 0;
};

struct PoemResult {
  Vector output;
  PoemState state;
  Trace trace;
  RunHistory history;
  /// rbar_T, closing the rbar_0..rbar_T sequence.
  double final_rbar = 0.0;
};

template <StochasticProblem P, class Rule>
PoemResult poem_run_with(const P& problem, const Vector& x0, double r_eps, std::size_t T, RngStream& rng,
                         const Rule& rule, const RunOptions& options = {}) {
  if (T == 0) throw std::invalid_argument("iteration budget T must be >= 1");
  PoemResult res;
  res.state = poem_init(problem, x0, r_eps);
  res.trace.algorithm = Rule::algorithm;
  res.trace.rows.reserve(T);
  if (options.record_history) {
    res.history.x.reserve(T + 1);
    res.history.g.reserve(T);
    res.history.x.push_back(x0);
  }
  for (std::size_t t = 0; t < T; ++t) {
    const Vector x_t = res.state.x;
    StepOutcome step = poem_step(res.state, problem, rng, rule);
    if constexpr (HasExactObjective<P>) {
      if (options.objective_stride > 0 && on_stride(t, options.objective_stride, T - 1)) {
        step.record.f_xt = problem.objective(x_t);
        step.record.f_xbar = problem.objective(res.state.output.output());
      }
    }
    res.trace.rows.push_back(step.record);
    if (options.record_history) {
      res.history.g.push_back(std::move(step.g));
      res.history.x.push_back(res.state.x);
    }
  }
  res.final_rbar = std::max(res.state.rbar, distance(res.state.x, res.state.x0));
  res.output = res.state.output.output();
  return res;
}

/// Parameter-free run on a bounded (or unbounded, at the caller's risk) domain.
template <StochasticProblem P>
PoemResult poem_run(const P& problem, const Vector& x0, double r_eps, std::size_t T, RngStream& rng,
                    const RunOptions& options = {}) {
  const double D = problem.domain().diameter();
  if (std::isfinite(D) && r_eps > D) {
    throw std::invalid_argument("r_eps must not exceed the domain diameter");
  }
  return poem_run_with(problem, x0, r_eps, T, rng, BoundedStepRule{}, options);
}

/// Unbounded-domain variant. `Lbar` is a caller-supplied overestimate of the
/// Lipschitz constant; the analysis assumes r_eps <= 3 ||x0 - x_star||, which
/// cannot be checked here.
template <StochasticProblem P>
PoemResult poem_unbounded_run(const P& problem, const Vector& x0, double r_eps, std::size_t T, double delta,
                              double Lbar, RngStream& rng, const RunOptions& options = {}) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(Lbar > 0.0)) throw std::invalid_argument("Lbar must be positive");
  return poem_run_with(problem, x0, r_eps, T, rng, UnboundedStepRule{T, delta, Lbar}, options);
}

/// rbar_0..rbar_T of a finished run.
inline std::vector<double> rbar_history(const PoemResult& res) {
  std::vector<double> h;
  h.reserve(res.trace.rows.size() + 1);
  for (const auto& r : res.trace.rows) h.push_back(r.rbar);
  h.push_back(res.final_rbar);
  return h;
}

}  // namespace poem
