#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "poem/optimizer.hpp"
#include "poem/trace.hpp"
#include "poem/vector.hpp"

namespace poem {

/// Relative slack allowed before a pathwise inequality counts as violated.
inline constexpr double kBoundSlack = 1e-9;

/// Per-t record of an inequality lhs_t <= rhs_t.
struct BoundReport {
  std::string name;
  std::vector<std::size_t> t;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<std::size_t> skipped;
  double worst_ratio = 0.0;  // max lhs / rhs over entries with rhs > 0
  bool violated = false;

  void push(std::size_t index, double l, double r) {
    t.push_back(index);
    lhs.push_back(l);
    rhs.push_back(r);
    if (r > 0.0) worst_ratio = std::max(worst_ratio, l / r);
    if (l > r + kBoundSlack * std::abs(r)) violated = true;
  }

  [[nodiscard]] std::size_t violations() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i) n += lhs[i] > rhs[i] + kBoundSlack * std::abs(rhs[i]) ? 1 : 0;
    return n;
  }
};

/// One CSV row per t, then a summary comment line.
inline void write_bound_report_csv(std::ostream& out, const BoundReport& r) {
  out << "# poem-bound v1 name=" << r.name << '\n' << "t,lhs,rhs\n";
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    out << r.t[i] << ',' << format_real(r.lhs[i]) << ',' << format_real(r.rhs[i]) << '\n';
  }
  out << "# summary violated=" << (r.violated ? 1 : 0) << " violations=" << r.violations()
      << " worst_ratio=" << format_real(r.worst_ratio) << " checked=" << r.t.size() << " skipped=" << r.skipped.size()
      << '\n';
}

inline double violation_rate(std::span<const BoundReport> reports) {
  if (reports.empty()) return 0.0;
  std::size_t bad = 0;
  for (const auto& r : reports) bad += r.violated ? 1 : 0;
  return static_cast<double>(bad) / static_cast<double>(reports.size());
}

/// p + sigmas * sqrt(p (1 - p) / n)
inline double binomial_upper(double p, std::size_t n, double sigmas = 3.0) {
  return p + sigmas * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

/// (1/e)(T / log_+(a_T / a_0) - 1) <= max_{t <= T} sum_{i<t} a_i / a_t, with the
/// right side computed by brute force.
inline BoundReport check_dog_tau(std::span<const double> a) {
  if (a.empty()) throw std::invalid_argument("sequence must be nonempty");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0)) throw std::invalid_argument("sequence must be positive");
    if (i > 0 && a[i] < a[i - 1]) throw std::invalid_argument("sequence must be nondecreasing");
  }
  const std::size_t T = a.size() - 1;
  double best = 0.0;  // t = 0 contributes the empty sum
  for (std::size_t t = 1; t <= T; ++t) {
    double s = 0.0;
    for (std::size_t i = 0; i < t; ++i) s += a[i] / a[t];
    best = std::max(best, s);
  }
  const double bound = (static_cast<double>(T) / log_plus(a[T] / a[0]) - 1.0) / std::numbers::e;
  BoundReport r;
  r.name = "dog_tau";
  r.push(T, bound, best);
  return r;
}

namespace detail {

inline void require_history(const Trace& trace, const RunHistory& history) {
  if (history.g.size() != trace.rows.size() || history.x.size() != trace.rows.size() + 1) {
    throw std::invalid_argument("diagnostic needs the full iterate and estimate history");
  }
}

/// rbar_0..rbar_T from trace rows plus the closing value.
inline double rbar_at(const Trace& trace, double final_rbar, std::size_t t) {
  return t < trace.rows.size() ? trace.rows[t].rbar : final_rbar;
}

}  // namespace detail

/// Weighted regret:
///   sum_{k<t} rbar_k <g_k, x_k - x_star> <= rbar_t (2 sbar_t + rbar_t) sqrt(G_{t-1})
/// for t = 1..T, where G is the quantity under the step-size square root
/// (G'_t for the unbounded variant).
inline BoundReport check_regret_bound(const Trace& trace, const RunHistory& history, const Vector& x_star,
                                      double final_rbar) {
  detail::require_history(trace, history);
  BoundReport r;
  r.name = "weighted_regret";
  CompensatedSum regret;
  double sbar = distance(history.x[0], x_star);
  const std::size_t T = trace.rows.size();
  for (std::size_t t = 1; t <= T; ++t) {
    const std::size_t k = t - 1;
    regret.add(trace.rows[k].rbar * dot(history.g[k], history.x[k] - x_star));
    sbar = std::max(sbar, distance(history.x[t], x_star));
    const double rb = detail::rbar_at(trace, final_rbar, t);
    r.push(t, regret.value(), rb * (2.0 * sbar + rb) * std::sqrt(trace.rows[k].G_step));
  }
  return r;
}

inline BoundReport check_regret_bound(const PoemResult& res, const Vector& x_star) {
  return check_regret_bound(res.trace, res.history, x_star, res.final_rbar);
}

/// sum_{k<t} 2 L rbar_k mu_k <= 4 L rbar_{t-1}^2 sqrt(d t) for the bounded
/// smoothing schedule mu_k = rbar_k sqrt(d / (k + 1)).
inline BoundReport check_mu_noise_bound(const Trace& trace, double L, std::size_t d) {
  if (trace.algorithm != Algorithm::Poem) throw std::invalid_argument("noise-from-mu bound applies to bounded POEM traces");
  const double dd = static_cast<double>(d);
  for (const auto& row : trace.rows) {
    const double expected = row.rbar * std::sqrt(dd / (static_cast<double>(row.t) + 1.0));
    if (std::abs(row.mu - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
      throw std::invalid_argument("trace was produced with a different smoothing schedule");
    }
  }
  BoundReport r;
  r.name = "noise_from_mu";
  CompensatedSum lhs;
  for (std::size_t t = 1; t <= trace.rows.size(); ++t) {
    const auto& prev = trace.rows[t - 1];
    lhs.add(2.0 * L * prev.rbar * prev.mu);
    r.push(t, lhs.value(), 4.0 * L * prev.rbar * prev.rbar * std::sqrt(dd * static_cast<double>(t)));
  }
  return r;
}

/// ||g_k|| <= L d.
inline BoundReport check_estimate_norm(std::span<const double> g_norms, double L, std::size_t d) {
  BoundReport r;
  r.name = "estimate_norm";
  const double bound = L * static_cast<double>(d);
  for (std::size_t k = 0; k < g_norms.size(); ++k) r.push(k, g_norms[k], bound);
  return r;
}

inline BoundReport check_estimate_norm(const Trace& trace, double L, std::size_t d) {
  std::vector<double> norms;
  norms.reserve(trace.rows.size());
  for (const auto& row : trace.rows) norms.push_back(row.g_norm);
  return check_estimate_norm(norms, L, d);
}

/// ||g_k|| <= L d plus room for rounding. With |F| <= value_bounds[k] at both
/// probes, each value carries about (d + 2) eps V_k absolute error, and the
/// estimator scales their difference by d / (2 mu_k). Matters only when mu_k
/// is tiny next to |F|, as under the unbounded 1/t^2 smoothing schedule.
inline BoundReport check_estimate_norm(const Trace& trace, double L, std::size_t d,
                                       std::span<const double> value_bounds) {
  if (value_bounds.size() != trace.rows.size()) throw std::invalid_argument("one value bound per trace row");
  BoundReport r;
  r.name = "estimate_norm_rounded";
  const double dd = static_cast<double>(d);
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    const auto& row = trace.rows[k];
    const double rounding = dd / (2.0 * row.mu) * 2.0 * (dd + 2.0) * eps * value_bounds[k];
    r.push(k, row.g_norm, L * dd + rounding);
  }
  return r;
}

/// G_t <= G'_t on an unbounded-variant trace.
inline BoundReport check_gprime_dominates(const Trace& trace) {
  if (trace.algorithm != Algorithm::PoemUnbounded) throw std::invalid_argument("G' exists only for the unbounded variant");
  BoundReport r;
  r.name = "gprime_dominates";
  for (const auto& row : trace.rows) r.push(row.t, row.G, row.G_step);
  return r;
}

/// theta_{t,delta} = log(60 log(t / delta)); undefined when 60 log(t/delta) <= 1.
inline std::optional<double> theta_gap(std::size_t t, double delta) {
  const double inner = 60.0 * std::log(static_cast<double>(t) / delta);
  if (!(inner > 1.0)) return std::nullopt;
  return std::log(inner);
}

/// The r-bar weighted average of x_0..x_{t-1} for every t = 1..T.
inline std::vector<Vector> weighted_averages(const Trace& trace, const RunHistory& history) {
  detail::require_history(trace, history);
  std::vector<Vector> out;
  out.reserve(trace.rows.size());
  WeightedOutputTracker acc(history.x[0].size());
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    acc.add(trace.rows[k].rbar, history.x[k]);
    out.push_back(acc.average());
  }
  return out;
}

/// High-probability gap bound, for t = 1..T:
///   f(xbar_t) - f_star <= 16 theta_{t,delta} (rbar_t + s0)(sqrt(G_{t-1}) + L d + L sqrt(d t))
///                         / (sum_{k<t} rbar_k / rbar_t).
/// It holds with probability >= 1 - delta, so callers aggregate `violated`
/// across seeds rather than asserting it per path.
template <class Objective>
BoundReport check_gap_bound(const PoemResult& res, const Objective& f, double f_star, const Vector& x_star,
                               double delta, double L, std::size_t d) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const auto averages = weighted_averages(res.trace, res.history);
  const double s0 = distance(res.history.x[0], x_star);
  const double dd = static_cast<double>(d);
  BoundReport r;
  r.name = "gap_bound";
  CompensatedSum weight;
  for (std::size_t t = 1; t <= res.trace.rows.size(); ++t) {
    const auto& prev = res.trace.rows[t - 1];
    weight.add(prev.rbar);
    const auto theta = theta_gap(t, delta);
    if (!theta) {
      r.skipped.push_back(t);
      continue;
    }
    const double rb = detail::rbar_at(res.trace, res.final_rbar, t);
    const double denom = weight.value() / rb;
    const double numer =
        16.0 * *theta * (rb + s0) * (std::sqrt(prev.G) + L * dd + L * std::sqrt(dd * static_cast<double>(t)));
    r.push(t, f(averages[t - 1]) - f_star, numer / denom);
  }
  return r;
}

/// Martingale noise term against b_t = 8 rbar_{t-1} sbar_{t-1} sqrt(theta G_{t-1} + 4 L^2 d^2 theta^2),
/// theta = log(60 log(6 t / delta)); `violated` marks the event |sum| >= b_t.
/// `smoothed_gradient(x, mu)` must return the exact gradient of the surrogate.
inline BoundReport check_noise_from_g(const PoemResult& res, const Vector& x_star,
                                      const std::function<Vector(const Vector&, double)>& smoothed_gradient, double L,
                                      std::size_t d, double delta) {
  detail::require_history(res.trace, res.history);
  const double dd = static_cast<double>(d);
  BoundReport r;
  r.name = "noise_from_g";
  CompensatedSum noise;
  double sbar = 0.0;
  for (std::size_t t = 1; t <= res.trace.rows.size(); ++t) {
    const std::size_t k = t - 1;
    const auto& row = res.trace.rows[k];
    const Vector& xk = res.history.x[k];
    const Vector delta_k = smoothed_gradient(xk, row.mu) - res.history.g[k];
    noise.add(row.rbar * dot(delta_k, xk - x_star));
    sbar = std::max(sbar, distance(xk, x_star));
    const double theta = std::log(60.0 * std::log(6.0 * static_cast<double>(t) / delta));
    const double b = 8.0 * row.rbar * sbar * std::sqrt(theta * row.G + 4.0 * L * L * dd * dd * theta * theta);
    // The event is |sum| >= b_t; push so that equality also counts.
    r.t.push_back(t);
    r.lhs.push_back(std::abs(noise.value()));
    r.rhs.push_back(b);
    if (b > 0.0) r.worst_ratio = std::max(r.worst_ratio, std::abs(noise.value()) / b);
    if (std::abs(noise.value()) >= b) r.violated = true;
  }
  return r;
}

}  // namespace poem
