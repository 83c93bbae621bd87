#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "poem/problems.hpp"
#include "poem/sampling.hpp"
#include "poem/vector.hpp"

namespace poem {

/// Two oracle calls per two-point estimate.
inline constexpr std::size_t kTwoPointCost = 2;

struct TwoPointEstimate {
  Vector g;
  double mu_used;
  Vector v_used;
  std::size_t szo_cost = kTwoPointCost;
};

/// g = d / (2 mu) * (F(x + mu v; xi) - F(x - mu v; xi)) * v.
///
/// The probes x +/- mu v are not projected: objectives are evaluated on all of
/// R^d, which keeps E_v[g] equal to the gradient of the smoothed surrogate.
template <StochasticProblem P>
TwoPointEstimate finite_difference(const P& problem, const Vector& x, double mu, const Vector& v,
                                   const typename P::Noise& xi) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("smoothing parameter must be positive");
  const std::size_t d = problem.dimension();
  if (x.size() != d || v.size() != d) throw std::invalid_argument("dimension mismatch in finite difference");
  require_finite(x, "query point");

  Vector plus = x;
  plus.axpy(mu, v);
  Vector minus = x;
  minus.axpy(-mu, v);
  const auto [f_plus, f_minus] = problem.evaluate_pair(plus, minus, xi);

  const double coeff = static_cast<double>(d) / (2.0 * mu) * (f_plus - f_minus);
  return TwoPointEstimate{coeff * v, mu, v, kTwoPointCost};
}

struct McEstimate {
  double mean;
  double std_error;
};

struct McVectorEstimate {
  Vector mean;
  Vector std_error;
};

/// Monte-Carlo estimate of f_mu(x) = E_{u ~ U(B^d)} f(x + mu u), one fresh
/// noise draw per ball sample.
template <StochasticProblem P>
McEstimate smoothed_value_mc(const P& problem, const Vector& x, double mu, std::size_t n_samples, RngStream& rng) {
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  const std::size_t d = problem.dimension();
  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (std::size_t s = 0; s < n_samples; ++s) {
    Vector probe = x;
    probe.axpy(mu, sample_unit_ball(rng, d));
    const auto xi = problem.sample_noise(rng);
    const double f = problem.evaluate_pair(probe, probe, xi).first;
    sum.add(f);
    sum_sq.add(f * f);
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, (sum_sq.value() - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

/// Componentwise Monte-Carlo mean and standard error of the two-point estimator.
template <StochasticProblem P>
McVectorEstimate smoothed_grad_mc(const P& problem, const Vector& x, double mu, std::size_t n_samples,
                                  RngStream& rng) {
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  const std::size_t d = problem.dimension();
  std::vector<CompensatedSum> sum(d);
  std::vector<CompensatedSum> sum_sq(d);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Vector v = sample_unit_sphere(rng, d);
    const auto xi = problem.sample_noise(rng);
    const TwoPointEstimate est = finite_difference(problem, x, mu, v, xi);
    for (std::size_t i = 0; i < d; ++i) {
      sum[i].add(est.g[i]);
      sum_sq[i].add(est.g[i] * est.g[i]);
    }
  }
  const double n = static_cast<double>(n_samples);
  McVectorEstimate out{Vector(d), Vector(d)};
  for (std::size_t i = 0; i < d; ++i) {
    const double mean = sum[i].value() / n;
    const double var = std::max(0.0, (sum_sq[i].value() - n * mean * mean) / (n - 1.0));
    out.mean[i] = mean;
    out.std_error[i] = std::sqrt(var / n);
  }
  return out;
}

}  // namespace poem
