#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "poem/domain.hpp"
#include "poem/libsvm.hpp"
#include "poem/sampling.hpp"
#include "poem/vector.hpp"

namespace poem {

/// A black-box objective F(x; xi) with two-point queries under one shared draw.
///
/// `lipschitz()` is the uniform constant L with |F(x;xi) - F(y;xi)| <= L ||x - y||
/// over every realization.
template <class P>
concept StochasticProblem = requires(const P& p, const Vector& x, RngStream& rng, const typename P::Noise& xi) {
  typename P::Noise;
  { p.dimension() } -> std::convertible_to<std::size_t>;
  { p.domain() } -> std::same_as<const Domain&>;
  { p.lipschitz() } -> std::convertible_to<double>;
  { p.sample_noise(rng) } -> std::same_as<typename P::Noise>;
  { p.evaluate_pair(x, x, xi) } -> std::same_as<std::pair<double, double>>;
};

template <class P>
concept HasExactObjective = StochasticProblem<P> && requires(const P& p, const Vector& x) {
  { p.objective(x) } -> std::convertible_to<double>;
  { p.minimizer() } -> std::same_as<std::optional<Vector>>;
  { p.optimal_value() } -> std::same_as<std::optional<double>>;
};

/// Problems whose smoothed surrogate has a closed-form gradient.
template <class P>
concept HasSmoothedGradient = StochasticProblem<P> && requires(const P& p, const Vector& x, double mu) {
  { p.smoothed_gradient(x, mu) } -> std::same_as<Vector>;
};

template <StochasticProblem P>
std::pair<double, double> evaluate_pair(const P& problem, const Vector& x, const Vector& y,
                                        const typename P::Noise& xi) {
  return problem.evaluate_pair(x, y, xi);
}

template <StochasticProblem P>
double evaluate(const P& problem, const Vector& x, const typename P::Noise& xi) {
  return problem.evaluate_pair(x, x, xi).first;
}

template <StochasticProblem P>
typename P::Noise sample_noise(const P& problem, RngStream& rng) {
  return problem.sample_noise(rng);
}

namespace detail {
inline void check_dim(const Vector& x, std::size_t d) {
  if (x.size() != d) {
    throw std::invalid_argument("dimension mismatch: point has " + std::to_string(x.size()) +
                                " coordinates, problem has " + std::to_string(d));
  }
}
}  // namespace detail

/// Hinge loss max{0, 1 - b a^T x} with (a, b) drawn uniformly from a dataset,
/// constrained to a centered Euclidean ball.
class HingeLossProblem {
 public:
  using Noise = std::size_t;  // example index

  HingeLossProblem(std::shared_ptr<const SparseDataset> data, double radius)
      : data_(std::move(data)), domain_(Domain::centered_ball(checked_dim(data_), radius)) {}

  [[nodiscard]] std::size_t dimension() const noexcept { return data_->dimension(); }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  [[nodiscard]] double lipschitz() const noexcept { return data_->max_row_norm(); }
  [[nodiscard]] const SparseDataset& dataset() const noexcept { return *data_; }

  Noise sample_noise(RngStream& rng) const { return sample_uniform_index(rng, data_->size()); }

  [[nodiscard]] std::pair<double, double> evaluate_pair(const Vector& x, const Vector& y, Noise i) const {
    detail::check_dim(x, dimension());
    detail::check_dim(y, dimension());
    const double b = data_->label(i);
    return {std::max(0.0, 1.0 - b * data_->row_dot(i, x)), std::max(0.0, 1.0 - b * data_->row_dot(i, y))};
  }

  /// Empirical risk over the full dataset.
  [[nodiscard]] double objective(const Vector& x) const {
    detail::check_dim(x, dimension());
    CompensatedSum s;
    for (std::size_t i = 0; i < data_->size(); ++i) s.add(std::max(0.0, 1.0 - data_->label(i) * data_->row_dot(i, x)));
    return s.value() / static_cast<double>(data_->size());
  }

  [[nodiscard]] std::optional<Vector> minimizer() const { return std::nullopt; }
  [[nodiscard]] std::optional<double> optimal_value() const { return std::nullopt; }

 private:
  static std::size_t checked_dim(const std::shared_ptr<const SparseDataset>& data) {
    if (!data || data->empty()) throw std::invalid_argument("hinge problem needs a nonempty dataset");
    if (data->dimension() == 0) throw std::invalid_argument("hinge problem needs at least one feature");
    return data->dimension();
  }

  std::shared_ptr<const SparseDataset> data_;
  Domain domain_;
};

inline HingeLossProblem make_hinge_svm(std::shared_ptr<const SparseDataset> data, double radius = 1.0) {
  return HingeLossProblem(std::move(data), radius);
}

inline HingeLossProblem make_hinge_svm(SparseDataset data, double radius = 1.0) {
  return HingeLossProblem(std::make_shared<const SparseDataset>(std::move(data)), radius);
}

enum class HardFunction { F1, F2 };

/// Pair of l1 objectives on R^d sharing oracle outputs whenever xi = 0.
///   f1(x) = L ||x||_1,      F1(x; xi) = L ||x||_1
///   f2(x) = L ||x - u||_1,  F2(x; 0) = L ||x||_1,
///                           F2(x; 1) = T L ||x - u||_1 - (T - 1) L ||x||_1
/// with u = (1 - 1/T) 1_d and P(xi = 1) = 1/T.
class HardInstance {
 public:
  using Noise = std::uint8_t;

  HardInstance(HardFunction which, double L, std::size_t T, std::size_t d)
      : which_(which), L_(L), T_(T), d_(d), domain_(Domain::unbounded(d == 0 ? 1 : d)) {
    if (T < 2) throw std::invalid_argument("hard instance needs T >= 2");
    if (!(L > 0.0)) throw std::invalid_argument("hard instance needs L > 0");
    if (d == 0) throw std::invalid_argument("hard instance needs d >= 1");
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return d_; }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  [[nodiscard]] HardFunction which() const noexcept { return which_; }
  [[nodiscard]] std::size_t horizon() const noexcept { return T_; }
  [[nodiscard]] double scale() const noexcept { return L_; }

  /// Euclidean Lipschitz bound over every component: L sqrt(d) for F1 and
  /// 2 T L sqrt(d) for F2 (the xi = 1 branch dominates).
  [[nodiscard]] double lipschitz() const noexcept {
    const double rd = std::sqrt(static_cast<double>(d_));
    return which_ == HardFunction::F1 ? L_ * rd : 2.0 * static_cast<double>(T_) * L_ * rd;
  }

  /// Euclidean Lipschitz constant of the mean objective, L sqrt(d) for both.
  [[nodiscard]] double objective_lipschitz() const noexcept { return L_ * std::sqrt(static_cast<double>(d_)); }

  [[nodiscard]] double success_probability() const noexcept { return 1.0 / static_cast<double>(T_); }

  Noise sample_noise(RngStream& rng) const { return rng.bernoulli(success_probability()) ? 1 : 0; }

  [[nodiscard]] std::pair<double, double> evaluate_pair(const Vector& x, const Vector& y, Noise xi) const {
    detail::check_dim(x, d_);
    detail::check_dim(y, d_);
    return {component(x, xi), component(y, xi)};
  }

  [[nodiscard]] double objective(const Vector& x) const {
    detail::check_dim(x, d_);
    return which_ == HardFunction::F1 ? L_ * norm1(x) : L_ * shifted_norm1(x);
  }

  [[nodiscard]] Vector shift() const { return Vector(d_, 1.0 - 1.0 / static_cast<double>(T_)); }

  [[nodiscard]] std::optional<Vector> minimizer() const {
    return which_ == HardFunction::F1 ? Vector(d_) : shift();
  }
  [[nodiscard]] std::optional<double> optimal_value() const { return 0.0; }

 private:
  [[nodiscard]] double shifted_norm1(const Vector& x) const noexcept {
    const double u = 1.0 - 1.0 / static_cast<double>(T_);
    double s = 0.0;
    for (double v : x) s += std::abs(v - u);
    return s;
  }

  [[nodiscard]] double component(const Vector& x, Noise xi) const noexcept {
    if (which_ == HardFunction::F1 || xi == 0) return L_ * norm1(x);
    const double T = static_cast<double>(T_);
    return T * L_ * shifted_norm1(x) - (T - 1.0) * L_ * norm1(x);
  }

  HardFunction which_;
  double L_;
  std::size_t T_;
  std::size_t d_;
  Domain domain_;
};

inline HardInstance make_hard_instance(HardFunction which, double L, std::size_t T, std::size_t d) {
  return HardInstance(which, L, T, d);
}

/// F(x; xi) = ||x - x_star|| + <xi, x>, xi uniform on the sphere of radius
/// `noise_level`. Mean objective ||x - x_star|| with optimum value 0.
class SyntheticNormProblem {
 public:
  using Noise = Vector;

  SyntheticNormProblem(Vector x_star, double noise_level, Domain domain)
      : x_star_(std::move(x_star)), noise_(noise_level), domain_(std::move(domain)) {
    if (x_star_.empty()) throw std::invalid_argument("synthetic problem needs d >= 1");
    if (!(noise_level >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
    if (domain_.dimension() != x_star_.size()) throw std::invalid_argument("domain dimension mismatch");
    if (!domain_.contains(x_star_)) throw std::invalid_argument("minimizer must lie in the domain");
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return x_star_.size(); }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  [[nodiscard]] double lipschitz() const noexcept { return 1.0 + noise_; }
  [[nodiscard]] double noise_level() const noexcept { return noise_; }

  Noise sample_noise(RngStream& rng) const {
    if (noise_ == 0.0) return Vector(dimension());
    Vector xi = sample_unit_sphere(rng, dimension());
    xi *= noise_;
    return xi;
  }

  [[nodiscard]] std::pair<double, double> evaluate_pair(const Vector& x, const Vector& y, const Noise& xi) const {
    detail::check_dim(x, dimension());
    detail::check_dim(y, dimension());
    detail::check_dim(xi, dimension());
    return {distance(x, x_star_) + dot(xi, x), distance(y, x_star_) + dot(xi, y)};
  }

  [[nodiscard]] double objective(const Vector& x) const {
    detail::check_dim(x, dimension());
    return distance(x, x_star_);
  }
  [[nodiscard]] std::optional<Vector> minimizer() const { return x_star_; }
  [[nodiscard]] std::optional<double> optimal_value() const { return 0.0; }

 private:
  Vector x_star_;
  double noise_;
  Domain domain_;
};

struct SyntheticOptions {
  double radius = 1.0;
  bool bounded = true;
  /// ||x_star|| as a fraction of the radius.
  double optimum_fraction = 0.5;
};

/// Minimizer drawn uniformly on the sphere of radius optimum_fraction * radius.
inline SyntheticNormProblem make_synthetic_known_optimum(std::size_t d, double noise_level, std::uint64_t rng_seed,
                                                         const SyntheticOptions& opts = {}) {
  if (d == 0) throw std::invalid_argument("synthetic problem needs d >= 1");
  if (!(opts.radius > 0.0)) throw std::invalid_argument("synthetic radius must be positive");
  RngStream rng(rng_seed);
  Vector x_star = sample_unit_sphere(rng, d);
  x_star *= opts.optimum_fraction * opts.radius;
  Domain domain = opts.bounded ? Domain::centered_ball(d, opts.radius) : Domain::unbounded(d);
  return SyntheticNormProblem(std::move(x_star), noise_level, std::move(domain));
}

/// F(x; xi) = <c + xi, x>, xi uniform on the sphere of radius `noise_level`.
/// Smoothing leaves the gradient c unchanged.
class SyntheticLinearProblem {
 public:
  using Noise = Vector;

  SyntheticLinearProblem(Vector c, double noise_level, Domain domain)
      : c_(std::move(c)), noise_(noise_level), domain_(std::move(domain)) {
    if (c_.empty()) throw std::invalid_argument("linear problem needs d >= 1");
    if (!(noise_level >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
    if (domain_.dimension() != c_.size()) throw std::invalid_argument("domain dimension mismatch");
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return c_.size(); }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  [[nodiscard]] double lipschitz() const noexcept { return norm(c_) + noise_; }
  [[nodiscard]] const Vector& direction() const noexcept { return c_; }

  Noise sample_noise(RngStream& rng) const {
    if (noise_ == 0.0) return Vector(dimension());
    Vector xi = sample_unit_sphere(rng, dimension());
    xi *= noise_;
    return xi;
  }

  [[nodiscard]] std::pair<double, double> evaluate_pair(const Vector& x, const Vector& y, const Noise& xi) const {
    detail::check_dim(x, dimension());
    detail::check_dim(y, dimension());
    return {dot(c_, x) + dot(xi, x), dot(c_, y) + dot(xi, y)};
  }

  [[nodiscard]] double objective(const Vector& x) const { return dot(c_, x); }

  [[nodiscard]] Vector smoothed_gradient(const Vector& x, double /*mu*/) const {
    detail::check_dim(x, dimension());
    return c_;
  }

  /// Known only for a centered ball: -R c / ||c||.
  [[nodiscard]] std::optional<Vector> minimizer() const {
    const auto* ball = std::get_if<Ball>(&domain_.kind());
    const double cn = norm(c_);
    if (ball == nullptr || cn == 0.0 || norm(ball->center) != 0.0) return std::nullopt;
    return (-ball->radius / cn) * c_;
  }
  [[nodiscard]] std::optional<double> optimal_value() const {
    auto m = minimizer();
    if (!m) return std::nullopt;
    return objective(*m);
  }

 private:
  Vector c_;
  double noise_;
  Domain domain_;
};

/// Noise-free problem F(x; xi) = f(x) built from a callable.
template <class Fn>
class FunctionProblem {
 public:
  using Noise = std::monostate;

  FunctionProblem(Fn fn, Domain domain, double lipschitz)
      : fn_(std::move(fn)), domain_(std::move(domain)), L_(lipschitz) {}

  [[nodiscard]] std::size_t dimension() const noexcept { return domain_.dimension(); }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  [[nodiscard]] double lipschitz() const noexcept { return L_; }

  Noise sample_noise(RngStream&) const { return {}; }

  [[nodiscard]] std::pair<double, double> evaluate_pair(const Vector& x, const Vector& y, Noise) const {
    detail::check_dim(x, dimension());
    detail::check_dim(y, dimension());
    return {fn_(x), fn_(y)};
  }

  [[nodiscard]] double objective(const Vector& x) const { return fn_(x); }
  [[nodiscard]] std::optional<Vector> minimizer() const { return std::nullopt; }
  [[nodiscard]] std::optional<double> optimal_value() const { return std::nullopt; }

 private:
  Fn fn_;
  Domain domain_;
  double L_;
};

inline auto make_zero_problem(Domain domain) {
  auto zero = [](const Vector&) { return 0.0; };
  return FunctionProblem<decltype(zero)>(zero, std::move(domain), 0.0);
}

}  // namespace poem
