#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

#include "poem/vector.hpp"

namespace poem {

struct Ball {
  Vector center;
  double radius;
};

struct Box {
  Vector lower;
  Vector upper;
};

struct Unbounded {
  std::size_t dimension;
};

/// Feasible set defined by its Euclidean projection.
class Domain {
 public:
  static Domain ball(Vector center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ball radius must be positive");
    if (center.empty()) throw std::invalid_argument("ball center must have dimension >= 1");
    require_finite(center, "ball center");
    return Domain(Ball{std::move(center), radius});
  }

  static Domain centered_ball(std::size_t dimension, double radius) {
    return ball(Vector(dimension), radius);
  }

  static Domain box(Vector lower, Vector upper) {
    require_same_dimension(lower, upper);
    if (lower.empty()) throw std::invalid_argument("box must have dimension >= 1");
    require_finite(lower, "box lower bound");
    require_finite(upper, "box upper bound");
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (lower[i] > upper[i]) throw std::invalid_argument("box lower bound exceeds upper bound");
    }
    return Domain(Box{std::move(lower), std::move(upper)});
  }

  static Domain unbounded(std::size_t dimension) {
    if (dimension == 0) throw std::invalid_argument("unbounded domain must have dimension >= 1");
    return Domain(Unbounded{dimension});
  }

  [[nodiscard]] std::size_t dimension() const noexcept {
    return std::visit(
        [](const auto& k) -> std::size_t {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Ball>) return k.center.size();
          else if constexpr (std::is_same_v<K, Box>) return k.lower.size();
          else return k.dimension;
        },
        kind_);
  }

  [[nodiscard]] bool is_bounded() const noexcept { return !std::holds_alternative<Unbounded>(kind_); }
  [[nodiscard]] const std::variant<Ball, Box, Unbounded>& kind() const noexcept { return kind_; }

  /// Ball: 2 * radius. Box: length of the diagonal. Unbounded: +infinity.
  [[nodiscard]] double diameter() const noexcept {
    return std::visit(
        [](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Ball>) return 2.0 * k.radius;
          else if constexpr (std::is_same_v<K, Box>) return distance(k.upper, k.lower);
          else return std::numeric_limits<double>::infinity();
        },
        kind_);
  }

  /// Euclidean projection. Points already in the domain are returned unchanged,
  /// which makes the operation exactly idempotent.
  [[nodiscard]] Vector project(const Vector& x) const {
    check_dimension(x);
    return std::visit(
        [&x](const auto& k) -> Vector {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Ball>) {
            return project_ball(k, x);
          } else if constexpr (std::is_same_v<K, Box>) {
            Vector out = x;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], k.lower[i], k.upper[i]);
            return out;
          } else {
            return x;
          }
        },
        kind_);
  }

  /// Membership with relative slack `rel_tol` on the defining inequality.
  [[nodiscard]] bool contains(const Vector& x, double rel_tol = 1e-12) const {
    check_dimension(x);
    return std::visit(
        [&x, rel_tol](const auto& k) -> bool {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Ball>) {
            return distance(x, k.center) <= k.radius * (1.0 + rel_tol);
          } else if constexpr (std::is_same_v<K, Box>) {
            for (std::size_t i = 0; i < x.size(); ++i) {
              const double slack = rel_tol * std::max({1.0, std::abs(k.lower[i]), std::abs(k.upper[i])});
              if (x[i] < k.lower[i] - slack || x[i] > k.upper[i] + slack) return false;
            }
            return true;
          } else {
            return true;
          }
        },
        kind_);
  }

 private:
  explicit Domain(std::variant<Ball, Box, Unbounded> kind) : kind_(std::move(kind)) {}

  void check_dimension(const Vector& x) const {
    if (x.size() != dimension()) {
      throw std::invalid_argument("dimension mismatch: point has " + std::to_string(x.size()) +
                                  " coordinates, domain has " + std::to_string(dimension()));
    }
  }

  static Vector project_ball(const Ball& b, const Vector& x) {
    const double dist = distance(x, b.center);
    if (dist <= b.radius) return x;
    // Shrink the scale until the rounded result lies inside, so a second
    // projection is the identity.
    double scale = b.radius / dist;
    Vector out(x.size());
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = b.center[i] + scale * (x[i] - b.center[i]);
      if (distance(out, b.center) <= b.radius) break;
      scale = std::nextafter(scale, 0.0);
    }
    return out;
  }

  std::variant<Ball, Box, Unbounded> kind_;
};

inline Vector project(const Domain& domain, const Vector& x) { return domain.project(x); }
inline double diameter(const Domain& domain) noexcept { return domain.diameter(); }

}  // namespace poem
