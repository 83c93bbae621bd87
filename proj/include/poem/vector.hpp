#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace poem {

/// Dense real coordinate vector. Length is fixed at construction.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> init) : data_(init) {}
  explicit Vector(std::vector<double> coords) : data_(std::move(coords)) {}

  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  [[nodiscard]] std::span<double> span() noexcept { return data_; }
  [[nodiscard]] std::span<const double> span() const noexcept { return data_; }
  [[nodiscard]] const std::vector<double>& coords() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  Vector& operator+=(const Vector& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Vector& operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
  }

  /// this += alpha * x
  Vector& axpy(double alpha, const Vector& x) {
    check_same(x);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * x.data_[i];
    return *this;
  }

  friend bool operator==(const Vector&, const Vector&) = default;

  static Vector ones(std::size_t n) { return Vector(n, 1.0); }

 private:
  void check_same(const Vector& o) const {
    if (o.size() != size()) {
      throw std::invalid_argument("dimension mismatch: " + std::to_string(size()) + " vs " +
                                  std::to_string(o.size()));
    }
  }

  std::vector<double> data_;
};

inline Vector operator+(Vector a, const Vector& b) { return a += b; }
inline Vector operator-(Vector a, const Vector& b) { return a -= b; }
inline Vector operator*(double s, Vector a) { return a *= s; }
inline Vector operator*(Vector a, double s) { return a *= s; }
inline Vector operator-(Vector a) { return a *= -1.0; }

inline std::ostream& operator<<(std::ostream& out, const Vector& v) {
  out << '(';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  return out << ')';
}

inline void require_same_dimension(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
  }
}

inline void require_finite(const Vector& x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw std::domain_error(std::string(what) + " has a non-finite coordinate");
  }
}

inline double dot(const Vector& x, const Vector& y) {
  require_same_dimension(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double squared_norm(const Vector& x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double norm(const Vector& x) noexcept { return std::sqrt(squared_norm(x)); }

inline double norm1(const Vector& x) noexcept {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

/// Euclidean distance ||x - y||.
inline double distance(const Vector& x, const Vector& y) {
  require_same_dimension(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Componentwise compensated accumulator for sums of scaled vectors.
class CompensatedVectorSum {
 public:
  CompensatedVectorSum() = default;
  explicit CompensatedVectorSum(std::size_t n) : parts_(n) {}

  void add_scaled(double weight, const Vector& x) {
    if (x.size() != parts_.size()) throw std::invalid_argument("dimension mismatch in weighted sum");
    for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i].add(weight * x[i]);
  }

  [[nodiscard]] Vector value() const {
    Vector out(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i) out[i] = parts_[i].value();
    return out;
  }

  [[nodiscard]] std::size_t size() const noexcept { return parts_.size(); }

 private:
  std::vector<CompensatedSum> parts_;
};

}  // namespace poem
