#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace relay_ee {

/// Configuration or input that violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the admissible domain of a closed-form expression,
/// e.g. a fairness ratio below the water-filling floor.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The power budget cannot cover even the cheapest admissible operating point.
class InfeasibleBudget : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive search requested on an instance that is too large to enumerate.
class GuardRailError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major 2-D array.
template <class T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<T> flat() noexcept { return data_; }
  [[nodiscard]] std::span<const T> flat() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace relay_ee
