#include "rgds/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "rgds/errors.hpp"

namespace rgds {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error(ErrorKind::ShapeMismatch, "ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw Error(ErrorKind::ShapeMismatch, "matrix sum of different shapes");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double factor) noexcept {
  for (double& x : data_) x *= factor;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  add_product(out, a, b);
  return out;
}

Matrix operator+(Matrix a, const Matrix& b) {
  a += b;
  return a;
}

void add_product(Matrix& out, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows() || out.rows() != a.rows() || out.cols() != b.cols())
    throw Error(ErrorKind::ShapeMismatch, "matrix product shapes do not conform");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) out(i, j) += aip * b(p, j);
    }
  }
}

double row_norm(const Matrix& m) noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) sum += std::abs(m(i, j));
    best = std::max(best, sum);
  }
  return best;
}

double entry_norm(const Matrix& m) noexcept {
  double sum = 0.0;
  for (double x : m.data()) sum += std::abs(x);
  return sum;
}

double max_entry(const Matrix& m) noexcept {
  double best = 0.0;
  for (double x : m.data()) best = std::max(best, std::abs(x));
  return best;
}

bool all_nonnegative(const Matrix& m) noexcept {
  return std::ranges::all_of(m.data(), [](double x) { return x >= 0.0; });
}

SpectralRadius spectral_radius(const Matrix& m, int max_iterations, double tolerance) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::ShapeMismatch, "spectral radius of a non-square matrix");
  const std::size_t n = m.rows();
  SpectralRadius result;
  if (n == 0) return result;
  if (n == 1) {
    result.value = std::abs(m(0, 0));
    result.converged = true;
    return result;
  }
  const double shift = row_norm(m);
  if (shift == 0.0) {
    result.converged = true;
    return result;
  }

  std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n), mx(n);
  double previous = -1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    // Rayleigh-free estimate: ||M x||_1 / ||x||_1 with x >= 0, ||x||_1 = 1.
    double estimate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += m(i, j) * x[j];
      mx[i] = acc;
      estimate += acc;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = mx[i] + shift * x[i];
      total += y[i];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / total;

    result.value = estimate;
    result.iterations = it;
    if (previous >= 0.0 && std::abs(estimate - previous) <= tolerance * std::max(estimate, 1e-300)) {
      result.converged = true;
      break;
    }
    previous = estimate;
  }
  return result;
}

}  // namespace rgds
