#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rgds {

/// Small dense row-major matrix of doubles.
///
/// Every matrix in this library is tiny (n x n with n the vertex count, or a
/// layered (l*n) x (l*n) matrix), so a flat vector beats a general linear
/// algebra package in the hot band-product loops.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator*=(double factor) noexcept;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(Matrix a, const Matrix& b);

/// out += a * b, no allocation.
void add_product(Matrix& out, const Matrix& a, const Matrix& b);

/// Maximum absolute row sum.
double row_norm(const Matrix& m) noexcept;
/// Sum of absolute values of all entries.
double entry_norm(const Matrix& m) noexcept;
double max_entry(const Matrix& m) noexcept;
bool all_nonnegative(const Matrix& m) noexcept;

struct SpectralRadius {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Perron root of a square non-negative matrix.
///
/// Power iteration with 1-norm normalisation on the shifted matrix
/// M + ||M||_row I, which has the same Perron vector but no other eigenvalue
/// on the spectral circle, so periodic (e.g. layered/companion) matrices
/// converge. Stops when successive estimates agree to `tolerance` relative,
/// or after `max_iterations`.
SpectralRadius spectral_radius(const Matrix& m, int max_iterations = 10000,
                               double tolerance = 1e-12);

}  // namespace rgds
