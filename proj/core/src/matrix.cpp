#include "didots/matrix.hpp"

#include <cmath>

namespace didots {

Matrix Matrix::filled(int r, int c, double v) {
  Matrix m(r, c);
  for (double& x : m.data) x = v;
  return m;
}

Matrix Matrix::gaussian(int r, int c, Rng& rng, double stddev) {
  Matrix m(r, c);
  for (double& x : m.data) x = rng.next_gaussian() * stddev;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols, rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
  }
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw Error(ErrorCode::CONFIG_INVALID, "matmul shape mismatch");
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
    double* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
    for (int k = 0; k < a.cols; ++k) {
      double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw Error(ErrorCode::CONFIG_INVALID, "matmul_nt shape mismatch");
  Matrix out(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = &b.data[static_cast<std::size_t>(j) * b.cols];
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      out.at(i, j) = acc;
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw Error(ErrorCode::CONFIG_INVALID, "matmul_tn shape mismatch");
  Matrix out(a.cols, b.cols);
  for (int k = 0; k < a.rows; ++k) {
    const double* arow = &a.data[static_cast<std::size_t>(k) * a.cols];
    const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
    for (int i = 0; i < a.cols; ++i) {
      double aki = arow[i];
      if (aki == 0.0) continue;
      double* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
    }
  }
  return out;
}

void add_in_place(Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::CONFIG_INVALID, "add shape mismatch");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

void add_scaled_in_place(Matrix& a, const Matrix& b, double s) {
  if (!a.same_shape(b)) throw Error(ErrorCode::CONFIG_INVALID, "add shape mismatch");
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += s * b.data[i];
}

Matrix add(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  add_in_place(out, b);
  return out;
}

Matrix scale(const Matrix& a, double s) {
  Matrix out = a;
  for (double& x : out.data) x *= s;
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double x : a.data) m = std::max(m, std::fabs(x));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    m = std::max(m, std::fabs(a.data[i] - b.data[i]));
  }
  return m;
}

}  // namespace didots
