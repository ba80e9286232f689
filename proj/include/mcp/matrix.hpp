#pragma once

#include "mcp/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcp {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coefficients of a vector on the frame dual to the coframe.
template <class T>
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n) : c_(n, T(0)) {}
  Vec(std::initializer_list<T> init) : c_(init) {}
  explicit Vec(std::vector<T> c) : c_(std::move(c)) {}

  static Vec unit(std::size_t n, std::size_t i) {
    Vec v(n);
    v.c_.at(i) = T(1);
    return v;
  }

  std::size_t size() const { return c_.size(); }
  T& operator[](std::size_t i) { return c_[i]; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  const std::vector<T>& coeffs() const { return c_; }
  auto begin() const { return c_.begin(); }
  auto end() const { return c_.end(); }

  bool is_zero(double tol = 0.0) const {
    return std::all_of(c_.begin(), c_.end(), [tol](const T& x) { return scalar_traits<T>::is_zero(x, tol); });
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : c_) m = std::max(m, scalar_traits<T>::magnitude(x));
    return m;
  }

  Vec& operator+=(const Vec& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(const T& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator-(Vec a) { return a *= T(-1); }
  friend Vec operator*(const T& s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, const T& s) { return a *= s; }
  friend bool operator==(const Vec& a, const Vec& b) { return a.c_ == b.c_; }

  friend T dot(const Vec& a, const Vec& b) {
    a.check(b);
    T s(0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) s += a.c_[i] * b.c_[i];
    return s;
  }

  template <class U>
  Vec<U> cast() const {
    std::vector<U> out;
    out.reserve(c_.size());
    for (const auto& x : c_) out.push_back(scalar_traits<U>::from(x));
    return Vec<U>(std::move(out));
  }

 private:
  void check(const Vec& o) const {
    if (o.c_.size() != c_.size()) throw DimensionError("vector length mismatch");
  }
  std::vector<T> c_;
};

using Vector = Vec<Rational>;
using FVector = Vec<double>;

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw DimensionError("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix diagonal(const std::vector<T>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  /// Matrix whose columns are the given vectors.
  static Matrix from_columns(std::size_t n, const std::vector<Vec<T>>& cols) {
    Matrix m(n, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != n) throw DimensionError("column length mismatch");
      for (std::size_t i = 0; i < n; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }
  static Matrix from_rows(std::size_t n, const std::vector<Vec<T>>& rows) {
    Matrix m(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != n) throw DimensionError("row length mismatch");
      for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }
  /// Outer product u vᵀ.
  static Matrix outer(const Vec<T>& u, const Vec<T>& v) {
    Matrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vec<T> column(std::size_t j) const {
    Vec<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  Vec<T> row(std::size_t i) const {
    Vec<T> v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_symmetric(double tol = 0.0) const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (!scalar_traits<T>::is_zero((*this)(i, j) - (*this)(j, i), tol)) return false;
    return true;
  }

  bool is_zero(double tol = 0.0) const {
    return std::all_of(data_.begin(), data_.end(), [tol](const T& x) { return scalar_traits<T>::is_zero(x, tol); });
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : data_) m = std::max(m, scalar_traits<T>::magnitude(x));
    return m;
  }

  Matrix& operator+=(const Matrix& o) {
    same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) { return a *= T(-1); }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
    Matrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (scalar_traits<T>::exact && scalar_traits<T>::is_zero(aik, 0.0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }

  friend Vec<T> operator*(const Matrix& a, const Vec<T>& v) {
    if (a.cols_ != v.size()) throw DimensionError("matrix-vector shape mismatch");
    Vec<T> out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) out[i] += a(i, j) * v[j];
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  template <class U>
  Matrix<U> cast() const {
    Matrix<U> m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = scalar_traits<U>::from((*this)(i, j));
    return m;
  }

 private:
  void same_shape(const Matrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using QMatrix = Matrix<Rational>;
using FMatrix = Matrix<double>;

/// gᵀ-pairing uᵀ G v.
template <class T>
T bilinear(const Matrix<T>& g, const Vec<T>& u, const Vec<T>& v) {
  return dot(u, g * v);
}

template <class T>
std::string to_string(const Vec<T>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    if constexpr (scalar_traits<T>::exact) os << to_string(v[i]);
    else os << v[i];
  }
  os << ')';
  return os.str();
}

}  // namespace mcp
