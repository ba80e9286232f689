#pragma once

#include "mcp/matrix.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mcp {

class SingularMatrix : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Pivot threshold for floating-point elimination. Exact scalars ignore it.
inline constexpr double default_pivot_tol = 1e-12;

template <class T>
struct RowEchelon {
  Matrix<T> reduced;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Reduced row echelon form by Gauss-Jordan elimination.
/// Exact scalars pick the first nonzero pivot; floating point picks the largest.
template <class T>
RowEchelon<T> rref(Matrix<T> a, double tol = default_pivot_tol) {
  using traits = scalar_traits<T>;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t best = a.rows();
    double best_mag = -1.0;
    for (std::size_t i = r; i < a.rows(); ++i) {
      if (traits::is_zero(a(i, c), tol)) continue;
      if constexpr (traits::exact) {
        best = i;
        break;
      } else {
        double m = traits::magnitude(a(i, c));
        if (m > best_mag) { best_mag = m; best = i; }
      }
    }
    if (best == a.rows()) {
      if constexpr (!traits::exact)
        for (std::size_t i = r; i < a.rows(); ++i) a(i, c) = T(0);
      continue;
    }
    if (best != r)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(r, j), a(best, j));
    T inv = T(1) / a(r, c);
    for (std::size_t j = c; j < a.cols(); ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r || traits::is_zero(a(i, c), 0.0)) continue;
      T f = a(i, c);
      for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(a), std::move(pivots)};
}

template <class T>
std::size_t rank(const Matrix<T>& a, double tol = default_pivot_tol) {
  return rref(a, tol).pivots.size();
}

/// Kernel basis read off the RREF: one vector per free column, with that
/// free variable set to 1 and the other free variables 0.
template <class T>
std::vector<Vec<T>> kernel_from_rref(const RowEchelon<T>& e, std::size_t cols) {
  std::vector<bool> is_pivot(cols, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<Vec<T>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Vec<T> v(cols);
    v[free] = T(1);
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
std::vector<Vec<T>> kernel(const Matrix<T>& a, double tol = default_pivot_tol) {
  return kernel_from_rref(rref(a, tol), a.cols());
}

template <class T>
struct SolveResult {
  std::optional<Vec<T>> particular;  // empty when the system is inconsistent
  std::vector<Vec<T>> kernel;
};

/// Full solution set of A x = b.
template <class T>
SolveResult<T> solve(const Matrix<T>& a, const Vec<T>& b, double tol = default_pivot_tol) {
  if (b.size() != a.rows()) throw DimensionError("solve: right-hand side length does not match rows");
  const std::size_t n = a.cols();
  Matrix<T> aug(a.rows(), n + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  auto e = rref(aug, tol);
  SolveResult<T> out;
  bool consistent = e.pivots.empty() || e.pivots.back() != n;
  RowEchelon<T> coeff{e.reduced, e.pivots};
  if (!consistent) coeff.pivots.pop_back();
  out.kernel = kernel_from_rref(coeff, n);
  if (consistent) {
    Vec<T> x(n);
    for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = e.reduced(r, n);
    out.particular = std::move(x);
  }
  return out;
}

/// Determinant: Bareiss fraction-free elimination for exact scalars,
/// partial-pivot LU for floating point.
template <class T>
T det(Matrix<T> a) {
  using traits = scalar_traits<T>;
  if (!a.square()) throw DimensionError("det: matrix is not square");
  const std::size_t n = a.rows();
  if (n == 0) return T(1);
  T sign(1);
  if constexpr (traits::exact) {
    T prev(1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (a(k, k) == 0) {
        std::size_t s = k + 1;
        while (s < n && a(s, k) == 0) ++s;
        if (s == n) return T(0);
        for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(s, j));
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        a(i, k) = 0;
      }
      prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
  } else {
    T d(1);
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::fabs(a(i, k)) > std::fabs(a(p, k))) p = i;
      if (a(p, k) == 0) return T(0);
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
        d = -d;
      }
      d *= a(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        T f = a(i, k) / a(k, k);
        for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      }
    }
    return d;
  }
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a, double tol = default_pivot_tol) {
  if (!a.square()) throw DimensionError("inverse: matrix is not square");
  const std::size_t n = a.rows();
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = T(1);
  }
  auto e = rref(aug, tol);
  if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) throw SingularMatrix("inverse: matrix is singular");
  Matrix<T> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
  return inv;
}

/// Sylvester's criterion: every leading principal minor is positive.
inline bool is_positive_definite(const QMatrix& g) {
  if (!g.is_symmetric()) return false;
  for (std::size_t k = 1; k <= g.rows(); ++k) {
    QMatrix minor(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) minor(i, j) = g(i, j);
    if (det(minor) <= 0) return false;
  }
  return true;
}

/// Lower-triangular L with A = L Lᵀ; throws on a non-positive pivot.
inline FMatrix cholesky(const FMatrix& a) {
  if (!a.square()) throw DimensionError("cholesky: matrix is not square");
  const std::size_t n = a.rows();
  FMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0)) throw SingularMatrix("cholesky: matrix is not positive definite");
    l(j, j) = std::sqrt(s);
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return l;
}

inline bool is_positive_definite(const FMatrix& g, double tol) {
  if (!g.is_symmetric(tol)) return false;
  try {
    (void)cholesky(g);
  } catch (const SingularMatrix&) {
    return false;
  }
  return true;
}

}  // namespace mcp
