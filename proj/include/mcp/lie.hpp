#pragma once

#include "mcp/exterior.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mcp {

class JacobiError : public std::invalid_argument {
 public:
  JacobiError(std::size_t i, std::size_t j, std::size_t l, std::size_t k, Rational value)
      : std::invalid_argument("Jacobi identity fails on (X" + std::to_string(i + 1) + ", X" + std::to_string(j + 1) +
                              ", X" + std::to_string(l + 1) + "): component X" + std::to_string(k + 1) + " = " +
                              to_string(value)),
        i(i), j(j), l(l), k(k), value(std::move(value)) {}

  std::size_t i, j, l, k;  // 0-based
  Rational value;
};

/// Subspace of the Lie algebra stored by its reduced row echelon basis, so
/// that two distributions are equal iff their bases are identical.
class Distribution {
 public:
  Distribution() = default;
  Distribution(std::size_t ambient, const std::vector<Vector>& spanning) : ambient_(ambient) {
    if (spanning.empty()) return;
    auto e = rref(QMatrix::from_rows(ambient, spanning));
    pivots_ = e.pivots;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) basis_.push_back(e.reduced.row(r));
  }

  static Distribution span_of_units(std::size_t ambient, const std::vector<std::size_t>& indices) {
    std::vector<Vector> vs;
    for (auto i : indices) vs.push_back(Vector::unit(ambient, i));
    return Distribution(ambient, vs);
  }

  std::size_t ambient() const { return ambient_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Vector>& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Component of v outside the span, after eliminating the pivot columns.
  Vector residual(const Vector& v) const {
    Vector r = v;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      Rational c = r[pivots_[i]];
      if (c != 0) r -= c * basis_[i];
    }
    return r;
  }

  bool contains(const Vector& v) const { return residual(v).is_zero(); }
  bool contains(const Distribution& d) const {
    for (const auto& b : d.basis_)
      if (!contains(b)) return false;
    return true;
  }

  /// Unit vectors at the non-pivot columns; together with the basis they span everything.
  std::vector<Vector> complement_units() const {
    std::vector<bool> pivot(ambient_, false);
    for (auto p : pivots_) pivot[p] = true;
    std::vector<Vector> out;
    for (std::size_t i = 0; i < ambient_; ++i)
      if (!pivot[i]) out.push_back(Vector::unit(ambient_, i));
    return out;
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

 private:
  std::size_t ambient_ = 0;
  std::vector<Vector> basis_;
  std::vector<std::size_t> pivots_;
};

inline Distribution sum(const Distribution& a, const Distribution& b) {
  std::vector<Vector> vs = a.basis();
  vs.insert(vs.end(), b.basis().begin(), b.basis().end());
  return Distribution(a.ambient(), vs);
}

/// Common kernel of a set of 1-forms and 2-forms: vectors v with a(v) = 0 and i_v b = 0.
inline Distribution common_kernel(std::size_t n, const std::vector<Form>& forms) {
  std::vector<Vector> rows;
  for (const auto& f : forms) {
    if (f.degree() == 1) {
      rows.push_back(coefficients(f));
    } else if (f.degree() == 2) {
      QMatrix m = skew_matrix(f);
      for (std::size_t i = 0; i < n; ++i) rows.push_back(m.row(i));
    } else {
      throw DegreeError("common_kernel: only 1-forms and 2-forms are supported");
    }
  }
  if (rows.empty()) {
    std::vector<Vector> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back(Vector::unit(n, i));
    return Distribution(n, all);
  }
  return Distribution(n, kernel(QMatrix::from_rows(n, rows)));
}

/// Lie algebra on a frame X_1..X_n, given by the differentials of the dual coframe.
/// Brackets follow dω_k(X_i, X_j) = -ω_k([X_i, X_j]).
class LieAlgebra {
 public:
  /// `dw[k]` is dω_k. Throws JacobiError with a witness when the brackets
  /// recovered from the equations violate the Jacobi identity.
  static LieAlgebra from_structure_equations(std::vector<std::string> names, std::vector<Form> dw) {
    const std::size_t n = names.size();
    if (dw.size() != n) throw DimensionError("one structure equation per coframe element is required");
    LieAlgebra L;
    L.names_ = std::move(names);
    L.n_ = n;
    L.c_.assign(n * n * n, Rational(0));
    for (std::size_t k = 0; k < n; ++k) {
      if (dw[k].dim() != n || dw[k].degree() != 2)
        throw DegreeError("structure equation for " + L.names_[k] + " must be a 2-form in dimension " + std::to_string(n));
      for (const auto& [m, c] : dw[k].terms()) {
        // dω_k(X_i, X_j) = c for i < j under determinant evaluation
        L.c_[L.idx(k, m[0], m[1])] = -c;
        L.c_[L.idx(k, m[1], m[0])] = c;
      }
    }
    L.dw_ = std::move(dw);
    L.check_jacobi();
    return L;
  }

  static LieAlgebra abelian(std::size_t n) {
    std::vector<Form> dw(n, Form(n, 2));
    return from_structure_equations(default_coframe_names(n), std::move(dw));
  }

  std::size_t dim() const { return n_; }
  const std::vector<std::string>& names() const { return names_; }

  /// c^k_{ij} with [X_i, X_j] = Σ_k c^k_{ij} X_k.
  const Rational& structure_constant(std::size_t k, std::size_t i, std::size_t j) const { return c_[idx(k, i, j)]; }

  /// dω_k.
  const Form& d_coframe(std::size_t k) const { return dw_.at(k); }

  Vector bracket(std::size_t i, std::size_t j) const {
    Vector v(n_);
    for (std::size_t k = 0; k < n_; ++k) v[k] = c_[idx(k, i, j)];
    return v;
  }

  Vector bracket(const Vector& u, const Vector& v) const {
    Vector out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (u[i] == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (v[j] == 0 || i == j) continue;
        Rational s = u[i] * v[j];
        for (std::size_t k = 0; k < n_; ++k) {
          const Rational& c = c_[idx(k, i, j)];
          if (c != 0) out[k] += s * c;
        }
      }
    }
    return out;
  }

  /// Chevalley-Eilenberg differential, extended from the coframe as an anti-derivation.
  Form differential(const Form& a) const {
    if (a.dim() != n_) throw DimensionError("differential: form dimension does not match algebra");
    if (a.degree() >= n_) throw DegreeError("differential: degree must be below the dimension");
    Form out(n_, a.degree() + 1);
    for (const auto& [m, c] : a.terms()) {
      for (std::size_t pos = 0; pos < m.size(); ++pos) {
        Form left = Form::constant(n_, pos % 2 == 0 ? c : Rational(-c));
        for (std::size_t q = 0; q < pos; ++q) left = wedge(left, Form::basis(n_, m[q]));
        Form term = wedge(left, dw_[m[pos]]);
        for (std::size_t q = pos + 1; q < m.size(); ++q) term = wedge(term, Form::basis(n_, m[q]));
        out += term;
      }
    }
    return out;
  }

 private:
  std::size_t idx(std::size_t k, std::size_t i, std::size_t j) const { return (k * n_ + i) * n_ + j; }

  void check_jacobi() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        for (std::size_t l = j + 1; l < n_; ++l) {
          Vector xi = Vector::unit(n_, i), xj = Vector::unit(n_, j), xl = Vector::unit(n_, l);
          Vector jac = bracket(bracket(xi, xj), xl) + bracket(bracket(xj, xl), xi) + bracket(bracket(xl, xi), xj);
          for (std::size_t k = 0; k < n_; ++k)
            if (jac[k] != 0) throw JacobiError(i, j, l, k, jac[k]);
        }
  }

  std::size_t n_ = 0;
  std::vector<std::string> names_;
  std::vector<Rational> c_;
  std::vector<Form> dw_;
};

struct SubalgebraCheck {
  bool closed = true;
  // first offending basis pair (indices into D.basis()), their bracket, and its part outside D
  std::size_t a = 0, b = 0;
  Vector bracket;
  Vector residual;
};

inline SubalgebraCheck is_subalgebra(const LieAlgebra& L, const Distribution& d) {
  SubalgebraCheck out;
  const auto& B = d.basis();
  for (std::size_t i = 0; i < B.size(); ++i)
    for (std::size_t j = i + 1; j < B.size(); ++j) {
      Vector br = L.bracket(B[i], B[j]);
      Vector res = d.residual(br);
      if (!res.is_zero()) {
        out.closed = false;
        out.a = i;
        out.b = j;
        out.bracket = std::move(br);
        out.residual = std::move(res);
        return out;
      }
    }
  return out;
}

/// Span of all brackets of pairs drawn from `a` and `b`.
inline Distribution bracket_span(const LieAlgebra& L, const Distribution& a, const Distribution& b) {
  std::vector<Vector> vs;
  for (const auto& u : a.basis())
    for (const auto& v : b.basis()) vs.push_back(L.bracket(u, v));
  return Distribution(L.dim(), vs);
}

/// Center of the subalgebra D: elements of D commuting with all of D.
inline Distribution center(const LieAlgebra& L, const Distribution& d) {
  const auto& B = d.basis();
  const std::size_t m = B.size(), n = L.dim();
  if (m == 0) return d;
  // unknown coefficients c with Σ c_i [b_i, b_j] = 0 for all j
  QMatrix sys(n * m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      Vector br = L.bracket(B[i], B[j]);
      for (std::size_t k = 0; k < n; ++k) sys(j * n + k, i) = br[k];
    }
  std::vector<Vector> vs;
  for (const auto& c : kernel(sys)) {
    Vector v(n);
    for (std::size_t i = 0; i < m; ++i) v += c[i] * B[i];
    vs.push_back(v);
  }
  return Distribution(n, vs);
}

inline Distribution whole(const LieAlgebra& L) {
  std::vector<std::size_t> all(L.dim());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return Distribution::span_of_units(L.dim(), all);
}

/// A bracket-closed D is a Heisenberg algebra iff its derived algebra equals its
/// center and is one-dimensional (then the bracket is nondegenerate on D/center).
inline bool is_heisenberg(const LieAlgebra& L, const Distribution& d) {
  if (d.dim() < 3 || d.dim() % 2 == 0 || !is_subalgebra(L, d).closed) return false;
  Distribution derived = bracket_span(L, d, d);
  return derived.dim() == 1 && derived == center(L, d);
}

/// Length of the lower central series g ⊃ [g,g] ⊃ [g,[g,g]] ⊃ ... down to 0, or
/// nothing when the series stabilizes at a nonzero ideal. Diagnostic only.
inline std::optional<std::size_t> nilpotency_class(const LieAlgebra& L) {
  Distribution g = whole(L);
  Distribution cur = g;
  for (std::size_t step = 0; step <= L.dim(); ++step) {
    if (cur.dim() == 0) return step;
    Distribution next = bracket_span(L, g, cur);
    if (next.dim() == cur.dim()) return std::nullopt;
    cur = next;
  }
  return std::nullopt;
}

}  // namespace mcp
