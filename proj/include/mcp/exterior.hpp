#pragma once

#include "mcp/linalg.hpp"

#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcp {

class DegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Strictly increasing 0-based coframe indices i1 < ... < ip.
using Monomial = std::vector<std::size_t>;

/// Constant-coefficient p-form on an n-dimensional space, stored sparsely on
/// increasing monomials. Zero coefficients are never stored.
class Form {
 public:
  Form() = default;
  Form(std::size_t dim, std::size_t degree) : dim_(dim), degree_(degree) {
    if (degree > dim) throw DegreeError("form degree " + std::to_string(degree) + " exceeds dimension " + std::to_string(dim));
  }

  /// The coframe 1-form ω_i.
  static Form basis(std::size_t dim, std::size_t i) {
    if (i >= dim) throw DimensionError("coframe index out of range");
    Form f(dim, 1);
    f.terms_[{i}] = 1;
    return f;
  }

  static Form constant(std::size_t dim, const Rational& c) {
    Form f(dim, 0);
    if (c != 0) f.terms_[{}] = c;
    return f;
  }

  /// ω_{i1}∧...∧ω_{ip} for arbitrary (not necessarily sorted) indices.
  static Form monomial(std::size_t dim, Monomial idx, const Rational& coeff = 1) {
    Form f(dim, idx.size());
    for (auto i : idx)
      if (i >= dim) throw DimensionError("coframe index out of range");
    int sign = sort_with_sign(idx);
    if (sign != 0 && coeff != 0) f.terms_[idx] = coeff * sign;
    return f;
  }

  std::size_t dim() const { return dim_; }
  std::size_t degree() const { return degree_; }
  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Adds c to the coefficient of a sorted monomial.
  void accumulate(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Form& operator+=(const Form& o) {
    same_space(o);
    for (const auto& [m, c] : o.terms_) accumulate(m, c);
    return *this;
  }
  Form& operator-=(const Form& o) {
    same_space(o);
    for (const auto& [m, c] : o.terms_) accumulate(m, -c);
    return *this;
  }
  Form& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator-(Form a) { return a *= Rational(-1); }
  friend Form operator*(const Rational& s, Form a) { return a *= s; }
  friend bool operator==(const Form& a, const Form& b) {
    return a.dim_ == b.dim_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

  /// Sorts in place; returns the permutation sign, or 0 on a repeated index.
  static int sort_with_sign(Monomial& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
      for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
        if (idx[j - 1] == idx[j]) return 0;
        std::swap(idx[j - 1], idx[j]);
        sign = -sign;
      }
    for (std::size_t i = 1; i < idx.size(); ++i)
      if (idx[i - 1] == idx[i]) return 0;
    return sign;
  }

 private:
  void same_space(const Form& o) const {
    if (o.dim_ != dim_ || o.degree_ != degree_) throw DegreeError("adding forms of different degree or dimension");
  }

  std::size_t dim_ = 0;
  std::size_t degree_ = 0;
  std::map<Monomial, Rational> terms_;
};

inline Form wedge(const Form& a, const Form& b) {
  if (a.dim() != b.dim()) throw DimensionError("wedge: forms live in different spaces");
  if (a.degree() + b.degree() > a.dim())
    throw DegreeError("wedge: degree " + std::to_string(a.degree() + b.degree()) + " exceeds dimension " +
                      std::to_string(a.dim()));
  Form out(a.dim(), a.degree() + b.degree());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      int sign = Form::sort_with_sign(m);
      if (sign != 0) out.accumulate(m, ca * cb * sign);
    }
  return out;
}

/// p-th wedge power; the 0th power is the constant 1.
inline Form wedge_power(const Form& a, unsigned p) {
  Form out = Form::constant(a.dim(), 1);
  for (unsigned i = 0; i < p; ++i) {
    if (out.degree() + a.degree() > a.dim()) return Form(a.dim(), a.dim());
    out = wedge(out, a);
  }
  return out;
}

/// Evaluation on p vectors with the determinant convention:
/// (ω_{i1}∧...∧ω_{ip})(v1..vp) = det[ω_{ia}(vb)].
inline Rational evaluate(const Form& a, std::span<const Vector> vs) {
  if (vs.size() != a.degree())
    throw DegreeError("evaluate: expected " + std::to_string(a.degree()) + " vectors, got " + std::to_string(vs.size()));
  for (const auto& v : vs)
    if (v.size() != a.dim()) throw DimensionError("evaluate: vector length does not match dimension");
  Rational total = 0;
  const std::size_t p = a.degree();
  for (const auto& [m, c] : a.terms()) {
    QMatrix sel(p, p);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t s = 0; s < p; ++s) sel(r, s) = vs[s][m[r]];
    total += c * det(sel);
  }
  return total;
}

inline Rational evaluate(const Form& a, std::initializer_list<Vector> vs) {
  std::vector<Vector> v(vs);
  return evaluate(a, std::span<const Vector>(v));
}

/// Contraction i_v a, so (i_v a)(w2..wp) = a(v, w2..wp).
inline Form interior(const Vector& v, const Form& a) {
  if (a.degree() == 0) throw DegreeError("interior: cannot contract a 0-form");
  if (v.size() != a.dim()) throw DimensionError("interior: vector length does not match dimension");
  Form out(a.dim(), a.degree() - 1);
  for (const auto& [m, c] : a.terms())
    for (std::size_t pos = 0; pos < m.size(); ++pos) {
      const Rational& vi = v[m[pos]];
      if (vi == 0) continue;
      Monomial rest;
      rest.reserve(m.size() - 1);
      for (std::size_t q = 0; q < m.size(); ++q)
        if (q != pos) rest.push_back(m[q]);
      out.accumulate(rest, (pos % 2 == 0 ? c : -c) * vi);
    }
  return out;
}

/// Skew matrix Ω with Ω(i,j) = a(X_i, X_j) for a 2-form a.
inline QMatrix skew_matrix(const Form& a) {
  if (a.degree() != 2) throw DegreeError("skew_matrix: expected a 2-form");
  QMatrix m(a.dim(), a.dim());
  for (const auto& [mono, c] : a.terms()) {
    m(mono[0], mono[1]) += c;
    m(mono[1], mono[0]) -= c;
  }
  return m;
}

/// Coefficient column of a 1-form.
inline Vector coefficients(const Form& a) {
  if (a.degree() != 1) throw DegreeError("coefficients: expected a 1-form");
  Vector v(a.dim());
  for (const auto& [m, c] : a.terms()) v[m[0]] = c;
  return v;
}

inline Form one_form(const Vector& coeffs) {
  Form f(coeffs.size(), 1);
  for (std::size_t i = 0; i < coeffs.size(); ++i) f.accumulate({i}, coeffs[i]);
  return f;
}

/// Coefficient on ω_1∧...∧ω_n of a top-degree form.
inline Rational top_coefficient(const Form& a) {
  if (a.degree() != a.dim()) throw DegreeError("top_coefficient: form is not of top degree");
  Monomial all(a.dim());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return a.coefficient(all);
}

inline std::vector<std::string> default_coframe_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("w" + std::to_string(i + 1));
  return names;
}

/// Canonical text, e.g. "w3^w4 + 1/2 w5^w6". Terms appear in lexicographic monomial order.
inline std::string render(const Form& a, const std::vector<std::string>& names) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : a.terms()) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (m.empty()) {
      os << to_string(mag);
      continue;
    }
    if (mag != 1) os << to_string(mag) << ' ';
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i) os << '^';
      os << names.at(m[i]);
    }
  }
  return os.str();
}

inline std::string render(const Form& a) { return render(a, default_coframe_names(a.dim())); }

}  // namespace mcp
