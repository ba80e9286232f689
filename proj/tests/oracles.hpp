#pragma once

// Reference implementations used only by the tests. They work from first
// principles (Leibniz sums over permutations, explicit bracket tables) and
// share no algorithm with the library beyond Rational arithmetic.

#include "mcp/dsl.hpp"
#include "mcp/metric.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using mcp::Form;
using mcp::QMatrix;
using mcp::Rational;
using mcp::Vector;

inline int perm_sign(const std::vector<std::size_t>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

/// Leibniz determinant.
inline Rational leibniz_det(const std::vector<std::vector<Rational>>& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  Rational total = 0;
  do {
    Rational t = perm_sign(p);
    for (std::size_t i = 0; i < n && t != 0; ++i) t *= m[i][p[i]];
    total += t;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

/// ω(v_1, ..., v_p) = Σ_I c_I det[ω_{I_a}(v_b)].
inline Rational eval(const Form& w, const std::vector<Vector>& vs) {
  Rational total = 0;
  for (const auto& [idx, c] : w.terms()) {
    std::vector<std::vector<Rational>> m(idx.size(), std::vector<Rational>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) m[a][b] = vs[b][idx[a]];
    total += c * leibniz_det(m);
  }
  return total;
}

inline Rational fact(std::size_t n) {
  Rational r = 1;
  for (std::size_t i = 2; i <= n; ++i) r *= Rational(static_cast<long long>(i));
  return r;
}

/// (α∧β)(v) = 1/(p!q!) Σ_σ sgn σ α(v_σ1..v_σp) β(v_σ(p+1)..).
inline Rational wedge_eval(const Form& a, const Form& b, const std::vector<Vector>& vs) {
  const std::size_t p = a.degree(), q = b.degree();
  std::vector<std::size_t> perm(p + q);
  std::iota(perm.begin(), perm.end(), 0);
  Rational total = 0;
  do {
    std::vector<Vector> va, vb;
    for (std::size_t i = 0; i < p; ++i) va.push_back(vs[perm[i]]);
    for (std::size_t i = p; i < p + q; ++i) vb.push_back(vs[perm[i]]);
    total += Rational(perm_sign(perm)) * eval(a, va) * eval(b, vb);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total / (fact(p) * fact(q));
}

/// Bracket table read off the structure equations: ω_k([X_i, X_j]) = -dω_k(X_i, X_j).
struct Brackets {
  std::size_t n = 0;
  std::vector<Vector> table;  // [i*n + j]

  explicit Brackets(const std::vector<Form>& dw) : n(dw.size()), table(n * n, Vector(n)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          table[i * n + j][k] = -eval(dw[k], {Vector::unit(n, i), Vector::unit(n, j)});
  }

  Vector operator()(const Vector& u, const Vector& v) const {
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (u[i] != 0 && v[j] != 0) out += (u[i] * v[j]) * table[i * n + j];
    return out;
  }
};

/// dω(v_0..v_p) = Σ_{i<j} (-1)^{i+j} ω([v_i, v_j], v_0, .., v̂_i, .., v̂_j, ..).
inline Rational d_eval(const Brackets& br, const Form& w, const std::vector<Vector>& vs) {
  Rational total = 0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      std::vector<Vector> args = {br(vs[i], vs[j])};
      for (std::size_t l = 0; l < vs.size(); ++l)
        if (l != i && l != j) args.push_back(vs[l]);
      Rational s = ((i + j) % 2 == 0) ? Rational(1) : Rational(-1);
      total += s * eval(w, args);
    }
  return total;
}

inline Rational g_of(const QMatrix& g, const Vector& u, const Vector& v) {
  Rational s = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) s += u[i] * g(i, j) * v[j];
  return s;
}

/// g(∇_X Y, Z) by the Koszul formula for left-invariant fields.
inline Rational koszul(const Brackets& br, const QMatrix& g, const Vector& x, const Vector& y, const Vector& z) {
  return (g_of(g, br(x, y), z) - g_of(g, br(y, z), x) + g_of(g, br(z, x), y)) / 2;
}

/// ∇_X Y solved from all Koszul values by Gaussian elimination on the Gram system.
inline Vector nabla(const Brackets& br, const QMatrix& g, const Vector& x, const Vector& y) {
  const std::size_t n = g.rows();
  Vector rhs(n);
  for (std::size_t k = 0; k < n; ++k) rhs[k] = koszul(br, g, x, y, Vector::unit(n, k));
  // g is symmetric positive definite: plain elimination without pivoting works
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = g(i, j);
    a[i][n] = rhs[i];
  }
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = c + 1; r < n; ++r) {
      Rational f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
    }
  Vector out(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational s = a[i][n];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * out[j];
    out[i] = s / a[i][i];
  }
  return out;
}

inline std::vector<std::vector<Rational>> invert(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (a[p][c] == 0) ++p;
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    Rational d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r)
      if (r != c && a[r][c] != 0) {
        Rational f = a[r][c];
        for (std::size_t j = 0; j < n; ++j) {
          a[r][j] -= f * a[c][j];
          inv[r][j] -= f * inv[c][j];
        }
      }
  }
  return inv;
}

/// Normal component of v with respect to span(basis), via the Gram matrix.
inline Vector normal_part(const QMatrix& g, const std::vector<Vector>& basis, const Vector& v) {
  const std::size_t p = basis.size();
  std::vector<std::vector<Rational>> gram(p, std::vector<Rational>(p));
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) gram[a][b] = g_of(g, basis[a], basis[b]);
  auto inv = invert(gram);
  Vector out = v;
  for (std::size_t a = 0; a < p; ++a) {
    Rational c = 0;
    for (std::size_t b = 0; b < p; ++b) c += inv[a][b] * g_of(g, basis[b], v);
    out -= c * basis[a];
  }
  return out;
}

/// H = Σ_ab (M⁻¹)_ab II(b_a, b_b) with M the Gram matrix of an arbitrary basis.
inline Vector trace_mean_curvature(const Brackets& br, const QMatrix& g, const std::vector<Vector>& basis) {
  const std::size_t p = basis.size(), n = g.rows();
  std::vector<std::vector<Rational>> gram(p, std::vector<Rational>(p));
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) gram[a][b] = g_of(g, basis[a], basis[b]);
  auto inv = invert(gram);
  Vector h(n);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b)
      if (inv[a][b] != 0) h += inv[a][b] * normal_part(g, basis, nabla(br, g, basis[a], basis[b]));
  return h;
}

/// Substitutes ω_i ↦ images[i] (1-forms in a new coframe) into w.
inline Form substitute(const Form& w, const std::vector<Form>& images) {
  const std::size_t n = images.front().dim();
  Form out(n, w.degree());
  for (const auto& [idx, c] : w.terms()) {
    Form t = Form::constant(n, c);
    for (std::size_t i : idx) t = mcp::wedge(t, images[i]);
    out += t;
  }
  return out;
}

/// Instance rewritten in the coframe θ = A ω. Frame components transform as
/// v' = A v, so G' = A⁻ᵀ G A⁻¹ and φ' = A φ A⁻¹.
inline mcp::InstanceSpec change_basis(const mcp::InstanceSpec& s, const QMatrix& a) {
  const std::size_t n = s.dim();
  QMatrix ainv = mcp::inverse(a);
  std::vector<Form> images;  // ω_i in terms of θ
  for (std::size_t i = 0; i < n; ++i) {
    Form f(n, 1);
    for (std::size_t j = 0; j < n; ++j) f.accumulate({j}, ainv(i, j));
    images.push_back(f);
  }
  mcp::InstanceSpec out = s;
  out.name = s.name + "-rebased";
  for (std::size_t k = 0; k < n; ++k) {
    Form dk(n, 2);
    for (std::size_t l = 0; l < n; ++l)
      if (a(k, l) != 0) dk += a(k, l) * substitute(s.differentials[l], images);
    out.differentials[k] = dk;
  }
  if (s.pair) out.pair = std::pair{substitute(s.pair->first, images), substitute(s.pair->second, images)};
  if (s.metric) out.metric = ainv.transpose() * *s.metric * ainv;
  if (s.phi) out.phi = a * *s.phi * ainv;
  return out;
}

/// Random unimodular-ish rational change of basis: unit lower times unit upper
/// triangular, with a random permutation, so it is always invertible.
inline QMatrix random_basis_change(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(-2, 2), den(1, 2);
  QMatrix lo = QMatrix::identity(n), up = QMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      lo(i, j) = mcp::make_rational(c(rng), den(rng));
      up(j, i) = mcp::make_rational(c(rng), den(rng));
    }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  QMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) p(i, perm[i]) = 1;
  return p * lo * up;
}

/// Shears the metric by a symplectic map S = [[I, B], [0, I]] written in
/// Darboux coordinates (q_1..q_m, p_1..p_m) of dα1 + dα2 on TG1 ⊕ TG2, with B symmetric.
/// S fixes the Reeb fields, preserves Ω and maps associated data to associated data:
/// G' = S⁻ᵀ G S⁻¹, φ' = S φ S⁻¹. Off-diagonal B mixes the two factors.
inline mcp::InstanceSpec symplectic_shear(const mcp::InstanceSpec& s, const std::vector<std::size_t>& q,
                                          const std::vector<std::size_t>& p, const QMatrix& b) {
  const std::size_t n = s.dim();
  QMatrix sh = QMatrix::identity(n);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) sh(q[i], p[j]) += b(i, j);
  QMatrix inv = mcp::inverse(sh);
  mcp::InstanceSpec out = s;
  out.name = s.name + "-sheared";
  out.metric = inv.transpose() * *s.metric * inv;
  out.phi = sh * *s.phi * inv;
  return out;
}

}  // namespace oracle
