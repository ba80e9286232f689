#pragma once

#include "mcp/metric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mcp {

class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Levi-Civita connection of a left-invariant metric: ∇_{X_i} X_j = Σ_k Γ^k_{ij} X_k.
template <class T>
class Connection {
 public:
  Connection() = default;
  Connection(std::size_t n, std::vector<T> gamma) : n_(n), gamma_(std::move(gamma)) {}

  std::size_t dim() const { return n_; }
  const T& coefficient(std::size_t k, std::size_t i, std::size_t j) const { return gamma_[(k * n_ + i) * n_ + j]; }

  Vec<T> nabla(std::size_t i, std::size_t j) const {
    Vec<T> v(n_);
    for (std::size_t k = 0; k < n_; ++k) v[k] = coefficient(k, i, j);
    return v;
  }

  /// ∇_u v for constant-coefficient (left-invariant) fields.
  Vec<T> nabla(const Vec<T>& u, const Vec<T>& v) const {
    Vec<T> out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (scalar_traits<T>::exact && scalar_traits<T>::is_zero(u[i], 0.0)) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (scalar_traits<T>::exact && scalar_traits<T>::is_zero(v[j], 0.0)) continue;
        T s = u[i] * v[j];
        for (std::size_t k = 0; k < n_; ++k) out[k] += s * coefficient(k, i, j);
      }
    }
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::vector<T> gamma_;
};

/// Torsion: Γ^k_ij - Γ^k_ji - c^k_ij. Metric compatibility: g(∇_i X_j, X_k) + g(X_j, ∇_i X_k).
template <class T>
std::pair<CheckResult, CheckResult> connection_identities(const LieAlgebra& L, const Matrix<T>& g,
                                                          const Connection<T>& conn, double tol = 0.0) {
  const std::size_t n = L.dim();
  CheckResult torsion, compat;
  auto note = [&](CheckResult& c, const T& value, const std::string& where) {
    c.residual = std::max(c.residual, scalar_traits<T>::magnitude(value));
    if (!scalar_traits<T>::is_zero(value, tol) && c.ok) {
      c.ok = false;
      c.witness = where + ": " + detail::fmt_scalar(value);
    }
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        T t = conn.coefficient(k, i, j) - conn.coefficient(k, j, i) -
              scalar_traits<T>::from(L.structure_constant(k, i, j));
        note(torsion, t, "torsion at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        T m = bilinear(g, conn.nabla(i, j), Vec<T>::unit(n, k)) + bilinear(g, Vec<T>::unit(n, j), conn.nabla(i, k));
        note(compat, m, "metric compatibility at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                            std::to_string(k + 1) + ")");
      }
  return {torsion, compat};
}

/// Koszul formula for left-invariant fields:
/// 2 g(∇_X Y, Z) = g([X,Y], Z) - g([Y,Z], X) + g([Z,X], Y).
template <class T>
Connection<T> levi_civita(const LieAlgebra& L, const Matrix<T>& g, double tol = 0.0) {
  const std::size_t n = L.dim();
  if (g.rows() != n || !g.square()) throw DimensionError("levi_civita: metric does not match algebra");
  // gb[(i*n + j)*n + l] = g([X_i, X_j], X_l)
  std::vector<T> gb(n * n * n, T(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Vec<T> br = L.bracket(i, j).template cast<T>();
      Vec<T> gbr = g * br;
      for (std::size_t l = 0; l < n; ++l) gb[(i * n + j) * n + l] = gbr[l];
    }
  auto at = [&](std::size_t i, std::size_t j, std::size_t l) -> const T& { return gb[(i * n + j) * n + l]; };
  Matrix<T> ginv = inverse(g);
  std::vector<T> gamma(n * n * n, T(0));
  const T half = scalar_traits<T>::from(make_rational(1, 2));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Vec<T> rhs(n);
      for (std::size_t l = 0; l < n; ++l) rhs[l] = half * (at(i, j, l) - at(j, l, i) + at(l, i, j));
      Vec<T> col = ginv * rhs;
      for (std::size_t k = 0; k < n; ++k) gamma[(k * n + i) * n + j] = col[k];
    }
  Connection<T> conn(n, std::move(gamma));
  if constexpr (scalar_traits<T>::exact) {
    auto [torsion, compat] = connection_identities(L, g, conn, tol);
    if (!torsion.ok || !compat.ok)
      throw std::logic_error("Levi-Civita construction violated " + (torsion.ok ? compat.witness : torsion.witness));
  }
  return conn;
}

/// g-orthogonal projector onto the span of `basis`: B (Bᵀ G B)⁻¹ Bᵀ G.
template <class T>
Matrix<T> tangent_projector(const Matrix<T>& g, const std::vector<Vec<T>>& basis) {
  const std::size_t n = g.rows();
  if (basis.empty()) return Matrix<T>(n, n);
  Matrix<T> b = Matrix<T>::from_columns(n, basis);
  Matrix<T> gram = b.transpose() * g * b;
  return b * inverse(gram) * b.transpose() * g;
}

/// Exact Gram-Schmidt without normalization.
template <class T>
std::vector<Vec<T>> orthogonalize(const Matrix<T>& g, const std::vector<Vec<T>>& basis) {
  std::vector<Vec<T>> out;
  std::vector<T> norms;
  for (const auto& b : basis) {
    Vec<T> e = b;
    for (std::size_t j = 0; j < out.size(); ++j) e -= (bilinear(g, b, out[j]) / norms[j]) * out[j];
    norms.push_back(bilinear(g, e, e));
    out.push_back(std::move(e));
  }
  return out;
}

template <class T>
struct SecondFundamentalEntry {
  std::size_t i = 0, j = 0;  // indices into the distribution basis
  Vec<T> normal;             // normal part of ∇_{b_i} b_j
};

/// II(b_i, b_j) for every ordered pair of basis vectors.
template <class T>
std::vector<SecondFundamentalEntry<T>> second_fundamental_form(const Connection<T>& conn, const Matrix<T>& g,
                                                               const std::vector<Vec<T>>& basis) {
  const std::size_t n = g.rows();
  Matrix<T> normal = Matrix<T>::identity(n) - tangent_projector(g, basis);
  std::vector<SecondFundamentalEntry<T>> out;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) out.push_back({i, j, normal * conn.nabla(basis[i], basis[j])});
  return out;
}

/// H = Σ II(e_i, e_i) / g(e_i, e_i) over a g-orthogonal basis of D.
template <class T>
Vec<T> mean_curvature(const Connection<T>& conn, const Matrix<T>& g, const std::vector<Vec<T>>& basis) {
  const std::size_t n = g.rows();
  Vec<T> h(n);
  if (basis.empty()) return h;
  Matrix<T> normal = Matrix<T>::identity(n) - tangent_projector(g, basis);
  for (const auto& e : orthogonalize(g, basis)) h += (T(1) / bilinear(g, e, e)) * (normal * conn.nabla(e, e));
  return h;
}

/// Leafwise volume form χ = sqrt(scale_squared) · unit, vanishing on D^⊥.
/// `unit` is the wedge of the g-dual coframe of an orthogonal basis of D,
/// signed so that χ is positive on the canonical basis of D.
struct CharacteristicForm {
  Form unit;
  Rational scale_squared;

  /// χ itself when sqrt(scale_squared) is rational.
  std::optional<Form> exact() const {
    Rational s;
    if (!exact_sqrt(scale_squared, s)) return std::nullopt;
    return s * unit;
  }
};

inline CharacteristicForm characteristic_form(const QMatrix& g, const Distribution& d) {
  const std::size_t n = g.rows();
  CharacteristicForm out{Form::constant(n, 1), Rational(1)};
  for (const auto& e : orthogonalize(g, d.basis())) {
    Rational norm2 = bilinear(g, e, e);
    out.unit = wedge(out.unit, one_form((Rational(1) / norm2) * (g * e)));
    out.scale_squared *= norm2;
  }
  if (d.dim() > 0 && evaluate(out.unit, std::span<const Vector>(d.basis())) < 0) out.unit *= Rational(-1);
  return out;
}

struct RummlerCheck {
  bool minimal = true;
  std::optional<Vector> witness;  // complement vector Y with dω(b_1..b_p, Y) ≠ 0
  Rational value = 0;
};

/// Minimal iff dω(u_1, ..., u_p, Y) = 0 for the D-basis u and every complement vector Y.
inline RummlerCheck rummler_minimal(const LieAlgebra& L, const Distribution& d, const Form& omega) {
  RummlerCheck out;
  if (omega.degree() != d.dim()) throw DegreeError("rummler_minimal: form degree must equal the leaf dimension");
  if (d.dim() == L.dim()) return out;
  Form domega = L.differential(omega);
  std::vector<Vector> args = d.basis();
  args.emplace_back(L.dim());
  for (const auto& y : d.complement_units()) {
    args.back() = y;
    Rational v = evaluate(domega, std::span<const Vector>(args));
    if (v != 0) {
      out.minimal = false;
      out.witness = y;
      out.value = v;
      return out;
    }
  }
  return out;
}

struct FoliationReport {
  std::string name;
  Distribution distribution;
  Vector mean_curvature;
  bool minimal = false;
  bool totally_geodesic = false;
  std::vector<SecondFundamentalEntry<Rational>> nonzero_second_fundamental;
  CharacteristicForm characteristic;
  RummlerCheck rummler;
};

inline FoliationReport analyze_foliation(const LieAlgebra& L, const QMatrix& g, const Connection<Rational>& conn,
                                         const Distribution& d, std::string name) {
  FoliationReport r;
  r.name = std::move(name);
  r.distribution = d;
  r.mean_curvature = mean_curvature(conn, g, d.basis());
  r.minimal = r.mean_curvature.is_zero();
  for (auto& e : second_fundamental_form(conn, g, d.basis()))
    if (!e.normal.is_zero()) r.nonzero_second_fundamental.push_back(std::move(e));
  r.totally_geodesic = r.nonzero_second_fundamental.empty();
  r.characteristic = characteristic_form(g, d);
  r.rummler = rummler_minimal(L, d, r.characteristic.unit);
  return r;
}

struct VolumeIdentity {
  Rational det_g;            // (Riemannian volume coefficient)²
  Rational top_coefficient;  // of α1∧(dα1)^h∧α2∧(dα2)^k on ω_1∧...∧ω_n
  Rational constant;         // (-κ)^{h+k} / (h! k!)
  Rational rhs_coefficient;  // constant · top_coefficient
  std::optional<Rational> volume_coefficient;  // sqrt(det G) when rational
  bool holds = false;        // rhs² = det G, i.e. equality up to orientation
};

/// Compares the Riemannian volume of g with the normalized top wedge of the pair.
/// Requires an associated metric with decomposable φ.
inline VolumeIdentity volume_identity(const LieAlgebra& L, const ContactPair& p, const MetricTensor& g,
                                      const Rational& kappa) {
  auto cert = check_associated(p, g, kappa);
  if (!cert.associated.ok) throw HypothesisError("volume identity needs an associated metric: " + cert.associated.witness);
  if (!cert.decomposable.ok) throw HypothesisError("volume identity needs a decomposable phi: " + cert.decomposable.witness);
  const unsigned h = p.type().h, k = p.type().k;
  VolumeIdentity v;
  v.det_g = det(g.matrix());
  v.top_coefficient = top_coefficient(top_wedge(L, p.alpha1(), p.alpha2(), p.type()));
  v.constant = pow(-kappa, h + k) / (factorial(h) * factorial(k));
  v.rhs_coefficient = v.constant * v.top_coefficient;
  Rational s;
  if (exact_sqrt(v.det_g, s)) v.volume_coefficient = s;
  v.holds = v.rhs_coefficient * v.rhs_coefficient == v.det_g;
  return v;
}

}  // namespace mcp
