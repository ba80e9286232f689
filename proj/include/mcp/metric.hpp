#pragma once

#include "mcp/contact_pair.hpp"

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

namespace mcp {

/// Pairing constant relating 2-form evaluation to the metric: g(X, φY) = κ (dα1 + dα2)(X, Y).
inline Rational default_kappa() { return make_rational(1, 2); }

inline constexpr double default_tolerance = 1e-9;

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Symmetric positive-definite rational Gram matrix on the frame.
class MetricTensor {
 public:
  explicit MetricTensor(QMatrix g) : g_(std::move(g)) {
    if (!g_.square()) throw MetricError("metric matrix is not square");
    if (!g_.is_symmetric()) throw MetricError("metric matrix is not symmetric");
    if (!is_positive_definite(g_)) throw MetricError("metric matrix is not positive definite");
  }
  const QMatrix& matrix() const { return g_; }
  std::size_t dim() const { return g_.rows(); }

 private:
  QMatrix g_;
};

struct CheckResult {
  bool ok = true;
  std::string witness;
  double residual = 0.0;  // max-abs residual of the defining identity
};

/// Contact pair data in scalar type T. Distribution bases keep their exact
/// echelon pivots so span residuals can be computed the same way in both modes.
template <class T>
struct PairData {
  std::size_t n = 0;
  Vec<T> a1, a2, z1, z2;
  Matrix<T> omega;  // skew matrix of dα1 + dα2
  std::vector<Vec<T>> tf1, tf2, tg1, tg2;
  std::vector<std::size_t> tf1_piv, tf2_piv, tg1_piv, tg2_piv;

  static PairData from(const ContactPair& p) {
    auto cast_all = [](const std::vector<Vector>& vs) {
      std::vector<Vec<T>> out;
      for (const auto& v : vs) out.push_back(v.template cast<T>());
      return out;
    };
    PairData d;
    d.n = p.dim();
    d.a1 = coefficients(p.alpha1()).template cast<T>();
    d.a2 = coefficients(p.alpha2()).template cast<T>();
    d.z1 = p.z1().template cast<T>();
    d.z2 = p.z2().template cast<T>();
    d.omega = skew_matrix(p.dalpha1() + p.dalpha2()).template cast<T>();
    d.tf1 = cast_all(p.tf1().basis());
    d.tf2 = cast_all(p.tf2().basis());
    d.tg1 = cast_all(p.tg1().basis());
    d.tg2 = cast_all(p.tg2().basis());
    d.tf1_piv = p.tf1().pivots();
    d.tf2_piv = p.tf2().pivots();
    d.tg1_piv = p.tg1().pivots();
    d.tg2_piv = p.tg2().pivots();
    return d;
  }
};

/// v minus its echelon-basis reconstruction; zero iff v lies in the span.
template <class T>
Vec<T> span_residual(const std::vector<Vec<T>>& basis, const std::vector<std::size_t>& pivots, const Vec<T>& v) {
  Vec<T> r = v;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    T c = r[pivots[i]];
    r -= c * basis[i];
  }
  return r;
}

namespace detail {

template <class T>
std::string fmt_scalar(const T& x) {
  if constexpr (scalar_traits<T>::exact) {
    return to_string(x);
  } else {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }
}

template <class T>
CheckResult matrix_zero(const Matrix<T>& r, double tol, const std::string& what) {
  CheckResult out;
  out.residual = r.max_abs();
  out.ok = r.is_zero(tol);
  if (!out.ok) {
    for (std::size_t j = 0; j < r.cols() && out.witness.empty(); ++j)
      for (std::size_t i = 0; i < r.rows(); ++i)
        if (!scalar_traits<T>::is_zero(r(i, j), tol)) {
          out.witness = what + " fails at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "): residual " +
                        fmt_scalar(r(i, j));
          break;
        }
  }
  return out;
}

inline CheckResult all_of(std::initializer_list<CheckResult> parts) {
  CheckResult out;
  for (const auto& c : parts) {
    out.residual = std::max(out.residual, c.residual);
    if (!c.ok && out.ok) {
      out.ok = false;
      out.witness = c.witness;
    }
  }
  return out;
}

}  // namespace detail

/// Unique P with G P = κ Ω.
template <class T>
Matrix<T> phi_from_metric(const Matrix<T>& g, const Matrix<T>& omega, const T& kappa) {
  return inverse(g) * (kappa * omega);
}

inline QMatrix phi_from_metric(const ContactPair& p, const MetricTensor& g, const Rational& kappa) {
  return phi_from_metric(g.matrix(), skew_matrix(p.dalpha1() + p.dalpha2()), kappa);
}

/// φ² = -Id + Z1 α1ᵀ + Z2 α2ᵀ, φ Z_i = 0, α_i ∘ φ = 0 and rank φ = n - 2.
template <class T>
CheckResult check_structure_tensor(const PairData<T>& d, const Matrix<T>& phi, double tol = 0.0) {
  const std::size_t n = d.n;
  Matrix<T> target = -Matrix<T>::identity(n) + Matrix<T>::outer(d.z1, d.a1) + Matrix<T>::outer(d.z2, d.a2);
  CheckResult sq = detail::matrix_zero<T>(phi * phi - target, tol, "phi^2 = -Id + alpha1(x)Z1 + alpha2(x)Z2");
  CheckResult kills = detail::matrix_zero<T>(Matrix<T>::from_columns(n, {phi * d.z1, phi * d.z2}), tol, "phi(Z_i) = 0");
  Matrix<T> ap = Matrix<T>::from_rows(n, {d.a1, d.a2}) * phi;
  CheckResult annih = detail::matrix_zero<T>(ap, tol, "alpha_i o phi = 0");
  CheckResult rk;
  std::size_t r = rank(phi, scalar_traits<T>::exact ? 0.0 : std::max(tol, default_pivot_tol));
  rk.ok = r + 2 == n;
  if (!rk.ok) rk.witness = "rank phi = " + std::to_string(r) + ", expected " + std::to_string(n - 2);
  return detail::all_of({sq, kills, annih, rk});
}

/// g(φX, φY) = g(X, Y) - α1(X)α1(Y) - α2(X)α2(Y).
template <class T>
CheckResult check_compatible(const Matrix<T>& g, const Matrix<T>& phi, const PairData<T>& d, double tol = 0.0) {
  Matrix<T> lhs = phi.transpose() * g * phi;
  Matrix<T> rhs = g - Matrix<T>::outer(d.a1, d.a1) - Matrix<T>::outer(d.a2, d.a2);
  return detail::matrix_zero<T>(lhs - rhs, tol, "g(phi X, phi Y) = g(X,Y) - sum alpha_i(X) alpha_i(Y)");
}

/// g(X, Z_i) = α_i(X), i.e. G Z_i = a_i.
template <class T>
CheckResult check_reeb_metric(const Matrix<T>& g, const PairData<T>& d, double tol = 0.0) {
  Matrix<T> r = Matrix<T>::from_columns(d.n, {g * d.z1 - d.a1, g * d.z2 - d.a2});
  return detail::matrix_zero<T>(r, tol, "g(X, Z_i) = alpha_i(X)");
}

/// g(X, φY) = κ (dα1 + dα2)(X, Y).
template <class T>
CheckResult check_phi_pairing(const Matrix<T>& g, const Matrix<T>& phi, const PairData<T>& d, const T& kappa,
                              double tol = 0.0) {
  return detail::matrix_zero<T>(g * phi - kappa * d.omega, tol, "g(X, phi Y) = kappa (dalpha1 + dalpha2)(X,Y)");
}

/// φ(TF_i) ⊂ TF_i, together with the equivalent φ(TG_i) = TG_i.
template <class T>
CheckResult check_decomposable(const PairData<T>& d, const Matrix<T>& phi, double tol = 0.0) {
  CheckResult out;
  auto preserve = [&](const std::vector<Vec<T>>& basis, const std::vector<std::size_t>& piv, const char* name) {
    for (const auto& u : basis) {
      Vec<T> r = span_residual(basis, piv, phi * u);
      out.residual = std::max(out.residual, r.max_abs());
      if (!r.is_zero(tol) && out.ok) {
        out.ok = false;
        out.witness = std::string("phi") + to_string(u) + " leaves " + name + ": residual " + to_string(r);
      }
    }
  };
  preserve(d.tf1, d.tf1_piv, "TF1");
  preserve(d.tf2, d.tf2_piv, "TF2");
  preserve(d.tg1, d.tg1_piv, "TG1");
  preserve(d.tg2, d.tg2_piv, "TG2");
  // φ is injective on TG_i, so containment is equality
  for (const auto* tg : {&d.tg1, &d.tg2}) {
    if (tg->empty()) continue;
    std::vector<Vec<T>> imgs;
    for (const auto& u : *tg) imgs.push_back(phi * u);
    std::size_t r = rank(Matrix<T>::from_columns(d.n, imgs), scalar_traits<T>::exact ? 0.0 : std::max(tol, default_pivot_tol));
    if (r != tg->size() && out.ok) {
      out.ok = false;
      out.witness = "phi(TG) has rank " + std::to_string(r) + " < " + std::to_string(tg->size());
    }
  }
  return out;
}

/// uᵀ G v = 0 for all canonical basis pairs u ∈ TF1, v ∈ TF2.
template <class T>
CheckResult check_orthogonal(const Matrix<T>& g, const std::vector<Vec<T>>& tf1, const std::vector<Vec<T>>& tf2,
                             double tol = 0.0) {
  CheckResult out;
  for (const auto& u : tf1)
    for (const auto& v : tf2) {
      T ip = bilinear(g, u, v);
      out.residual = std::max(out.residual, scalar_traits<T>::magnitude(ip));
      if (!scalar_traits<T>::is_zero(ip, tol) && out.ok) {
        out.ok = false;
        out.witness = "g(" + to_string(u) + ", " + to_string(v) + ") = " + detail::fmt_scalar(ip);
      }
    }
  return out;
}

inline CheckResult check_orthogonal(const MetricTensor& g, const Distribution& tf1, const Distribution& tf2) {
  return check_orthogonal(g.matrix(), tf1.basis(), tf2.basis());
}

template <class T>
struct McpCertificate {
  T kappa{};
  Matrix<T> phi;
  CheckResult reeb_metric;   // g(X, Z_i) = α_i(X)
  CheckResult phi_pairing;   // g(X, φY) = κ Φ(X, Y)
  CheckResult structure;     // φ is a contact pair structure tensor
  CheckResult compatible;
  CheckResult associated;    // reeb_metric ∧ phi_pairing ∧ structure
  CheckResult decomposable;
  CheckResult orthogonal;    // TF1 ⊥ TF2

  bool associated_implies_compatible() const { return !associated.ok || compatible.ok; }
  /// decomposable ⟺ orthogonal foliations, for associated metrics.
  bool theorem_equivalence_holds() const { return !associated.ok || decomposable.ok == orthogonal.ok; }
  bool all_true() const {
    return associated.ok && compatible.ok && decomposable.ok && orthogonal.ok && structure.ok;
  }
};

/// Fills every flag for a (g, φ) pair. In exact mode pass tol = 0.
template <class T>
McpCertificate<T> certify_metric(const PairData<T>& d, const Matrix<T>& g, const Matrix<T>& phi, const T& kappa,
                                 double tol = 0.0) {
  McpCertificate<T> c;
  c.kappa = kappa;
  c.phi = phi;
  c.reeb_metric = check_reeb_metric(g, d, tol);
  c.phi_pairing = check_phi_pairing(g, phi, d, kappa, tol);
  c.structure = check_structure_tensor(d, phi, tol);
  c.compatible = check_compatible(g, phi, d, tol);
  c.associated = detail::all_of({c.reeb_metric, c.phi_pairing, c.structure});
  c.decomposable = check_decomposable(d, phi, tol);
  c.orthogonal = check_orthogonal(g, d.tf1, d.tf2, tol);
  return c;
}

/// Computes φ from g and certifies the result exactly.
inline McpCertificate<Rational> check_associated(const ContactPair& p, const MetricTensor& g, const Rational& kappa) {
  auto d = PairData<Rational>::from(p);
  return certify_metric(d, g.matrix(), phi_from_metric(g.matrix(), d.omega, kappa), kappa);
}

}  // namespace mcp
