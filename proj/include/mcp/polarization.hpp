#pragma once

#include "mcp/foliation.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mcp {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SqrtOptions {
  double threshold = 1e-13;
  int max_iterations = 200;
};

struct MatrixSqrt {
  FMatrix root;
  int iterations = 0;
};

/// Principal square root of a symmetric positive-definite matrix by the
/// Denman-Beavers iteration Y ← (Y + Z⁻¹)/2, Z ← (Z + Y⁻¹)/2.
inline MatrixSqrt spd_sqrt(const FMatrix& m, SqrtOptions opt = {}) {
  const std::size_t n = m.rows();
  FMatrix y = m, z = FMatrix::identity(n);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    FMatrix yinv = inverse(y, 0.0), zinv = inverse(z, 0.0);
    FMatrix ny = 0.5 * (y + zinv);
    FMatrix nz = 0.5 * (z + yinv);
    double change = (ny - y).max_abs() / std::max(1.0, ny.max_abs());
    y = std::move(ny);
    z = std::move(nz);
    if (change < opt.threshold) return {y, it};
  }
  throw ConvergenceError("Denman-Beavers iteration did not converge in " + std::to_string(opt.max_iterations) +
                         " iterations");
}

struct Polar {
  FMatrix unitary;   // J
  FMatrix positive;  // S = sqrt(AᵀA)
  int iterations = 0;
};

/// A = J S with J orthogonal and S symmetric positive definite.
inline Polar polar_decomposition(const FMatrix& a, SqrtOptions opt = {}) {
  auto s = spd_sqrt(a.transpose() * a, opt);
  return {a * inverse(s.root, 0.0), s.root, s.iterations};
}

struct ResidualReport {
  McpCertificate<double> certificate;
  double symmetry = 0;      // max |G - Gᵀ|
  bool positive_definite = false;

  bool ok() const { return certificate.all_true() && positive_definite; }
  double max_residual() const {
    const auto& c = certificate;
    return std::max({symmetry, c.reeb_metric.residual, c.phi_pairing.residual, c.structure.residual,
                     c.compatible.residual, c.decomposable.residual, c.orthogonal.residual});
  }
};

inline ResidualReport residual_report(const ContactPair& p, const FMatrix& g, const FMatrix& phi, const Rational& kappa,
                                      double tol) {
  ResidualReport r;
  auto d = PairData<double>::from(p);
  r.certificate = certify_metric(d, g, phi, to_double(kappa), tol);
  r.symmetry = (g - g.transpose()).max_abs();
  r.positive_definite = is_positive_definite(g, tol);
  return r;
}

struct AssociatedConstruction {
  FMatrix metric;
  FMatrix phi;
  int iterations = 0;  // largest Denman-Beavers count over the two blocks
  ResidualReport residuals;
};

/// Builds an associated metric with decomposable φ from a positive-definite seed.
/// On TG_i the seed is replaced by κ|Ω'| and φ by J, where Ω' = J|Ω'| is the polar
/// decomposition of the symplectic form dα_j (j ≠ i) written in a seed-orthonormal basis.
/// The Reeb directions get g(Z_i, ·) = α_i and φ(Z_i) = 0.
inline AssociatedConstruction build_associated_metric(const ContactPair& p, const FMatrix& seed, const Rational& kappa,
                                                      double tol = default_tolerance, SqrtOptions opt = {}) {
  const std::size_t n = p.dim();
  if (seed.rows() != n || !seed.square()) throw DimensionError("seed metric does not match the algebra dimension");
  if (!is_positive_definite(seed, tol)) throw MetricError("seed metric is not positive definite");
  const double kap = to_double(kappa);
  const FMatrix omega = skew_matrix(p.dalpha1() + p.dalpha2()).cast<double>();

  // adapted basis: Z1, Z2, TG1, TG2
  std::vector<FVector> adapted = {p.z1().cast<double>(), p.z2().cast<double>()};
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // [begin, end) in adapted basis
  for (const auto* tg : {&p.tg1(), &p.tg2()}) {
    std::size_t begin = adapted.size();
    for (const auto& v : tg->basis()) adapted.push_back(v.cast<double>());
    blocks.emplace_back(begin, adapted.size());
  }
  FMatrix gad(n, n), phiad(n, n);
  gad(0, 0) = 1;
  gad(1, 1) = 1;
  AssociatedConstruction out;
  for (auto [begin, end] : blocks) {
    const std::size_t m = end - begin;
    if (m == 0) continue;
    std::vector<FVector> cols(adapted.begin() + begin, adapted.begin() + end);
    FMatrix b = FMatrix::from_columns(n, cols);
    FMatrix s0 = b.transpose() * seed * b;
    FMatrix om = b.transpose() * omega * b;
    FMatrix l = cholesky(s0);
    FMatrix linv = inverse(l, 0.0);
    FMatrix om_y = linv * om * linv.transpose();  // Ω in coordinates y = Lᵀ x
    if (std::fabs(det(om_y)) <= tol) throw MetricError("symplectic form degenerates on a TG block");
    Polar pd = polar_decomposition(om_y, opt);
    out.iterations = std::max(out.iterations, pd.iterations);
    FMatrix g_y = kap * pd.positive;
    FMatrix g_x = l * g_y * l.transpose();
    FMatrix phi_x = linv.transpose() * pd.unitary * l.transpose();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        gad(begin + i, begin + j) = g_x(i, j);
        phiad(begin + i, begin + j) = phi_x(i, j);
      }
  }
  FMatrix a = FMatrix::from_columns(n, adapted);
  FMatrix ainv = inverse(a, 0.0);
  out.metric = ainv.transpose() * gad * ainv;
  // symmetrize away roundoff
  out.metric = 0.5 * (out.metric + out.metric.transpose());
  out.phi = a * phiad * ainv;
  out.residuals = residual_report(p, out.metric, out.phi, kappa, tol);
  return out;
}

class PhiBasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PhiBasis {
  std::vector<FVector> vectors;
  bool grouped = false;           // ordered {Z1, X.., Z2, Y..} by leaf
  std::size_t first_block = 0;    // size of the Z1 group when grouped
  double orthonormality = 0;      // max |g(e_a, e_b) - δ_ab|
};

/// Orthonormal basis {Z1, X1, φX1, ..., Z2, Y1, φY1, ...} built by iterated
/// orthogonal complements. Decomposable φ groups the X's in TG2 and the Y's in TG1.
inline PhiBasis phi_basis(const ContactPair& p, const FMatrix& g, const FMatrix& phi, bool decomposable,
                          double tol = default_tolerance) {
  const std::size_t n = p.dim();
  PhiBasis out;
  out.grouped = decomposable;
  auto ip = [&](const FVector& u, const FVector& v) { return bilinear(g, u, v); };

  auto extend = [&](std::vector<FVector>& acc, const std::vector<FVector>& candidates, std::size_t target) {
    for (const auto& c : candidates) {
      if (acc.size() >= target) break;
      FVector x = c;
      for (const auto& e : acc) x -= ip(x, e) * e;
      double nrm2 = ip(x, x);
      if (nrm2 <= tol) continue;  // already spanned
      x *= 1.0 / std::sqrt(nrm2);
      FVector y = phi * x;
      for (const auto& e : acc)
        if (std::fabs(ip(y, e)) > tol) throw PhiBasisError("phi X is not orthogonal to the basis built so far");
      if (std::fabs(ip(y, x)) > tol || std::fabs(ip(y, y) - 1.0) > tol)
        throw PhiBasisError("phi X is not a unit vector orthogonal to X");
      acc.push_back(x);
      acc.push_back(y);
    }
    if (acc.size() != target) throw PhiBasisError("could not complete the phi-basis");
  };
  auto cast_all = [](const std::vector<Vector>& vs) {
    std::vector<FVector> out;
    for (const auto& v : vs) out.push_back(v.cast<double>());
    return out;
  };
  const FVector z1 = p.z1().cast<double>(), z2 = p.z2().cast<double>();
  if (decomposable) {
    std::vector<FVector> acc = {z1};
    extend(acc, cast_all(p.tg2().basis()), 2 * p.type().h + 1);
    out.first_block = acc.size();
    acc.push_back(z2);
    extend(acc, cast_all(p.tg1().basis()), n);
    out.vectors = acc;
  } else {
    std::vector<FVector> acc = {z1, z2};
    std::vector<FVector> units;
    for (std::size_t i = 0; i < n; ++i) units.push_back(FVector::unit(n, i));
    extend(acc, units, n);
    out.vectors = acc;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      out.orthonormality =
          std::max(out.orthonormality, std::fabs(ip(out.vectors[a], out.vectors[b]) - (a == b ? 1.0 : 0.0)));
  return out;
}

struct FloatVolumeIdentity {
  double volume_coefficient = 0;  // sqrt(det G)
  double rhs_coefficient = 0;     // |(-κ)^{h+k}/(h!k!) · top|
  bool holds = false;
};

inline FloatVolumeIdentity volume_identity(const LieAlgebra& L, const ContactPair& p, const FMatrix& g,
                                           const Rational& kappa, double tol = default_tolerance) {
  const unsigned h = p.type().h, k = p.type().k;
  FloatVolumeIdentity v;
  v.volume_coefficient = std::sqrt(det(g));
  Rational rhs = pow(-kappa, h + k) / (factorial(h) * factorial(k)) *
                 top_coefficient(top_wedge(L, p.alpha1(), p.alpha2(), p.type()));
  v.rhs_coefficient = std::fabs(to_double(rhs));
  v.holds = std::fabs(v.volume_coefficient - v.rhs_coefficient) <= tol;
  return v;
}

/// Deterministic rational positive-definite matrix MᵀM + I with small random M.
inline QMatrix random_rational_spd(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = make_rational(num(rng), den(rng));
  return m.transpose() * m + QMatrix::identity(n);
}

}  // namespace mcp
