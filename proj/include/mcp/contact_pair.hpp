#pragma once

#include "mcp/lie.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mcp {

class ContactPairError : public std::invalid_argument {
 public:
  ContactPairError(const std::string& what, std::vector<std::string> diagnostics = {})
      : std::invalid_argument(what), diagnostics(std::move(diagnostics)) {}
  std::vector<std::string> diagnostics;
};

struct PairType {
  unsigned h = 0;
  unsigned k = 0;
  friend bool operator==(const PairType&, const PairType&) = default;
};

struct TypeDetection {
  std::optional<PairType> type;
  std::vector<std::string> diagnostics;
  bool ok() const { return type.has_value(); }
};

/// α1∧(dα1)^h∧α2∧(dα2)^k.
inline Form top_wedge(const LieAlgebra& L, const Form& a1, const Form& a2, PairType t) {
  Form left = wedge(a1, wedge_power(L.differential(a1), t.h));
  Form right = wedge(a2, wedge_power(L.differential(a2), t.k));
  return wedge(left, right);
}

/// Tries every (h, k) with 2h + 2k + 2 = n and reports which of the three
/// defining conditions fail for each candidate.
inline TypeDetection detect_type(const LieAlgebra& L, const Form& a1, const Form& a2) {
  TypeDetection out;
  const std::size_t n = L.dim();
  if (a1.degree() != 1 || a2.degree() != 1 || a1.dim() != n || a2.dim() != n) {
    out.diagnostics.push_back("alpha1 and alpha2 must be 1-forms on the algebra");
    return out;
  }
  if (n % 2 != 0 || n < 2) {
    out.diagnostics.push_back("dimension " + std::to_string(n) + " is odd; a contact pair needs even dimension");
    return out;
  }
  const Form d1 = L.differential(a1), d2 = L.differential(a2);
  const unsigned m = static_cast<unsigned>(n / 2 - 1);
  for (unsigned h = 0; h <= m; ++h) {
    const unsigned k = m - h;
    std::vector<std::string> broken;
    if (top_wedge(L, a1, a2, {h, k}).is_zero()) broken.push_back("top wedge alpha1^(dalpha1)^h^alpha2^(dalpha2)^k vanishes");
    if (!wedge_power(d1, h + 1).is_zero()) broken.push_back("(dalpha1)^(h+1) != 0");
    if (!wedge_power(d2, k + 1).is_zero()) broken.push_back("(dalpha2)^(k+1) != 0");
    if (broken.empty()) {
      out.type = PairType{h, k};
      out.diagnostics.clear();
      return out;
    }
    std::string line = "(h,k)=(" + std::to_string(h) + "," + std::to_string(k) + "): ";
    for (std::size_t i = 0; i < broken.size(); ++i) line += (i ? "; " : "") + broken[i];
    out.diagnostics.push_back(line);
  }
  return out;
}

/// Unique Z1, Z2 with α_i(Z_j) = δ_ij and i_{Z_j} dα_i = 0.
inline std::pair<Vector, Vector> reeb_vector_fields(const LieAlgebra& L, const Form& a1, const Form& a2) {
  const std::size_t n = L.dim();
  const Vector c1 = coefficients(a1), c2 = coefficients(a2);
  const QMatrix w1 = skew_matrix(L.differential(a1)), w2 = skew_matrix(L.differential(a2));
  QMatrix sys(2 + 2 * n, n);
  for (std::size_t j = 0; j < n; ++j) {
    sys(0, j) = c1[j];
    sys(1, j) = c2[j];
    for (std::size_t i = 0; i < n; ++i) {
      sys(2 + i, j) = w1(j, i);
      sys(2 + n + i, j) = w2(j, i);
    }
  }
  auto solve_for = [&](const Rational& r1, const Rational& r2, const char* name) {
    Vector rhs(2 + 2 * n);
    rhs[0] = r1;
    rhs[1] = r2;
    auto sol = solve(sys, rhs);
    if (!sol.particular) throw ContactPairError(std::string("Reeb system for ") + name + " is inconsistent");
    if (!sol.kernel.empty())
      throw ContactPairError(std::string("Reeb system for ") + name + " has a " + std::to_string(sol.kernel.size()) +
                             "-dimensional solution space");
    return *sol.particular;
  };
  return {solve_for(1, 0, "Z1"), solve_for(0, 1, "Z2")};
}

class ContactPair {
 public:
  /// Detects the type, solves for the Reeb fields, builds the characteristic
  /// distributions and certifies the splittings. Throws ContactPairError.
  static ContactPair certify(const LieAlgebra& L, const Form& a1, const Form& a2) {
    TypeDetection det = detect_type(L, a1, a2);
    if (!det.ok()) throw ContactPairError("not a contact pair", det.diagnostics);
    ContactPair p;
    p.alpha1_ = a1;
    p.alpha2_ = a2;
    p.type_ = *det.type;
    p.d1_ = L.differential(a1);
    p.d2_ = L.differential(a2);
    std::tie(p.z1_, p.z2_) = reeb_vector_fields(L, a1, a2);
    const std::size_t n = L.dim();
    p.tf1_ = common_kernel(n, {a1, p.d1_});
    p.tf2_ = common_kernel(n, {a2, p.d2_});
    p.tg1_ = common_kernel(n, {a1, a2, p.d1_});
    p.tg2_ = common_kernel(n, {a1, a2, p.d2_});
    for (auto [d, name] : {std::pair{&p.tf1_, "TF1"}, std::pair{&p.tf2_, "TF2"}}) {
      auto sc = is_subalgebra(L, *d);
      if (!sc.closed)
        throw ContactPairError(std::string(name) + " is not bracket-closed: residual " + to_string(sc.residual));
    }
    const unsigned h = p.type_.h, k = p.type_.k;
    auto expect_dim = [](const Distribution& d, std::size_t want, const char* name) {
      if (d.dim() != want)
        throw ContactPairError(std::string(name) + " has dimension " + std::to_string(d.dim()) + ", expected " +
                               std::to_string(want));
    };
    expect_dim(p.tf1_, 2 * k + 1, "TF1");
    expect_dim(p.tf2_, 2 * h + 1, "TF2");
    expect_dim(p.tg1_, 2 * k, "TG1");
    expect_dim(p.tg2_, 2 * h, "TG2");
    if (sum(p.tf1_, p.tf2_).dim() != n) throw ContactPairError("TF1 + TF2 does not span the algebra");
    if (!(sum(p.tg1_, Distribution(n, {p.z2_})) == p.tf1_)) throw ContactPairError("TF1 != TG1 + span(Z2)");
    if (!(sum(p.tg2_, Distribution(n, {p.z1_})) == p.tf2_)) throw ContactPairError("TF2 != TG2 + span(Z1)");
    return p;
  }

  const Form& alpha1() const { return alpha1_; }
  const Form& alpha2() const { return alpha2_; }
  const Form& dalpha1() const { return d1_; }
  const Form& dalpha2() const { return d2_; }
  PairType type() const { return type_; }
  const Vector& z1() const { return z1_; }
  const Vector& z2() const { return z2_; }
  const Distribution& tf1() const { return tf1_; }
  const Distribution& tf2() const { return tf2_; }
  const Distribution& tg1() const { return tg1_; }
  const Distribution& tg2() const { return tg2_; }
  std::size_t dim() const { return z1_.size(); }

 private:
  Form alpha1_, alpha2_, d1_, d2_;
  PairType type_;
  Vector z1_, z2_;
  Distribution tf1_, tf2_, tg1_, tg2_;
};

struct NamedCheck {
  std::string name;
  bool ok = true;
  std::string witness;
};

/// Derived identities of a certified pair, each checked exactly.
inline std::vector<NamedCheck> pair_identities(const LieAlgebra& L, const ContactPair& p) {
  std::vector<NamedCheck> out;
  const std::size_t n = L.dim();
  const unsigned h = p.type().h, k = p.type().k;

  auto restricted_rank = [&](const Form& two_form, const Distribution& d) {
    QMatrix w = skew_matrix(two_form);
    QMatrix b = QMatrix::from_columns(n, d.basis());
    return rank(b.transpose() * w * b);
  };
  {
    std::size_t r = restricted_rank(p.dalpha1(), p.tg2());
    out.push_back({"dalpha1 symplectic on TG2", r == p.tg2().dim(), "rank " + std::to_string(r)});
    r = restricted_rank(p.dalpha2(), p.tg1());
    out.push_back({"dalpha2 symplectic on TG1", r == p.tg1().dim(), "rank " + std::to_string(r)});
  }
  {
    Form c1 = wedge(p.alpha1(), wedge_power(p.dalpha1(), h));
    Form c2 = wedge(p.alpha2(), wedge_power(p.dalpha2(), k));
    Form dc1 = c1.degree() < n ? L.differential(c1) : Form(n, n);
    Form dc2 = c2.degree() < n ? L.differential(c2) : Form(n, n);
    out.push_back({"d(alpha1^(dalpha1)^h) = 0", dc1.is_zero(), dc1.is_zero() ? "" : render(dc1, L.names())});
    out.push_back({"d(alpha2^(dalpha2)^k) = 0", dc2.is_zero(), dc2.is_zero() ? "" : render(dc2, L.names())});
  }
  auto vanishes_on = [&](const Form& a, const Form& da, const Distribution& d) -> std::string {
    for (const auto& u : d.basis()) {
      if (evaluate(a, {u}) != 0) return "alpha nonzero on " + to_string(u);
      if (!interior(u, da).is_zero()) return "i_u dalpha nonzero for u = " + to_string(u);
    }
    return "";
  };
  {
    std::string w = vanishes_on(p.alpha1(), p.dalpha1(), p.tf1());
    out.push_back({"alpha1, dalpha1 vanish on TF1", w.empty(), w});
    w = vanishes_on(p.alpha2(), p.dalpha2(), p.tf2());
    out.push_back({"alpha2, dalpha2 vanish on TF2", w.empty(), w});
  }
  {
    auto z1 = p.z1(), z2 = p.z2();
    bool ok = evaluate(p.alpha1(), {z1}) == 1 && evaluate(p.alpha2(), {z2}) == 1 && evaluate(p.alpha1(), {z2}) == 0 &&
              evaluate(p.alpha2(), {z1}) == 0 && interior(z1, p.dalpha1()).is_zero() &&
              interior(z1, p.dalpha2()).is_zero() && interior(z2, p.dalpha1()).is_zero() &&
              interior(z2, p.dalpha2()).is_zero();
    out.push_back({"Reeb equations", ok, ok ? "" : "Z1=" + to_string(z1) + " Z2=" + to_string(z2)});
  }
  {
    Distribution all = sum(sum(p.tg1(), p.tg2()), Distribution(n, {p.z1(), p.z2()}));
    out.push_back({"TG1 + TG2 + RZ1 + RZ2 = everything", all.dim() == n, "dimension " + std::to_string(all.dim())});
  }
  // induced contact form on the leaves: α2∧(dα2)^k is a volume on TF1 and vice versa
  auto leaf_volume = [&](const Form& a, const Form& da, unsigned power, const Distribution& d) {
    Form c = wedge(a, wedge_power(da, power));
    return evaluate(c, std::span<const Vector>(d.basis())) != 0;
  };
  out.push_back({"alpha2 contact on leaves of F1", leaf_volume(p.alpha2(), p.dalpha2(), k, p.tf1()), ""});
  out.push_back({"alpha1 contact on leaves of F2", leaf_volume(p.alpha1(), p.dalpha1(), h, p.tf2()), ""});
  return out;
}

}  // namespace mcp
