#include "mcp/builtins.hpp"
#include "mcp/foliation.hpp"
#include "mcp/polarization.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mcp;

namespace {

struct Darboux {
  const char* name;
  std::vector<std::size_t> q, p;
};

const std::vector<Darboux>& shearable() {
  static const std::vector<Darboux> d = {
      {"bande-hadjar-6d", {2, 4}, {3, 5}},
      {"heisenberg3x3", {1, 4}, {2, 5}},
      {"heisenberg5x3", {1, 3, 6}, {2, 4, 7}},
  };
  return d;
}

QMatrix random_symmetric(std::size_t m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(-3, 3), den(1, 3);
  QMatrix b(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) b(i, j) = b(j, i) = make_rational(c(rng), den(rng));
  return b;
}

}  // namespace

TEST(Property, ShearedAndRebasedInstancesSatisfyTheIdentities) {
  std::mt19937_64 rng(2718);
  int decomposable = 0, mixed = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const auto& dz = shearable()[trial % shearable().size()];
    InstanceSpec s = oracle::symplectic_shear(builtin(dz.name), dz.q, dz.p, random_symmetric(dz.q.size(), rng));
    if (trial % 2) s = oracle::change_basis(s, oracle::random_basis_change(s.dim(), rng));
    LieAlgebra L = build_algebra(s);
    ContactPair p = ContactPair::certify(L, s.pair->first, s.pair->second);
    MetricTensor g(*s.metric);
    auto c = check_associated(p, g, default_kappa());
    ASSERT_TRUE(c.associated.ok) << dz.name << " " << c.associated.witness;
    EXPECT_TRUE(c.structure.ok);
    EXPECT_TRUE(c.compatible.ok);
    EXPECT_EQ(c.decomposable.ok, c.orthogonal.ok) << dz.name << " trial " << trial;
    (c.decomposable.ok ? decomposable : mixed)++;
    auto conn = levi_civita(L, g.matrix());
    for (const auto* d : {&p.tf1(), &p.tf2()}) {
      auto r = analyze_foliation(L, g.matrix(), conn, *d, "F");
      EXPECT_EQ(r.minimal, r.rummler.minimal) << dz.name << " trial " << trial;
      if (c.decomposable.ok) { EXPECT_TRUE(r.minimal); }
    }
    if (c.decomposable.ok) { EXPECT_TRUE(volume_identity(L, p, g, default_kappa()).holds); }
  }
  EXPECT_GT(mixed, 10);
}

TEST(Property, RandomAssociateOutputsObeyEquivalence) {
  int runs = 0;
  for (const char* name : {"bande-hadjar-6d", "heisenberg3x3", "heisenberg5x3"}) {
    InstanceSpec s = builtin(name);
    LieAlgebra L = build_algebra(s);
    ContactPair p = ContactPair::certify(L, s.pair->first, s.pair->second);
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
      auto out = build_associated_metric(p, random_rational_spd(s.dim(), seed).cast<double>(), default_kappa());
      const auto& c = out.residuals.certificate;
      EXPECT_TRUE(c.associated.ok) << name << " " << seed;
      EXPECT_EQ(c.decomposable.ok, c.orthogonal.ok);
      EXPECT_LE(out.residuals.max_residual(), 1e-9);
      ++runs;
    }
  }
  EXPECT_EQ(runs, 60);
}

TEST(Property, RenderParseFixpointOnRandomizedSpecs) {
  std::mt19937_64 rng(11);
  for (const auto& name : builtin_names())
    for (int trial = 0; trial < 4; ++trial) {
      InstanceSpec s = oracle::change_basis(builtin(name), oracle::random_basis_change(builtin(name).dim(), rng));
      std::string text = render_instance(s);
      EXPECT_EQ(parse_instance(text), s) << text;
      EXPECT_EQ(render_instance(parse_instance(text)), text);
    }
}

TEST(Property, StructureTensorRankAndSquare) {
  std::mt19937_64 rng(5);
  for (const auto& name : builtin_names())
    for (int trial = 0; trial < 3; ++trial) {
      InstanceSpec s = oracle::change_basis(builtin(name), oracle::random_basis_change(builtin(name).dim(), rng));
      LieAlgebra L = build_algebra(s);
      ContactPair p = ContactPair::certify(L, s.pair->first, s.pair->second);
      const QMatrix& phi = *s.phi;
      const std::size_t n = s.dim();
      EXPECT_EQ(rank(phi), n - 2) << name;
      QMatrix target = -QMatrix::identity(n) + QMatrix::outer(p.z1(), coefficients(p.alpha1())) +
                       QMatrix::outer(p.z2(), coefficients(p.alpha2()));
      EXPECT_EQ(phi * phi, target) << name;
      EXPECT_TRUE((QMatrix::from_rows(n, {coefficients(p.alpha1()), coefficients(p.alpha2())}) * phi).is_zero());
    }
}
