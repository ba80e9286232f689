#include "mcp/builtins.hpp"
#include "mcp/metric.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mcp;

namespace {

struct Loaded {
  InstanceSpec spec;
  LieAlgebra algebra;
  ContactPair pair;
  explicit Loaded(const InstanceSpec& s)
      : spec(s), algebra(build_algebra(spec)), pair(ContactPair::certify(algebra, spec.pair->first, spec.pair->second)) {}
  explicit Loaded(const std::string& name) : Loaded(builtin(name)) {}
  McpCertificate<Rational> certify(const Rational& kappa = default_kappa()) const {
    return certify_metric(PairData<Rational>::from(pair), *spec.metric, *spec.phi, kappa);
  }
};

Vector X(std::size_t n, std::size_t i) { return Vector::unit(n, i - 1); }

/// Darboux coordinates for the shear: (q, p) with Ω(q_i, p_i) = 1.
struct Darboux {
  std::vector<std::size_t> q, p;
};
Darboux example_darboux() { return {{2, 4}, {3, 5}}; }
Darboux product_darboux() { return {{1, 4}, {2, 5}}; }

QMatrix mixing_shear() {
  QMatrix b(2, 2);
  b(0, 1) = b(1, 0) = 1;
  return b;
}

}  // namespace

TEST(Metric, ExamplePhiFromMetric) {
  Loaded in("bande-hadjar-6d");
  MetricTensor g(*in.spec.metric);
  QMatrix phi = phi_from_metric(in.pair, g, make_rational(1, 2));
  const std::size_t n = 6;
  EXPECT_EQ(phi * X(n, 6), X(n, 5));
  EXPECT_EQ(phi * X(n, 4), X(n, 3));
  EXPECT_EQ(phi * X(n, 5), -X(n, 6));
  EXPECT_EQ(phi * X(n, 3), -X(n, 4));
  EXPECT_TRUE((phi * X(n, 1)).is_zero());
  EXPECT_TRUE((phi * X(n, 2)).is_zero());
  EXPECT_EQ(phi, *in.spec.phi);
}

TEST(Metric, ExampleCertificateAllTrue) {
  auto c = Loaded("bande-hadjar-6d").certify();
  EXPECT_TRUE(c.reeb_metric.ok);
  EXPECT_TRUE(c.phi_pairing.ok);
  EXPECT_TRUE(c.structure.ok);
  EXPECT_TRUE(c.compatible.ok);
  EXPECT_TRUE(c.associated.ok);
  EXPECT_TRUE(c.decomposable.ok);
  EXPECT_TRUE(c.orthogonal.ok);
  EXPECT_TRUE(c.all_true());
  EXPECT_TRUE(c.theorem_equivalence_holds());
  EXPECT_TRUE(c.associated_implies_compatible());
}

TEST(Metric, CatalogCertifies) {
  for (const auto& name : builtin_names()) {
    auto c = Loaded(name).certify();
    EXPECT_TRUE(c.all_true()) << name << ": " << c.associated.witness << c.decomposable.witness;
  }
}

TEST(Metric, WrongKappaBreaksPairingButNotStructure) {
  Loaded in("bande-hadjar-6d");
  auto c = in.certify(Rational(1));
  EXPECT_FALSE(c.phi_pairing.ok);
  EXPECT_FALSE(c.associated.ok);
  EXPECT_TRUE(c.structure.ok);
  EXPECT_FALSE(c.phi_pairing.witness.empty());
  // derived φ for κ = 1 is 2J, which fails φ² = -Id
  MetricTensor g(*in.spec.metric);
  QMatrix phi1 = phi_from_metric(in.pair, g, Rational(1));
  auto d = PairData<Rational>::from(in.pair);
  EXPECT_FALSE(check_structure_tensor(d, phi1).ok);
  EXPECT_EQ(check_associated(in.pair, g, Rational(1)).associated.ok, false);
}

TEST(Metric, MetricTensorValidation) {
  QMatrix asym = QMatrix::identity(2);
  asym(0, 1) = 1;
  EXPECT_THROW(MetricTensor{asym}, MetricError);
  QMatrix indef = QMatrix::identity(2);
  indef(1, 1) = -1;
  EXPECT_THROW(MetricTensor{indef}, MetricError);
  EXPECT_THROW(MetricTensor{QMatrix(2, 3)}, MetricError);
  EXPECT_NO_THROW(MetricTensor{QMatrix::identity(3)});
}

TEST(Metric, StructureTensorWitnesses) {
  Loaded in("bande-hadjar-6d");
  auto d = PairData<Rational>::from(in.pair);
  QMatrix zero(6, 6);
  auto r = check_structure_tensor(d, zero);
  EXPECT_FALSE(r.ok);
  QMatrix bad = *in.spec.phi;
  bad(0, 2) = 1;  // α1 ∘ φ ≠ 0
  auto s = check_structure_tensor(d, bad);
  EXPECT_FALSE(s.ok);
  EXPECT_FALSE(s.witness.empty());
}

TEST(Metric, ShearedAssociatedMetricIsNotDecomposable) {
  for (auto [name, dz] : {std::pair{"bande-hadjar-6d", example_darboux()}, std::pair{"heisenberg3x3", product_darboux()}}) {
    Loaded in(oracle::symplectic_shear(builtin(name), dz.q, dz.p, mixing_shear()));
    auto c = in.certify();
    EXPECT_TRUE(c.associated.ok) << name << c.associated.witness;
    EXPECT_TRUE(c.compatible.ok) << name;
    EXPECT_FALSE(c.decomposable.ok) << name;
    EXPECT_FALSE(c.orthogonal.ok) << name;
    EXPECT_TRUE(c.theorem_equivalence_holds()) << name;
    EXPECT_FALSE(c.all_true());
  }
}

TEST(Metric, DiagonalShearKeepsDecomposable) {
  QMatrix b(2, 2);
  b(0, 0) = make_rational(1, 3);
  b(1, 1) = -2;
  Loaded in(oracle::symplectic_shear(builtin("bande-hadjar-6d"), example_darboux().q, example_darboux().p, b));
  auto c = in.certify();
  EXPECT_TRUE(c.associated.ok);
  EXPECT_TRUE(c.decomposable.ok);
  EXPECT_TRUE(c.orthogonal.ok);
}

TEST(Metric, NonAssociatedMetricCompatibilityReported) {
  // identity metric on the example algebra: Reeb metric holds, pairing fails
  Loaded in("bande-hadjar-6d");
  MetricTensor g(QMatrix::identity(6));
  auto c = check_associated(in.pair, g, default_kappa());
  EXPECT_TRUE(c.reeb_metric.ok);
  EXPECT_FALSE(c.associated.ok);
  EXPECT_TRUE(c.associated_implies_compatible());
  EXPECT_TRUE(c.theorem_equivalence_holds());
}

TEST(Metric, FloatModeWithinTolerance) {
  Loaded in("bande-hadjar-6d");
  auto d = PairData<double>::from(in.pair);
  FMatrix g = in.spec.metric->cast<double>();
  FMatrix phi = in.spec.phi->cast<double>();
  phi(2, 3) += 1e-12;
  auto c = certify_metric(d, g, phi, 0.5, 1e-9);
  EXPECT_TRUE(c.all_true());
  EXPECT_GT(c.phi_pairing.residual, 0.0);
  phi(2, 3) += 1e-6;
  EXPECT_FALSE(certify_metric(d, g, phi, 0.5, 1e-9).phi_pairing.ok);
}
