#include "mcp/builtins.hpp"
#include "mcp/contact_pair.hpp"

#include <gtest/gtest.h>

using namespace mcp;

namespace {

struct Loaded {
  InstanceSpec spec;
  LieAlgebra algebra;
  explicit Loaded(const std::string& name) : spec(builtin(name)), algebra(build_algebra(spec)) {}
  ContactPair pair() const { return ContactPair::certify(algebra, spec.pair->first, spec.pair->second); }
};

Vector X(std::size_t n, std::size_t i) { return Vector::unit(n, i - 1); }

}  // namespace

TEST(ContactPair, ExampleTypeReebAndDistributions) {
  Loaded in("bande-hadjar-6d");
  ContactPair p = in.pair();
  EXPECT_EQ(p.type(), (PairType{1, 1}));
  EXPECT_EQ(p.z1(), X(6, 1));
  EXPECT_EQ(p.z2(), X(6, 2));
  EXPECT_EQ(p.tf1(), Distribution::span_of_units(6, {1, 4, 5}));
  EXPECT_EQ(p.tf2(), Distribution::span_of_units(6, {0, 2, 3}));
  EXPECT_EQ(p.tg1(), Distribution::span_of_units(6, {4, 5}));
  EXPECT_EQ(p.tg2(), Distribution::span_of_units(6, {2, 3}));
  EXPECT_EQ(top_coefficient(top_wedge(in.algebra, p.alpha1(), p.alpha2(), p.type())), Rational(1));
}

TEST(ContactPair, CatalogTypes) {
  EXPECT_EQ(Loaded("heisenberg3").pair().type(), (PairType{1, 0}));
  EXPECT_EQ(Loaded("heisenberg3x3").pair().type(), (PairType{1, 1}));
  EXPECT_EQ(Loaded("heisenberg5x3").pair().type(), (PairType{2, 1}));
  ContactPair ab = Loaded("abelian2").pair();
  EXPECT_EQ(ab.type(), (PairType{0, 0}));
  EXPECT_EQ(ab.tg1().dim(), 0u);
  EXPECT_EQ(ab.tf1(), Distribution(2, {X(2, 2)}));
}

TEST(ContactPair, RepeatedFormGivesDiagnostics) {
  Loaded in("bande-hadjar-6d");
  Form w1 = Form::basis(6, 0);
  TypeDetection d = detect_type(in.algebra, w1, w1);
  EXPECT_FALSE(d.ok());
  ASSERT_EQ(d.diagnostics.size(), 3u);  // one line per candidate (h,k)
  for (const auto& line : d.diagnostics) EXPECT_NE(line.find("top wedge"), std::string::npos) << line;
  try {
    ContactPair::certify(in.algebra, w1, w1);
    FAIL();
  } catch (const ContactPairError& e) {
    EXPECT_EQ(e.diagnostics.size(), 3u);
  }
}

TEST(ContactPair, OddDimensionAndWrongDegree) {
  LieAlgebra h = LieAlgebra::abelian(3);
  auto d = detect_type(h, Form::basis(3, 0), Form::basis(3, 1));
  EXPECT_FALSE(d.ok());
  EXPECT_NE(d.diagnostics.at(0).find("odd"), std::string::npos);
  auto e = detect_type(h, Form(3, 2), Form::basis(3, 1));
  EXPECT_FALSE(e.ok());
}

TEST(ContactPair, PowerConditionViolated) {
  // on h5 + R^2... use h5 ⊕ R with α1 = ω1 and α2 = ω6: α1 has (dα1)^2 ≠ 0 so type (2,0)
  std::vector<Form> dw(6, Form(6, 2));
  dw[0] = wedge(Form::basis(6, 1), Form::basis(6, 2)) + wedge(Form::basis(6, 3), Form::basis(6, 4));
  LieAlgebra L = LieAlgebra::from_structure_equations(default_coframe_names(6), dw);
  auto t = detect_type(L, Form::basis(6, 0), Form::basis(6, 5));
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(*t.type, (PairType{2, 0}));
  // swapping the roles forces the wrong power on α1 for every other candidate
  auto s = detect_type(L, Form::basis(6, 5), Form::basis(6, 0));
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(*s.type, (PairType{0, 2}));
  // α2 = ω2 is not part of a pair: the top wedge vanishes everywhere
  auto f = detect_type(L, Form::basis(6, 0), Form::basis(6, 1));
  EXPECT_FALSE(f.ok());
}

TEST(ContactPair, ReebFieldsForRescaledForms) {
  Loaded in("bande-hadjar-6d");
  Form a1 = make_rational(2, 1) * Form::basis(6, 0);
  Form a2 = Form::basis(6, 1) + Form::basis(6, 2);
  auto [z1, z2] = reeb_vector_fields(in.algebra, a1, a2);
  EXPECT_EQ(evaluate(a1, {z1}), Rational(1));
  EXPECT_EQ(evaluate(a2, {z2}), Rational(1));
  EXPECT_EQ(evaluate(a1, {z2}), Rational(0));
  EXPECT_EQ(evaluate(a2, {z1}), Rational(0));
  EXPECT_TRUE(interior(z1, in.algebra.differential(a1)).is_zero());
  EXPECT_TRUE(interior(z2, in.algebra.differential(a2)).is_zero());
}

TEST(ContactPair, ReebSystemDegenerate) {
  LieAlgebra L = LieAlgebra::abelian(4);
  EXPECT_THROW(reeb_vector_fields(L, Form::basis(4, 0), Form::basis(4, 1)), ContactPairError);
  EXPECT_THROW(reeb_vector_fields(L, Form::basis(4, 0), Form::basis(4, 0)), ContactPairError);
}

TEST(ContactPair, IdentitiesHoldOnCatalog) {
  for (const auto& name : builtin_names()) {
    Loaded in(name);
    ContactPair p = in.pair();
    for (const auto& c : pair_identities(in.algebra, p)) EXPECT_TRUE(c.ok) << name << ": " << c.name << " " << c.witness;
  }
}
