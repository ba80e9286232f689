#include "mcp/builtins.hpp"
#include "mcp/dsl.hpp"

#include "malformed.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

using namespace mcp;

namespace {

const char* example_text = R"(
algebra bande-hadjar-6d {
  dim 6;
  basis w1 w2 w3 w4 w5 w6;
  d w1 = w3 ^ w4;
  d w2 = w5 ^ w6;
  d w3 = 0;
  d w4 = w3 ^ w5;
  d w5 = w3 ^ w6;
  d w6 = 0;
}
pair { alpha1 = w1; alpha2 = w2 }
)";

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

ParseError parse_error(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError(ParseError::Kind::syntax, {}, "none");
}

}  // namespace

TEST(Dsl, ExampleAlgebraMatchesBuiltin) {
  InstanceSpec s = parse_instance(example_text);
  InstanceSpec b = builtin("bande-hadjar-6d");
  EXPECT_EQ(s.name, b.name);
  EXPECT_EQ(s.basis, b.basis);
  EXPECT_EQ(s.differentials, b.differentials);
  EXPECT_EQ(s.pair, b.pair);
  EXPECT_FALSE(s.metric);
  EXPECT_FALSE(s.phi);
  EXPECT_EQ(s.differentials[3], wedge(Form::basis(6, 2), Form::basis(6, 4)));
}

TEST(Dsl, MetricBlockElaboratesToMatrix) {
  InstanceSpec s = parse_instance(std::string(example_text) + "metric { w1*w1 + w2*w2 + 1/2 (w3*w3 + w4*w4 + w5*w5 + w6*w6) }\n");
  QMatrix want = QMatrix::identity(6);
  for (std::size_t i = 2; i < 6; ++i) want(i, i) = make_rational(1, 2);
  EXPECT_EQ(*s.metric, want);
}

TEST(Dsl, OffDiagonalSymmetricProduct) {
  InstanceSpec s = parse_instance("algebra a { dim 2; basis x y }\nmetric { x*x + x*y + y*x + 3 y*y }\n");
  EXPECT_EQ((*s.metric)(0, 1), Rational(1));
  EXPECT_EQ((*s.metric)(1, 0), Rational(1));
  EXPECT_EQ((*s.metric)(1, 1), Rational(3));
  InstanceSpec t = parse_instance("algebra a { dim 2; basis x y }\nmetric { (x + y) * (x - y) }\n");
  EXPECT_EQ((*t.metric)(0, 0), Rational(1));
  EXPECT_EQ((*t.metric)(1, 1), Rational(-1));
  EXPECT_EQ((*t.metric)(0, 1), Rational(0));
}

TEST(Dsl, SelfWedgeElaboratesToZero) {
  InstanceSpec s = parse_instance("algebra a { dim 2; basis w1 w2; d w1 = w2 ^ w2 }");
  EXPECT_TRUE(s.differentials[0].is_zero());
  EXPECT_EQ(s.differentials[0].degree(), 2u);
}

TEST(Dsl, MissingEquationsAreZeroAndCoefficientsParse) {
  InstanceSpec s = parse_instance("algebra a { dim 3; basis p q r; d r = -2/5 p^q + 3 q ^ p }");
  EXPECT_TRUE(s.differentials[0].is_zero());
  EXPECT_EQ(s.differentials[2], make_rational(-17, 5) * wedge(Form::basis(3, 0), Form::basis(3, 1)));
}

TEST(Dsl, PhiAndConfig) {
  InstanceSpec s = builtin("bande-hadjar-6d");
  ASSERT_TRUE(s.phi);
  EXPECT_EQ(s.phi->column(5), Vector::unit(6, 4));
  EXPECT_EQ(s.phi->column(2), -Vector::unit(6, 3));
  EXPECT_TRUE(s.phi->column(0).is_zero());
  EXPECT_EQ(s.config.kappa, make_rational(1, 2));
  EXPECT_EQ(s.config.tol, 1e-9);
  InstanceSpec e = builtin("abelian2");
  ASSERT_TRUE(e.phi);
  EXPECT_TRUE(e.phi->is_zero());
}

TEST(Dsl, CommentsAndFreeLayout) {
  InstanceSpec s = parse_instance("# header\nalgebra a{dim 2;basis w1 w2;;d w1=0;} # trailing\npair{alpha2=w2;alpha1=w1}");
  EXPECT_EQ(s.pair->first, Form::basis(2, 0));
  EXPECT_EQ(s.pair->second, Form::basis(2, 1));
}

TEST(Dsl, RoundTripOnEveryBuiltin) {
  for (const auto& name : builtin_names()) {
    InstanceSpec s = builtin(name);
    std::string once = render_instance(s);
    InstanceSpec again = parse_instance(once);
    EXPECT_EQ(again, s) << name;
    EXPECT_EQ(render_instance(again), once) << name;
  }
}

TEST(Dsl, RoundTripPreservesGeneralMetricAndPhi) {
  InstanceSpec s = parse_instance(
      "algebra q { dim 3; basis a b c }\nmetric { 2 a*a - 1/3 a*c + c*c + b*b }\nphi { X1 -> 1/2 X2 - X3; X3 -> -7 X1 }\n"
      "config { tol = 2.5e-07 }\n");
  EXPECT_EQ(parse_instance(render_instance(s)), s);
  EXPECT_EQ((*s.metric)(0, 2), make_rational(-1, 6));
}

TEST(Dsl, InstanceFilesMatchRegistry) {
  for (const auto& name : builtin_names())
    EXPECT_EQ(parse_instance(read_file(std::string(MCP_INSTANCE_DIR) + "/" + name + ".cps")), builtin(name)) << name;
}

TEST(Dsl, UnknownBuiltinListsRegistry) {
  try {
    builtin("nope");
    FAIL();
  } catch (const UnknownInstance& e) {
    std::string msg = e.what();
    for (const auto& n : builtin_names()) EXPECT_NE(msg.find(n), std::string::npos);
  }
}

TEST(Dsl, MalformedInputsAreLocated) {
  for (const auto& m : fixtures::malformed_inputs()) {
    ParseError e = parse_error(m.text);
    EXPECT_EQ(e.where.line, m.line) << m.label << ": " << e.what();
    EXPECT_EQ(e.where.column, m.column) << m.label << ": " << e.what();
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(m.line)), std::string::npos) << m.label;
  }
}

TEST(Dsl, ErrorKindsAndExpectedSets) {
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w2; d w1 = w9 ^ w1 }").kind, ParseError::Kind::reference);
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w2 @ }").kind, ParseError::Kind::lexical);
  auto syn = parse_error("algebra a { dim 2 basis w1 w2 }");
  EXPECT_EQ(syn.kind, ParseError::Kind::syntax);
  EXPECT_EQ(syn.expected, (std::vector<std::string>{"';'", "'}'"}));
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w2; d w1 = w1 w2 }").kind, ParseError::Kind::semantic);
  EXPECT_EQ(parse_error("algebra a { dim 0 }").kind, ParseError::Kind::semantic);
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w1 }").kind, ParseError::Kind::semantic);
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w2; d w1 = 0; d w1 = 0 }").kind, ParseError::Kind::semantic);
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w2 }\nalgebra b { dim 1; basis x }").kind,
            ParseError::Kind::semantic);
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w2 }\nconfig { kappa = -1 }").kind, ParseError::Kind::semantic);
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w2 }\npair { alpha1 = w1 }").kind, ParseError::Kind::syntax);
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w2 }\nmetric { w1 }").kind, ParseError::Kind::semantic);
  EXPECT_EQ(parse_error("algebra a { dim 2; basis w1 w2; d w1 = w1 ^ w2 ^ w1 }").kind, ParseError::Kind::semantic);
  EXPECT_EQ(parse_error("").kind, ParseError::Kind::syntax);
  EXPECT_EQ(parse_error("algebra a { basis w1 }").kind, ParseError::Kind::reference);
}

TEST(Dsl, JuxtapositionDoesNotCrossLines) {
  // a newline ends an implicit product, so a forgotten ';' is reported where the next statement starts
  auto e = parse_error("algebra a {\n  dim 2;\n  basis w1 w2;\n  d w1 = 0\n  d w2 = 0\n}");
  EXPECT_EQ(e.where.line, 5u);
  EXPECT_EQ(e.where.column, 3u);
}

TEST(Dsl, ReentrantParsing) {
  std::vector<std::thread> ts;
  std::vector<int> ok(8, 0);
  for (int i = 0; i < 8; ++i)
    ts.emplace_back([&, i] { ok[i] = parse_instance(builtin_text("heisenberg5x3")) == builtin("heisenberg5x3"); });
  for (auto& t : ts) t.join();
  for (int v : ok) EXPECT_EQ(v, 1);
}
