#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pinnevo/exprtree/text.hpp"
#include "pinnevo/exprtree/tree.hpp"

using namespace pinnevo::exprtree;

namespace {

double f_at(const ActivationTree& t, double x, std::vector<double> p) { return eval(t, x, p).value; }

// Five-point central differences.
double d1_fd(const ActivationTree& t, double x, const std::vector<double>& p, double h = 1e-3) {
  return (-f_at(t, x + 2 * h, p) + 8 * f_at(t, x + h, p) - 8 * f_at(t, x - h, p) + f_at(t, x - 2 * h, p)) /
         (12 * h);
}
double d2_fd(const ActivationTree& t, double x, const std::vector<double>& p, double h = 1e-3) {
  return (-f_at(t, x + 2 * h, p) + 16 * f_at(t, x + h, p) - 30 * f_at(t, x, p) + 16 * f_at(t, x - h, p) -
          f_at(t, x - 2 * h, p)) /
         (12 * h * h);
}

}  // namespace

TEST(ExprTree, OperatorValues) {
  const double x = 0.7;
  EXPECT_DOUBLE_EQ(apply(UnaryOp::identity, x), x);
  EXPECT_DOUBLE_EQ(apply(UnaryOp::negate, x), -x);
  EXPECT_DOUBLE_EQ(apply(UnaryOp::reciprocal, x), 1 / x);
  EXPECT_DOUBLE_EQ(apply(UnaryOp::square, x), x * x);
  EXPECT_DOUBLE_EQ(apply(UnaryOp::exp_plus_one, x), std::exp(x) + 1);
  EXPECT_DOUBLE_EQ(apply(UnaryOp::exp_neg_plus_one, x), std::exp(-x) + 1);
  EXPECT_NEAR(apply(UnaryOp::exp_sum, x), std::exp(x) + std::exp(-x), 1e-15);
  EXPECT_NEAR(apply(UnaryOp::exp_diff, x), std::exp(x) - std::exp(-x), 1e-15);
  EXPECT_NEAR(apply(UnaryOp::sigmoid, x), 1 / (1 + std::exp(-x)), 1e-15);
  EXPECT_NEAR(apply(UnaryOp::swish, x), x / (1 + std::exp(-x)), 1e-15);
  EXPECT_NEAR(apply(UnaryOp::softsign, x), x / (1 + x), 1e-15);
  EXPECT_NEAR(apply(UnaryOp::softplus, x), std::log(1 + std::exp(x)), 1e-15);
  EXPECT_DOUBLE_EQ(apply(BinaryOp::max, 1.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(apply(BinaryOp::min, 1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(apply(BinaryOp::div, 1.0, 4.0), 0.25);
}

TEST(ExprTree, UnaryDerivativesMatchDifferences) {
  for (int k = 0; k < kUnaryCount; ++k) {
    const auto op = static_cast<UnaryOp>(k);
    for (double x : {-1.3, -0.4, 0.35, 1.1}) {
      const auto g = derivatives(op, x);
      const double h = 1e-4;
      auto d = [&](int order, double y) { return derivatives(op, y)[order]; };
      for (int o = 0; o < 4; ++o) {
        const double fd = (d(o, x + h) - d(o, x - h)) / (2 * h);
        EXPECT_NEAR(g[o + 1], fd, 1e-5 * std::max(1.0, std::abs(fd))) << name(op) << " order " << o + 1 << " at " << x;
      }
    }
  }
}

TEST(ExprTree, ParsePrintRoundTrip) {
  for (std::string s : {"tanh(x)", "asinh(x)*cos(x)", "a*sigmoid(b*x)", "x/(expsum(x))", "max(x-x,sq(x)*x)",
                        "sin(a*x)", "min(x,tanh(x))", "x*sigmoid(a*x)", "neg(exp(x))"}) {
    const auto t = parse(s);
    EXPECT_TRUE(validate(t).empty()) << s;
    const auto printed = canonical_string(t, true);
    EXPECT_EQ(parse(printed), t) << s << " -> " << printed;
    EXPECT_EQ(canonical_string(parse(printed), true), printed);
  }
}

TEST(ExprTree, ParseErrorsCarryColumn) {
  try {
    parse("tanh(x");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 7);
  }
  EXPECT_THROW(parse("foo(x)"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("x+"), ParseError);
}

TEST(ExprTree, EvalKnownForms) {
  const auto t = parse("asinh(x)*cos(x)");
  EXPECT_EQ(t.node_count(), 3);
  EXPECT_EQ(t.edge_count(), 5);
  const double x = 0.8;
  EXPECT_NEAR(f_at(t, x, {}), std::asinh(x) * std::cos(x), 1e-15);
  const auto p = parse("a*sigmoid(b*x)");
  EXPECT_EQ(p.param_count(), 2);
  EXPECT_NEAR(f_at(p, x, {1.5, 2.0}), 1.5 / (1 + std::exp(-2 * x)), 1e-15);
  const auto j = eval_jet(p, x, std::vector<double>{1.5, 2.0});
  const double s = 1 / (1 + std::exp(-2 * x));
  EXPECT_NEAR(j.d1, 1.5 * 2 * s * (1 - s), 1e-14);
  EXPECT_NEAR(j.d2, 1.5 * 4 * s * (1 - s) * (1 - 2 * s), 1e-13);
}

TEST(ExprTree, JetMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto t = random_tree(rng);
    std::vector<double> p(t.param_count());
    for (auto& v : p) v = std::uniform_real_distribution<double>(0.5, 1.5)(rng);
    const double x = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto j = eval_jet(t, x, p, 2, true);
    if (!j.finite || std::abs(j.value) > 1e3) continue;
    // Skip kinks of max/min and poles.
    const double h = 1e-3;
    bool smooth = true;
    for (double y : {x - 2 * h, x + 2 * h}) {
      const auto jj = eval_jet(t, y, p);
      if (!jj.finite || std::abs(jj.d2 - j.d2) > 1e-1 * (1 + std::abs(j.d2))) smooth = false;
    }
    if (!smooth) continue;
    ++checked;
    EXPECT_NEAR(j.d1, d1_fd(t, x, p), 1e-6 * (1 + std::abs(j.d1))) << canonical_string(t, true);
    EXPECT_NEAR(j.d2, d2_fd(t, x, p), 1e-4 * (1 + std::abs(j.d2))) << canonical_string(t, true);
    for (int k = 0; k < t.param_count(); ++k) {
      auto pp = p, pm = p;
      pp[k] += 1e-6;
      pm[k] -= 1e-6;
      const auto jp = eval_jet(t, x, pp), jm = eval_jet(t, x, pm);
      EXPECT_NEAR(j.dvalue[k], (jp.value - jm.value) / 2e-6, 1e-6 * (1 + std::abs(j.dvalue[k])));
      EXPECT_NEAR(j.dd1[k], (jp.d1 - jm.d1) / 2e-6, 1e-6 * (1 + std::abs(j.dd1[k])));
      EXPECT_NEAR(j.dd2[k], (jp.d2 - jm.d2) / 2e-6, 1e-5 * (1 + std::abs(j.dd2[k])));
    }
  }
  EXPECT_GT(checked, 150);
}

TEST(ExprTree, BatchAgreesWithScalar) {
  const auto t = parse("a*sigmoid(b*x)");
  const std::vector<double> p = {0.9, 1.7};
  std::vector<double> z = {-2, -0.5, 0, 0.3, 4};
  ActivationBatch b;
  eval_batch(t, p, z, true, b);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto j = eval_jet(t, z[i], p, 2, true);
    EXPECT_DOUBLE_EQ(b.s0[i], j.value);
    EXPECT_DOUBLE_EQ(b.s1[i], j.d1);
    EXPECT_NEAR(b.s2[i], j.d2, 1e-15);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(b.ds1[k * z.size() + i], j.dd1[k], 1e-15);
  }
  EXPECT_TRUE(b.finite);
}

TEST(ExprTree, NonFiniteFlagged) {
  const auto t = parse("inv(x)");
  EXPECT_FALSE(eval(t, 0.0, {}).finite);
  EXPECT_TRUE(eval(t, 2.0, {}).finite);
}

TEST(ExprTree, ValidateRejectsOversizedTrees) {
  const auto big = parse("sin(sin(sin(sin(sin(sin(sin(sin(x))))))))");
  EXPECT_FALSE(validate(big).empty());
  EXPECT_TRUE(validate(parse("sin(sin(sin(sin(sin(sin(sin(x)))))))")).empty());
  std::vector<Node> chain(4, Node{NodeKind::unary, static_cast<std::uint8_t>(UnaryOp::sin)});
  for (int i = 0; i < 4; ++i) {
    chain[i].out_param = 0;
    if (i < 3) chain[i].child[0] = i + 1;
  }
  const auto four = ActivationTree::from_nodes(chain);
  EXPECT_EQ(four.param_count(), 4);
  EXPECT_FALSE(validate(four).empty());
}

TEST(ExprTree, RandomTreesAreValid) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto t = random_tree(rng);
    EXPECT_TRUE(validate(t).empty());
    EXPECT_TRUE(t.node_count() == 2 || t.node_count() == 3);
    EXPECT_LE(t.param_count(), 3);
  }
}
