#include <gtest/gtest.h>

#include <numbers>

#include "support/checks.hpp"

using namespace pinnevo;
using autonet::Matrix;
using autonet::Vector;

namespace {

genome::Genome make(int n, int w, std::vector<genome::Shortcut> sc, const std::string& act) {
  genome::Genome g;
  g.structure = {n, w, std::move(sc)};
  g.activation = exprtree::parse(act);
  g.params.assign(g.activation.param_count(), 1.0);
  return g;
}

// Derivatives of a closed form by central differences.
template <class F>
double dd(F&& f, std::array<double, 3> x, int i, int j, double h = 1e-4) {
  auto at = [&](double a, double b) {
    auto y = x;
    y[i] += a;
    y[j] += b;
    return f(y);
  };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
}
template <class F>
double d(F&& f, std::array<double, 3> x, int i, double h = 1e-5) {
  auto y = x, z = x;
  y[i] += h;
  z[i] -= h;
  return (f(y) - f(z)) / (2 * h);
}

}  // namespace

TEST(Problems, Jet2Arithmetic) {
  const double x[3] = {0.3, -0.7, 1.1};
  const problems::Jet2 X = problems::seed(x, 0), Y = problems::seed(x, 1);
  const auto f = exp(X * Y) / (X + 2.0);
  const double e = std::exp(x[0] * x[1]), q = x[0] + 2;
  EXPECT_NEAR(f.v, e / q, 1e-15);
  EXPECT_NEAR(f.g[1], x[0] * e / q, 1e-14);
  EXPECT_NEAR(f.dd(1, 1), x[0] * x[0] * e / q, 1e-14);
  EXPECT_NEAR(f.g[0], x[1] * e / q - e / (q * q), 1e-14);
  EXPECT_EQ(f.dd(0, 1), f.dd(1, 0));
}

TEST(Problems, PointCounts) {
  auto counts = [](const std::string& name) { return checks::exact_case(name).counts; };
  EXPECT_EQ(counts("klein_gordon:I"), (std::vector<std::size_t>{3600, 162, 81, 10201}));
  EXPECT_EQ(counts("burgers:I"), (std::vector<std::size_t>{6000, 3720, 721, 100776}));
  EXPECT_EQ(counts("lame:I"), (std::vector<std::size_t>{5740, 200, 400, 23276}));
  EXPECT_EQ(counts("lame:IV"), (std::vector<std::size_t>{4232, 200, 300, 17268}));
  EXPECT_EQ(counts("lame:V"), (std::vector<std::size_t>{6648, 200, 550, 26944}));
}

TEST(Problems, SamplesInsideDomains) {
  const auto b = problems::sample_uniform(problems::make_problem("burgers:I"));
  for (const auto& ps : b.terms)
    for (Eigen::Index n = 0; n < ps.X.cols(); ++n) {
      EXPECT_TRUE(problems::detail::in_l_shape(ps.X(0, n), ps.X(1, n)));
      EXPECT_GE(ps.X(2, n), 0);
      EXPECT_LE(ps.X(2, n), 2);
    }
  const auto l = problems::sample_uniform(problems::make_problem("lame:I"));
  for (Eigen::Index n = 0; n < l.test.cols(); ++n) {
    const double r = std::hypot(l.test(0, n), l.test(1, n));
    EXPECT_GE(r, 1 - 1e-12);
    EXPECT_LE(r, 2 + 1e-12);
  }
}

TEST(Problems, KleinGordonSourceClosedForm) {
  const auto p = problems::make_problem("klein_gordon:III");
  const auto s = problems::sample_uniform(p);
  const double w = 6 * std::numbers::pi, c = 1.2;
  const auto& ps = s.terms[0];
  for (Eigen::Index n = 0; n < ps.X.cols(); n += 97) {
    const double x = ps.X(0, n), t = ps.X(1, n);
    const double u = x * std::cos(w * t) + c * std::pow(x * t, 3);
    const double utt = -x * w * w * std::cos(w * t) + 6 * c * x * x * x * t;
    const double uxx = 6 * c * x * t * t * t;
    EXPECT_NEAR(ps.data(0, n), utt - uxx + u * u * u, 1e-10 * (1 + std::abs(utt)));
  }
}

TEST(Problems, BurgersClosedFormSolvesPde) {
  for (double alpha : {0.1, 0.15, 0.05}) {
    auto u = [alpha](std::array<double, 3> x) { return 1 / (1 + std::exp((x[0] + x[1] - x[2]) / (2 * alpha))); };
    for (std::array<double, 3> x : {std::array<double, 3>{0.2, 0.3, 0.5}, {0.8, 0.9, 1.7}, {0.6, 0.1, 0.0}}) {
      const double r = d(u, x, 2) + u(x) * (d(u, x, 0) + d(u, x, 1)) - alpha * (dd(u, x, 0, 0) + dd(u, x, 1, 1));
      EXPECT_NEAR(r, 0, 1e-5);
    }
  }
}

TEST(Problems, LameClosedFormSatisfiesEquilibriumAndTraction) {
  for (std::string label : {"I", "II", "III", "IV", "V"}) {
    const auto c = problems::lame_case(label);
    const double A = c.A(), B = c.B();
    auto u = [&](std::array<double, 3> x) {
      const double q = c.a * c.a / (x[0] * x[0] + x[1] * x[1]);
      return A * (q - 1) * x[0] + B * (1 - q) * x[1];
    };
    auto v = [&](std::array<double, 3> x) {
      const double q = c.a * c.a / (x[0] * x[0] + x[1] * x[1]);
      return A * (q - 1) * x[1] - B * (1 - q) * x[0];
    };
    const double k = c.E / (1 - c.mu * c.mu), m = c.mu;
    const double r = 0.5 * (c.a + c.b);
    std::array<double, 3> in{r * std::cos(0.4), r * std::sin(0.4), 0};
    const double eq1 = dd(u, in, 0, 0) + 0.5 * (1 - m) * dd(u, in, 1, 1) + 0.5 * (1 + m) * dd(v, in, 0, 1);
    const double eq2 = dd(v, in, 1, 1) + 0.5 * (1 - m) * dd(v, in, 0, 0) + 0.5 * (1 + m) * dd(u, in, 0, 1);
    EXPECT_NEAR(eq1, 0, 1e-5) << label;
    EXPECT_NEAR(eq2, 0, 1e-5) << label;
    // Fixed inner circle.
    std::array<double, 3> a{c.a * std::cos(1.0), c.a * std::sin(1.0), 0};
    EXPECT_NEAR(u(a), 0, 1e-14);
    EXPECT_NEAR(v(a), 0, 1e-14);
    // Outer traction: normal pressure q1 and tangential shear q2.
    const double th = 2.2;
    std::array<double, 3> b{c.b * std::cos(th), c.b * std::sin(th), 0};
    const double n1 = std::cos(th), n2 = std::sin(th);
    const double sxx = k * (d(u, b, 0) + m * d(v, b, 1));
    const double syy = k * (d(v, b, 1) + m * d(u, b, 0));
    const double sxy = k * 0.5 * (1 - m) * (d(u, b, 1) + d(v, b, 0));
    const double tx = sxx * n1 + sxy * n2, ty = sxy * n1 + syy * n2;
    EXPECT_NEAR(tx * n1 + ty * n2, -c.q1, 1e-6) << label;
    EXPECT_NEAR(tx * n2 - ty * n1, c.q2, 1e-6) << label;
  }
}

TEST(Problems, ExactFieldCertifiesEveryCase) {
  for (const auto& name : problems::all_cases()) {
    const auto st = checks::exact_case(name);
    EXPECT_LT(st.loss, 1e-20) << name;
    for (double e : st.errors) EXPECT_EQ(e, 0.0) << name;
  }
}

TEST(Problems, LossGradientMatchesDifferences) {
  for (std::string name : {"klein_gordon:I", "burgers:II", "lame:III"}) {
    auto p = problems::make_problem(name);
    auto s = problems::sample_uniform(p);
    // Thin the samples to keep the check quick.
    for (auto& ps : s.terms) {
      const Eigen::Index keep = std::min<Eigen::Index>(ps.X.cols(), 40);
      ps.X = ps.X.leftCols(keep).eval();
      ps.data = ps.data.leftCols(keep).eval();
    }
    autonet::Network net(make(4, 20, {{0, 2}}, "a*tanh(b*x)"), p.input_dim, p.output_dim);
    Rng rng(8);
    Vector theta = net.init_params(rng);
    Vector grad;
    const auto rep = problems::loss_and_gradient(p, s, net, theta, grad);
    ASSERT_TRUE(rep.finite);
    problems::NetworkField field(net, theta);
    EXPECT_NEAR(problems::loss(p, field, s).total, rep.total, 1e-12 * rep.total);
    for (int trial = 0; trial < 3; ++trial) {
      Vector v(theta.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform_real(rng, -1, 1);
      v.normalize();
      const double fd = checks::richardson(
          [&](double h) {
            Vector t = theta + h * v;
            problems::NetworkField f(net, t);
            return problems::loss(p, f, s).total;
          },
          1e-4);
      EXPECT_NEAR(grad.dot(v), fd, 1e-6 * std::max(1.0, std::abs(fd))) << name;
    }
  }
}

TEST(Problems, RelativeL2) {
  Matrix exact(2, 3), approx(2, 3);
  exact << 1, 2, 2, 0, 3, 4;
  approx << 1, 2, 3, 0, 3, 4;
  const auto e = problems::relative_l2_error(approx, exact);
  EXPECT_NEAR(e[0], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(e[1], 0.0);
}

TEST(Problems, UnknownNamesRejected) {
  EXPECT_THROW(problems::make_problem("heat:I"), std::invalid_argument);
  EXPECT_THROW(problems::make_problem("burgers:IV"), std::invalid_argument);
  EXPECT_EQ(problems::all_cases().size(), 11u);
}
