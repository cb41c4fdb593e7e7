#include <gtest/gtest.h>

#include "pinnevo/space.hpp"

using namespace pinnevo::space;

namespace {

// Independent count of activation trees with m nodes: walk every tree shape
// recursively and count edges directly.
BigInt brute_term(int m, int U, int B, int ME) {
  // shapes[m] = list of (unary, binary, leaves) for each tree shape with m nodes
  std::vector<std::vector<std::array<int, 3>>> shapes(m + 1);
  if (m >= 1) shapes[1] = {{1, 0, 1}};
  for (int k = 2; k <= m; ++k) {
    for (auto s : shapes[k - 1]) shapes[k].push_back({s[0] + 1, s[1], s[2]});
    for (int a = 1; a + 1 < k; ++a)
      for (auto l : shapes[a])
        for (auto r : shapes[k - 1 - a]) shapes[k].push_back({l[0] + r[0], l[1] + r[1] + 1, l[2] + r[2]});
  }
  BigInt total = 0;
  for (auto s : shapes[m]) {
    const int edges = s[0] + s[1] + s[2];  // one out edge per node + one per leaf
    BigInt place = 0, c = 1;
    for (int i = 0; i <= std::min(edges, ME); ++i) {
      place += c;
      c = c * (edges - i) / (i + 1);
    }
    BigInt ops = 1;
    for (int i = 0; i < s[0]; ++i) ops *= U;
    for (int i = 0; i < s[1]; ++i) ops *= B;
    total += ops * place;
  }
  return total;
}

}  // namespace

TEST(Space, FibonacciAndCatalan) {
  EXPECT_EQ(fib(1), 1);
  EXPECT_EQ(fib(5), 5);
  EXPECT_EQ(fib(21), 10946);
  EXPECT_EQ(catalan(0), 1);
  EXPECT_EQ(catalan(3), 5);
  EXPECT_EQ(catalan(10), 16796);
  EXPECT_THROW(fib(0), std::invalid_argument);
}

TEST(Space, ShortcutBruteForceIsOddFibonacci) {
  for (int n = 2; n <= 10; ++n) EXPECT_EQ(enumerate_shortcut_configs(n), fib(2 * n - 1)) << n;
}

TEST(Space, StructureDefaults) {
  SpaceConfig c;
  EXPECT_EQ(structure_space(c), 283328);
  EXPECT_EQ(sci3(structure_space(c)), "2.83e05");
  c.n_min = c.n_max = 3;
  c.n_neu = 1;
  EXPECT_EQ(structure_space(c), 5);
  c.n_max = 2;
  EXPECT_THROW(structure_space(c), std::invalid_argument);
}

TEST(Space, ActivationTermsMatchTreeWalk) {
  SpaceConfig c;
  for (int m = 1; m <= 7; ++m) EXPECT_EQ(activation_space_term(c, m), brute_term(m, 23, 6, 3)) << m;
  EXPECT_EQ(activation_space_term(c, 3), 265029);
}

TEST(Space, TableValues) {
  SpaceConfig c;
  EXPECT_EQ(sci3(activation_space_term(c, 3)), "2.65e05");
  EXPECT_EQ(sci3(activation_space_term(c, 5)), "9.97e08");
  EXPECT_EQ(sci3(activation_space_term(c, 7)), "3.34e12");
  EXPECT_EQ(sci3(activation_space(c)), "3.40e12");
  EXPECT_EQ(sci3(model_space_term(c, 3)), "7.51e10");
  EXPECT_EQ(sci3(model_space_term(c, 5)), "2.82e14");
  EXPECT_EQ(sci3(model_space_term(c, 7)), "9.47e17");
  EXPECT_EQ(sci3(model_space(c)), "9.64e17");
}

TEST(Space, EmptyActivationSpace) {
  SpaceConfig c;
  c.max_nodes = 0;
  EXPECT_EQ(activation_space(c), 0);
  EXPECT_EQ(model_space(c), 0);
}

TEST(Space, Sci3Rounding) {
  EXPECT_EQ(sci3(BigInt(0)), "0.00e00");
  EXPECT_EQ(sci3(BigInt(7)), "7.00e00");
  EXPECT_EQ(sci3(BigInt(12)), "1.20e01");
  EXPECT_EQ(sci3(BigInt(9995)), "1.00e04");
  EXPECT_EQ(sci3(BigInt(12345)), "1.23e04");
}
