#include <gtest/gtest.h>

#include <set>

#include "uod/arith.hpp"

using namespace uod;

namespace {

const Archimedean Z;

std::vector<std::string> names(const std::vector<XiClass<Archimedean>>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(format_xi(Z, x));
  return out;
}

}  // namespace

TEST(FiniteField, PrimeFieldTables) {
  FiniteField f3(3);
  EXPECT_EQ(f3.mul(2, 2), 1);
  EXPECT_EQ(f3.add(2, 2), 1);
  EXPECT_EQ(f3.primitive(), 2);
  FiniteField f5(5);
  EXPECT_EQ(f5.primitive(), 2);
  EXPECT_EQ(f5.inv(3), 2);
}

TEST(FiniteField, ExtensionFieldIsAField) {
  for (int q : {4, 8, 9, 16, 25, 27}) {
    FiniteField f(q);
    for (int a = 1; a < q; ++a) EXPECT_EQ(f.mul(a, f.inv(a)), 1) << q << " " << a;
    int x = f.primitive(), ord = 1;
    while (x != 1) {
      x = f.mul(x, f.primitive());
      ++ord;
    }
    EXPECT_EQ(ord, q - 1) << q;
  }
  // F_4 = F_2[a]/(a^2+a+1): the least irreducible of degree 2 over F_2
  EXPECT_EQ(FiniteField(4).modulus(), (std::vector<int>{1, 1, 1}));
  // F_9 = F_3[a]/(a^2+1)
  EXPECT_EQ(FiniteField(9).modulus(), (std::vector<int>{1, 0, 1}));
}

TEST(FiniteField, RejectsNonPrimePowers) {
  EXPECT_THROW(FiniteField(6), Error);
  EXPECT_THROW(FiniteField(1), Error);
}

TEST(Polynomials, ParseAndFormat) {
  FqPolyRing r(3);
  EXPECT_EQ(r.format(r.parse("T^2+2*T+1")), "T^2+2*T+1");
  EXPECT_EQ(r.format(r.parse("T*(T+1)")), "T^2+T");
  EXPECT_EQ(r.format(r.parse("(T+1)^2")), "T^2+2*T+1");
  EXPECT_EQ(r.format(r.parse("4T + 5")), "T+2");
  EXPECT_EQ(r.format(r.parse("-T")), "2*T");
  EXPECT_THROW(r.parse("T+"), Error);
  EXPECT_THROW(r.parse("T)"), Error);
  EXPECT_THROW(r.parse("a*T"), Error);
  FqPolyRing r4(4);
  EXPECT_EQ(r4.format(r4.parse("a*T+a^2")), "a*T+(a+1)");
}

TEST(Polynomials, DivisionAndGcd) {
  FqPolyRing r(3);
  auto f = r.parse("T^3+2*T+1"), g = r.parse("T+2");
  auto [qt, rem] = r.divmod(f, g);
  EXPECT_EQ(r.add(r.mul(qt, g), rem), f);
  EXPECT_EQ(r.format(r.gcd(r.parse("T^2+T"), r.parse("T^2+2*T+1"))), "T+1");
  auto [d, s, t] = r.xgcd(r.parse("T^2+1"), r.parse("T"));
  EXPECT_EQ(r.format(d), "1");
  EXPECT_EQ(r.add(r.mul(s, r.parse("T^2+1")), r.mul(t, r.parse("T"))), d);
}

TEST(Ideals, ArchimedeanRadicalAndFactor) {
  EXPECT_EQ(radical(Z, 12), 6);
  auto fs = Z.factor(360);
  ASSERT_EQ(fs.size(), 3u);
  EXPECT_EQ(fs[0].prime, 2);
  EXPECT_EQ(fs[0].exponent, 3);
  EXPECT_EQ(divisors(Z, 12), (std::vector<std::int64_t>{1, 2, 3, 4, 6, 12}));
}

TEST(Ideals, FunctionFieldFactorAndDivide) {
  FunctionField F(3);
  auto fs = F.factor(F.parse("T^2+T"));
  ASSERT_EQ(fs.size(), 2u);
  EXPECT_EQ(F.format(fs[0].prime), "T");
  EXPECT_EQ(F.format(fs[1].prime), "T+1");
  try {
    ideal_divide(F, F.parse("T"), F.parse("T+1"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotDivisible);
  }
  auto g = F.factor(F.parse("(T^2+1)^2*T^3*(T+2)"));
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(F.format(g[2].prime), "T^2+1");
  EXPECT_EQ(g[2].exponent, 2);
  EXPECT_EQ(g[0].exponent, 3);
}

TEST(Xi, ArchimedeanLevelFour) {
  EXPECT_EQ(names(xi_classes(Z, 4)), (std::vector<std::string>{"0", "[1/4]", "[1/2]", "[3/4]"}));
  EXPECT_EQ(xi_classes(Z, 1).size(), 1u);
}

TEST(Xi, FunctionFieldLevelT) {
  FunctionField F(3);
  auto xs = xi_classes(F, F.parse("T"));
  ASSERT_EQ(xs.size(), 3u);
  EXPECT_EQ(format_xi(F, xs[1]), "[1/T]");
  EXPECT_EQ(format_xi(F, xs[2]), "[2/T]");
}

TEST(YMap, Examples) {
  EXPECT_EQ(format_xi(Z, y_map(Z, 2, xi_reduce(Z, 1, 2))), "0");
  EXPECT_EQ(format_xi(Z, y_map(Z, 2, xi_reduce(Z, 1, 4))), "[1/2]");
  FunctionField F(3);
  auto T = F.parse("T");
  EXPECT_EQ(format_xi(F, y_map(F, T, xi_reduce(F, F.one(), T))), "0");
}

TEST(YFiber, Examples) {
  EXPECT_EQ(names(y_fiber(Z, 2, xi_reduce(Z, 1, 2), 4)), (std::vector<std::string>{"[1/4]", "[3/4]"}));
  EXPECT_EQ(names(y_fiber(Z, 3, xi_reduce(Z, 0, 1), 3)), (std::vector<std::string>{"0", "[1/3]", "[2/3]"}));
  FunctionField F(3);
  auto T = F.parse("T");
  EXPECT_EQ(y_fiber(F, T, xi_reduce(F, F.zero(), F.one()), T).size(), 3u);
  try {
    y_fiber(Z, 2, xi_reduce(Z, 1, 4), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LevelMismatch);
  }
}

TEST(Gf, Orders) {
  EXPECT_EQ(gf_group(Z, 12).size(), 4u);
  EXPECT_EQ(gf_group(Z, 1).size(), 1u);
  FunctionField F(3);
  EXPECT_EQ(gf_group(F, F.parse("T")).size(), 2u);
  EXPECT_EQ(gf_group(F, F.parse("T^2+1")).size(), 8u);
  EXPECT_EQ(gf_group(F, F.parse("T^2")).size(), 6u);
}

TEST(Gf, ActionAndOrbits) {
  EXPECT_EQ(format_xi(Z, g_action(Z, GfElement<Archimedean>{12, 5}, xi_reduce(Z, 1, 12))), "[5/12]");
  std::set<std::string> orbit;
  for (const auto& s : gf_group(Z, 4)) orbit.insert(format_xi(Z, g_action(Z, s, xi_reduce(Z, 1, 4))));
  EXPECT_EQ(orbit, (std::set<std::string>{"[1/4]", "[3/4]"}));
  FunctionField F(3);
  auto T = F.parse("T");
  EXPECT_EQ(format_xi(F, g_action(F, GfElement<FunctionField>{T, F.ring().parse("2")}, xi_reduce(F, F.one(), T))), "[2/T]");
  try {
    g_action(Z, GfElement<Archimedean>{3, 2}, xi_reduce(Z, 1, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LevelMismatch);
  }
}

TEST(SignGroup, Examples) {
  EXPECT_EQ(format_xi(Z, sign_action(Z, xi_reduce(Z, 1, 3))), "[2/3]");
  EXPECT_EQ(sign_group(Z, std::int64_t{3}).order, 2);
  FunctionField F3(3);
  EXPECT_EQ(format_xi(F3, sign_action(F3, xi_reduce(F3, F3.one(), F3.parse("T")))), "[2/T]");
  EXPECT_EQ(sign_group(F3, F3.parse("T")).order, 2);
  FunctionField F2(2);
  EXPECT_EQ(sign_group(F2, F2.parse("T")).order, 1);
  FunctionField F5(5);
  EXPECT_EQ(sign_group(F5, F5.parse("T")).order, 4);
  // zeta = 2 in F_5, so gamma0 multiplies numerators by 2^{-1} = 3
  EXPECT_EQ(format_xi(F5, sign_action(F5, xi_reduce(F5, F5.one(), F5.parse("T")))), "[3/T]");
}

TEST(Crt, CombinesResidues) {
  EXPECT_EQ(crt(Z, std::int64_t{2}, std::int64_t{3}, std::int64_t{3}, std::int64_t{5}), 8);
  FunctionField F(3);
  auto x = crt(F, F.one(), F.parse("T"), F.ring().parse("2"), F.parse("T+1"));
  EXPECT_EQ(F.format(F.mod(x, F.parse("T"))), "1");
  EXPECT_EQ(F.format(F.mod(x, F.parse("T+1"))), "2");
}

TEST(XiLevel, PreimagesAndOrders) {
  XiLevel<Archimedean> L(Z, 12);
  EXPECT_EQ(L.order(0), 1);
  EXPECT_EQ(L.order(4), 3);
  EXPECT_EQ(L.preimages(2, 4), (std::vector<std::size_t>{2, 8}));
  EXPECT_TRUE(L.preimages(2, 3).empty());
  EXPECT_EQ(L.level_codes(3), (std::vector<std::size_t>{0, 4, 8}));
}
