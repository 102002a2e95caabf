#include <gtest/gtest.h>

#include "uod/ftate.hpp"
#include "uod/signh.hpp"

using namespace uod;

namespace {

// With zero Koszul maps the total complex splits into shifted copies of the Tate column,
// whose homology is Z/m in odd degrees: count the copies landing in odd column degrees.
AbGroupInvariants binomial_oracle(std::size_t r, long m, int n) {
  std::size_t copies = 0, binom = 1;
  for (std::size_t j = 0; j <= r; ++j) {
    if (((n - static_cast<int>(j)) % 2 + 2) % 2 == 1) copies += binom;
    binom = binom * (r - j) / (j + 1);
  }
  return AbGroupInvariants::free_cyclic(m, copies);
}

}  // namespace

TEST(ClosedForm, Examples) {
  EXPECT_EQ(ftate_closed_form({1, 2}).str(), "(Z/2)");
  EXPECT_EQ(ftate_closed_form({3, 4}).str(), "(Z/4)^4");
  EXPECT_TRUE(ftate_closed_form({2, 1}).is_zero());
  try {
    ftate_closed_form({0, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankZeroUnsupported);
  }
}

TEST(ViaKt, Examples) {
  auto t = ftate_via_kt({1, 2}, Window{-6, 6});
  EXPECT_FALSE(t.empty());
  for (const auto& [n, g] : t) EXPECT_EQ(g.str(), "(Z/2)") << n;
  for (const auto& [n, g] : ftate_via_kt({4, 3})) EXPECT_EQ(g.str(), "(Z/3)^8") << n;
  for (const auto& [n, g] : ftate_via_kt({2, 1})) EXPECT_TRUE(g.is_zero()) << n;
  EXPECT_THROW(ftate_via_kt({2, 2}, Window{0, 6}), Error);
}

TEST(ViaKt, MatchesBinomialOracleAndClosedForm) {
  for (std::size_t r = 1; r <= 4; ++r)
    for (long m = 1; m <= 4; ++m) {
      auto t = ftate_via_kt({r, m});
      for (const auto& [n, g] : t) {
        EXPECT_EQ(g, binomial_oracle(r, m, n)) << r << " " << m << " " << n;
        EXPECT_EQ(g, ftate_closed_form({r, m}, n));
      }
      EXPECT_TRUE(degree_independent(t));
    }
}

TEST(Thm442, MatchesSignHomology) {
  const Archimedean Z;
  for (std::int64_t f : {3, 5, 15, 21, 105}) {
    auto lhs = thm442_lhs(Z, f);
    auto rhs = sign_homology_U(Z, f).h;
    for (const auto& [n, g] : lhs) EXPECT_EQ(g, rhs.even) << f << " " << n;
  }
  FunctionField F(3);
  auto lhs = thm442_lhs(F, F.parse("T*(T+1)"));
  for (const auto& [n, g] : lhs) EXPECT_EQ(g.str(), "(Z/2)^2");
}

TEST(Thm442, Hypotheses) {
  const Archimedean Z;
  try {
    thm442_lhs(Z, std::int64_t{3}, {{"3", 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolated);
  }
  try {
    thm442_lhs(Z, std::int64_t{12});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotSquarefree);
  }
  // nu_3 = -1: f_1 = -2 is a nonzero Koszul map; the table is computed, not predicted
  auto t = thm442_lhs(Z, std::int64_t{3}, {{"3", -1}});
  EXPECT_FALSE(t.empty());
  EXPECT_TRUE(degree_independent(t));
}
