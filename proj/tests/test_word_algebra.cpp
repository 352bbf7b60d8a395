#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rgds/errors.hpp"
#include "rgds/word_algebra.hpp"

namespace rgds {
namespace {

Arrangement words(std::vector<Word> ws) { return Arrangement(std::move(ws)); }

Arrangement random_arrangement(std::mt19937_64& rng, std::size_t max_words = 4) {
  std::uniform_int_distribution<std::size_t> count(0, max_words), len(0, 3);
  std::uniform_int_distribution<EdgeId> edge(0, 3);
  std::vector<Word> ws(count(rng));
  for (auto& w : ws) {
    w.resize(len(rng));
    for (auto& e : w) e = edge(rng);
  }
  return Arrangement(std::move(ws));
}

ArrMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  ArrMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = random_arrangement(rng, 2);
  return m;
}

TEST(Arrangement, AddExample) {
  const auto sum = arr_add(arr_mul(Arrangement::letter(1), Arrangement::letter(0)), Arrangement::letter(1));
  EXPECT_EQ(sum, words({{1, 0}, {1}}));
}

TEST(Arrangement, AddIdentity) {
  const auto x = words({{2, 1}, {3}});
  EXPECT_EQ(arr_add(x, Arrangement::empty_set()), x);
}

TEST(Arrangement, MultiplyExample) {
  const auto lhs = words({{1, 1, 0}, {1, 0, 1}, {}});
  EXPECT_EQ(arr_mul(lhs, Arrangement::letter(1)), words({{1, 1, 0, 1}, {1, 0, 1, 1}, {1}}));
}

TEST(Arrangement, Annihilator) {
  const auto x = words({{2, 1}, {3}});
  EXPECT_TRUE(arr_mul(x, Arrangement::empty_set()).is_empty_set());
  EXPECT_TRUE(arr_mul(Arrangement::empty_set(), x).is_empty_set());
  EXPECT_EQ(arr_mul(Arrangement::unit(), x), x);
}

TEST(Arrangement, DuplicatesAreKept) {
  const auto x = arr_add(Arrangement::letter(1), Arrangement::letter(1));
  EXPECT_EQ(x.size(), 2u);
  EXPECT_FALSE(x.distinct_words());
}

TEST(Arrangement, SizeCap) {
  std::vector<Word> many(1001, Word{0});
  const Arrangement big(many);
  EXPECT_THROW(arr_mul(big, big), Error);
}

TEST(Arrangement, TextRoundTrip) {
  const auto x = words({{1, 0}, {}, {3}});
  const auto text = to_text(x);
  EXPECT_EQ(parse_arrangement(text), x);
  EXPECT_EQ(to_text(Arrangement::empty_set()), "∅");
  EXPECT_EQ(parse_arrangement("∅"), Arrangement::empty_set());
  EXPECT_EQ(to_text(words({{3}, {1, 0}})), to_text(words({{1, 0}, {3}})));
}

TEST(SemiringLaws, RandomCases) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_arrangement(rng), b = random_arrangement(rng), c = random_arrangement(rng);
    EXPECT_EQ(arr_add(a, b), arr_add(b, a));
    EXPECT_EQ(arr_add(arr_add(a, b), c), arr_add(a, arr_add(b, c)));
    EXPECT_EQ(arr_mul(arr_mul(a, b), c), arr_mul(a, arr_mul(b, c)));
    EXPECT_EQ(arr_mul(a, arr_add(b, c)), arr_add(arr_mul(a, b), arr_mul(a, c)));
    EXPECT_EQ(arr_mul(arr_add(a, b), c), arr_add(arr_mul(a, c), arr_mul(b, c)));
    EXPECT_EQ(arr_mul(a, Arrangement::unit()), a);
    EXPECT_EQ(arr_add(a, Arrangement::empty_set()), a);
    EXPECT_TRUE(arr_mul(a, Arrangement::empty_set()).is_empty_set());
  }
}

TEST(SemiringLaws, MatrixProductIsAssociative) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2), c = random_matrix(rng, 2, 2);
    EXPECT_EQ(arr_mat_mul(arr_mat_mul(a, b), c), arr_mat_mul(a, arr_mat_mul(b, c)));
    EXPECT_EQ(arr_mat_mul(ArrMatrix::identity(2), a), a);
    EXPECT_EQ(arr_mat_mul(ArrMatrix::zero(2, 2), a), ArrMatrix::zero(2, 2));
  }
}

TEST(ArrMatrix, SquareByHand) {
  ArrMatrix m(2, 2);
  m(0, 0) = Arrangement::letter(0);  // a
  m(0, 1) = Arrangement::letter(1);  // b
  m(1, 1) = Arrangement::letter(2);  // c
  const auto sq = arr_mat_mul(m, m);
  EXPECT_EQ(sq(0, 1), words({{0, 1}, {1, 2}}));
  EXPECT_EQ(sq(0, 0), words({{0, 0}}));
  EXPECT_TRUE(sq(1, 0).is_empty_set());
  EXPECT_EQ(sq(1, 1), words({{2, 2}}));
}

TEST(ArrMatrix, ShapeMismatch) {
  EXPECT_THROW(arr_mat_mul(ArrMatrix(2, 3), ArrMatrix(2, 3)), Error);
  EXPECT_THROW(arr_mat_add(ArrMatrix(2, 3), ArrMatrix(3, 2)), Error);
}

TEST(MoranEval, Literals) {
  const std::vector<double> ratios{0.5};
  EXPECT_DOUBLE_EQ(moran_eval(Arrangement::unit(), 0.7, ratios), 1.0);
  EXPECT_DOUBLE_EQ(moran_eval(Arrangement::empty_set(), 0.7, ratios), 0.0);
}

TEST(MoranEval, CantorSimilarityDimension) {
  const std::vector<double> ratios{1.0 / 3, 1.0 / 3};
  const double s = std::log(2.0) / std::log(3.0);
  EXPECT_NEAR(moran_eval(words({{0}, {1}}), s, ratios), 1.0, 1e-9);
}

TEST(MoranEval, UnknownEdge) {
  const std::vector<double> ratios{0.5};
  EXPECT_THROW(moran_eval(Arrangement::letter(3), 1.0, ratios), Error);
}

TEST(MoranEval, IsSemiringHomomorphism) {
  std::mt19937_64 rng(5);
  const std::vector<double> ratios{0.2, 0.3, 0.45, 0.6};
  for (int i = 0; i < 200; ++i) {
    const auto a = random_arrangement(rng), b = random_arrangement(rng);
    const double s = 0.37 * (i % 5);
    const double fa = moran_eval(a, s, ratios), fb = moran_eval(b, s, ratios);
    EXPECT_NEAR(moran_eval(arr_add(a, b), s, ratios), fa + fb, 1e-12 * (1 + fa + fb));
    EXPECT_NEAR(moran_eval(arr_mul(a, b), s, ratios), fa * fb, 1e-12 * (1 + fa * fb));
  }
}

}  // namespace
}  // namespace rgds
