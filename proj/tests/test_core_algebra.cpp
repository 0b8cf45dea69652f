#include <random>

#include <gtest/gtest.h>

#include "rigid/core_algebra.hpp"

using namespace rigid;

namespace {

Mat2 random_mat(std::mt19937_64& rng, double r = 10.0) {
  std::uniform_real_distribution<double> u(-r, r);
  return Mat2{u(rng), u(rng), u(rng), u(rng)};
}

double max_abs(const Mat2& m) {
  double s = 0.0;
  for (double v : m.data()) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

TEST(Det, HandValues) {
  EXPECT_EQ(det(Mat2::identity()), 1.0);
  EXPECT_EQ(det(Mat2{1, 1, 0, 1}), 1.0);
  EXPECT_EQ(det(rotation_j()), 1.0);
  EXPECT_EQ(det(Mat<3>{2, 0, 0, 0, 3, 0, 0, 0, 4}), 24.0);
  EXPECT_EQ(det(Mat<4>::identity()), 1.0);
}

TEST(Det, Multiplicative) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const Mat2 M = random_mat(rng), N = random_mat(rng);
    EXPECT_NEAR(det(M * N), det(M) * det(N), 1e-9 * std::max(1.0, std::abs(det(M) * det(N))));
  }
}

TEST(Det, Mat3Multiplicative) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 200; ++k) {
    Mat<3> M, N;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        M(i, j) = u(rng);
        N(i, j) = u(rng);
      }
    EXPECT_NEAR(det(M * N), det(M) * det(N), 1e-10);
  }
}

TEST(Cofactor, Identity) {
  EXPECT_EQ(cof_t(Mat2::identity()), Mat2::identity());
  EXPECT_EQ(cof_t(Mat<3>::identity()), Mat<3>::identity());
}

TEST(Cofactor, TwoByTwoEntries) {
  const Mat2 X{1, 2, 3, 4};
  EXPECT_EQ(cof_t(X), (Mat2{4, -3, -2, 1}));
  EXPECT_EQ(adjugate(X), (Mat2{4, -2, -3, 1}));
}

TEST(Cofactor, AdjugateIdentityRandom) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const Mat2 M = random_mat(rng);
    EXPECT_LE(max_abs(M * adjugate(M) - det(M) * Mat2::identity()), 1e-10);
    EXPECT_LE(max_abs(adjugate(M) * M - det(M) * Mat2::identity()), 1e-10);
  }
}

TEST(Cofactor, RotationIntertwinesRandom) {
  std::mt19937_64 rng(12);
  const Mat2 J = rotation_j();
  for (int k = 0; k < 1000; ++k) {
    const Mat2 X = random_mat(rng);
    EXPECT_LE(max_abs(cof_t(X) * J - J * X), 1e-12);
  }
}

TEST(Cofactor, Mat4Adjugate) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  Mat<4> M;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) M(i, j) = u(rng);
  const Mat<4> P = M * adjugate(M);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(P(i, j), i == j ? det(M) : 0.0, 1e-12);
}

TEST(Mat, RejectsBadInput) {
  EXPECT_THROW((Mat2{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW((Mat2{1, 2, 3, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
  EXPECT_THROW((Mat2{1, std::numeric_limits<double>::infinity(), 0, 0}), std::invalid_argument);
}

TEST(Stacked, RowsAndFlatRoundTrip) {
  const Stacked62 A{Mat2{1, 2, 3, 4}, Mat2{5, 6, 7, 8}, Mat2{9, 10, 11, 12}};
  EXPECT_EQ(A.row(1), (Vec2{1, 2}));
  EXPECT_EQ(A.row(4), (Vec2{7, 8}));
  EXPECT_EQ(A.row(6), (Vec2{11, 12}));
  EXPECT_THROW(A.row(0), std::out_of_range);
  EXPECT_THROW(A.row(7), std::out_of_range);
  EXPECT_EQ(Stacked62::from_flat(A.flat()), A);
}

TEST(MinorIndex, Validation) {
  EXPECT_THROW(MinorIndex(2, 2), std::invalid_argument);
  EXPECT_THROW(MinorIndex(3, 1), std::invalid_argument);
  EXPECT_THROW(MinorIndex(0, 2), std::invalid_argument);
  EXPECT_THROW(MinorIndex(1, 7), std::invalid_argument);
  const auto all = MinorIndex::all();
  ASSERT_EQ(all.size(), 15u);
  for (std::size_t k = 0; k < all.size(); ++k) EXPECT_EQ(all[k].ordinal(), k);
  EXPECT_EQ(all.front().i(), 1);
  EXPECT_EQ(all.front().j(), 2);
  EXPECT_EQ(all.back().i(), 5);
  EXPECT_EQ(all.back().j(), 6);
}

TEST(MinorDet, LiftedIdentityUnderQuadratic) {
  // (Id; 2 Id; J): the lift of Id when g(t) = t^2
  const Stacked62 A{Mat2::identity(), 2.0 * Mat2::identity(), rotation_j()};
  EXPECT_EQ(minor_det(A, MinorIndex(1, 2)), 1.0);
  EXPECT_EQ(minor_det(A, MinorIndex(1, 3)), 0.0);
  EXPECT_EQ(minor_det(A, MinorIndex(3, 4)), 4.0);
  EXPECT_EQ(minor_det(A, MinorIndex(5, 6)), 1.0);
}

TEST(RankOneGap, Oracles) {
  EXPECT_EQ(rank_one_gap(Mat2::identity(), Mat2::identity()).rank, 0);
  EXPECT_EQ(rank_one_gap(Mat2::identity(), 2.0 * Mat2::identity()).rank, 2);
  EXPECT_EQ(rank_one_gap(Mat2::identity(), Mat2::diag({2.0, 0.5})).rank, 2);

  const RankGap g = rank_one_gap(Mat2::identity(), Mat2{1, 1, 0, 1});
  ASSERT_EQ(g.rank, 1);
  ASSERT_TRUE(g.factors);
  EXPECT_NEAR(g.factors->a[0], 1.0, 1e-15);
  EXPECT_NEAR(g.factors->a[1], 0.0, 1e-15);
  EXPECT_NEAR(g.factors->n[0], 0.0, 1e-15);
  EXPECT_NEAR(g.factors->n[1], 1.0, 1e-15);
}

TEST(RankOneGap, FactorsReproduceDifference) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 1000; ++k) {
    const Mat2 A = random_mat(rng);
    const Mat2 B = A + outer(Vec2{u(rng), u(rng)}, Vec2{u(rng), u(rng)});
    const RankGap g = rank_one_gap(A, B);
    if (g.rank != 1) continue;
    EXPECT_NEAR(norm(g.factors->n), 1.0, 1e-14);
    EXPECT_LE(max_abs((B - A) - outer(g.factors->a, g.factors->n)), 1e-10);
  }
}

TEST(RankOneGap, ThresholdIsScaleAware) {
  const Mat2 A = Mat2::identity();
  EXPECT_EQ(rank_one_gap(A, A + Mat2::diag({1e-12, 0.0})).rank, 0);
  EXPECT_EQ(rank_one_gap(A, A + Mat2::diag({1.0, 1e-12})).rank, 1);
  EXPECT_EQ(rank_one_gap(A, A + Mat2::diag({1.0, 1e-6})).rank, 2);
}

TEST(SingularValues, ProductIsAbsDet) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const Mat2 M = random_mat(rng);
    const auto s = singular_values(M);
    EXPECT_GE(s[0], s[1]);
    EXPECT_NEAR(s[0] * s[1], std::abs(det(M)), 1e-9 * std::max(1.0, std::abs(det(M))));
    EXPECT_NEAR(s[0] * s[0] + s[1] * s[1], frobenius(M) * frobenius(M), 1e-9 * frobenius(M) * frobenius(M));
  }
}
