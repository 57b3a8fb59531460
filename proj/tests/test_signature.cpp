#include <gtest/gtest.h>

#include <cmath>

#include "responsekit/error.hpp"
#include "responsekit/paths.hpp"
#include "responsekit/random.hpp"
#include "responsekit/signature.hpp"

using namespace responsekit;

namespace {

const Path kTwoSegment = Path::make({0, 1, 2}, {{0, 0}, {1, 0}, {1, 1}});

void expect_unit(const TruncatedSignature& s, double tol) {
  const auto flat = s.flat();
  EXPECT_NEAR(flat[0], 1.0, tol);
  for (std::size_t i = 1; i < flat.size(); ++i) EXPECT_NEAR(flat[i], 0.0, tol) << "entry " << i;
}

void expect_same(const TruncatedSignature& a, const TruncatedSignature& b, double tol) {
  ASSERT_EQ(a.flat().size(), b.flat().size());
  for (std::size_t i = 0; i < a.flat().size(); ++i)
    EXPECT_NEAR(a.flat()[i], b.flat()[i], tol) << "entry " << i;
}

}  // namespace

TEST(Signature, ConstantPathIsUnit) {
  for (int level : {0, 1, 3, 6}) expect_unit(signature(Path::make({0, 1}, {{2, 3}, {2, 3}}), level), 0.0);
}

TEST(Signature, ScalarLevelsArePowersOverFactorial) {
  const TruncatedSignature s = signature(Path::make({0, 0.3, 1}, {{1}, {2.5}, {3}}), 3);
  EXPECT_DOUBLE_EQ(s.level_data(0)[0], 1.0);
  EXPECT_DOUBLE_EQ(s.level_data(1)[0], 2.0);
  EXPECT_DOUBLE_EQ(s.level_data(2)[0], 2.0);
  EXPECT_NEAR(s.level_data(3)[0], 4.0 / 3.0, 1e-15);
}

TEST(Signature, TwoSegmentArea) {
  const TruncatedSignature s = signature(kTwoSegment, 2);
  EXPECT_DOUBLE_EQ(s.coeff(Word{{1, 2}}), 1.0);
  EXPECT_DOUBLE_EQ(s.coeff(Word{{2, 1}}), 0.0);
  EXPECT_DOUBLE_EQ(0.5 * (s.coeff(Word{{1, 2}}) - s.coeff(Word{{2, 1}})), 0.5);
  EXPECT_DOUBLE_EQ(s.coeff(Word{}), 1.0);
  EXPECT_DOUBLE_EQ(s.coeff(Word{{1}}), 1.0);
  EXPECT_DOUBLE_EQ(s.coeff(Word{{2}}), 1.0);
}

TEST(Signature, LevelCapAndWordLength) {
  EXPECT_THROW(signature(kTwoSegment, 13), Error);
  EXPECT_THROW(signature(kTwoSegment, 2).coeff(Word{{1, 1, 1}}), Error);
  EXPECT_THROW(signature(kTwoSegment, 2).coeff(Word{{3}}), Error);
}

TEST(SigOracle, BasicCases) {
  EXPECT_EQ(sig_oracle(kTwoSegment, Word{}, 3), 1.0);
  EXPECT_NEAR(sig_oracle(kTwoSegment, Word{{1}}, 2), 1.0, 1e-15);
  EXPECT_NEAR(sig_oracle(kTwoSegment, Word{{1, 2}}, 512), 1.0, 1e-6);
}

TEST(SigOracle, AgreesWithChenProducts) {
  Stream rng(21, 0);
  for (int trial = 0; trial < 3; ++trial) {
    const Path p = random_walk_path(rng, 2, 3, 1.0);
    const TruncatedSignature s = signature(p, 4);
    for (int n = 1; n <= 4; ++n)
      for (const Word& w : words_of_length(2, n)) {
        const OracleResult o = sig_oracle_converged(p, w);
        ASSERT_TRUE(o.converged);
        EXPECT_LT(std::abs(o.value - s.coeff(w)), 1e-6 * std::max(1.0, std::abs(o.value)));
      }
  }
}

TEST(TensorAlgebra, ExpAndUnit) {
  expect_unit(tensor_exp(std::vector<double>{0.0, 0.0}, 4), 0.0);
  const TruncatedSignature e = tensor_exp(std::vector<double>{1.0, 1.0}, 2);
  for (double v : e.level_data(2)) EXPECT_DOUBLE_EQ(v, 0.5);
  const TruncatedSignature a = tensor_exp(std::vector<double>{-1.5}, 5);
  double fact = 1.0;
  for (int n = 0; n <= 5; ++n) {
    if (n > 0) fact *= n;
    EXPECT_NEAR(a.level_data(n)[0], std::pow(-1.5, n) / fact, 1e-15);
  }
}

TEST(TensorAlgebra, UnitIsIdentity) {
  const TruncatedSignature s = signature(kTwoSegment, 4);
  expect_same(tensor_mul(s, TruncatedSignature::unit(2, 4), 4), s, 0.0);
  expect_same(tensor_mul(TruncatedSignature::unit(2, 4), s, 4), s, 0.0);
  EXPECT_THROW(tensor_mul(s, TruncatedSignature::unit(3, 4), 4), Error);
}

TEST(TensorAlgebra, ChenIdentity) {
  Stream rng(22, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const Path x = random_walk_path(rng, d, 1 + trial % 5, 1.0);
    const Path y = random_walk_path(rng, d, 1 + (trial / 5) % 5, 1.0);
    for (int M = 1; M <= 5; ++M)
      expect_same(signature(concat(x, y), M), tensor_mul(signature(x, M), signature(y, M), M), 1e-10);
  }
}

TEST(TensorAlgebra, InverseAndReverse) {
  Stream rng(23, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Path x = random_walk_path(rng, 3, 4, 1.0);
    const TruncatedSignature s = signature(x, 5);
    expect_unit(tensor_mul(s, tensor_inverse(s), 5), 1e-10);
    expect_unit(tensor_mul(s, signature(reverse(x), 5), 5), 1e-10);
  }
  const std::vector<double> v{0.3, -0.7};
  const std::vector<double> minus{-0.3, 0.7};
  expect_same(tensor_inverse(tensor_exp(v, 6)), tensor_exp(minus, 6), 1e-14);
}

TEST(Signature, ShuffleAtLowestOrder) {
  Stream rng(24, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const TruncatedSignature s = signature(random_walk_path(rng, 3, 6, 1.0), 2);
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j)
        EXPECT_NEAR(s.coeff(Word{{i}}) * s.coeff(Word{{j}}),
                    s.coeff(Word{{i, j}}) + s.coeff(Word{{j, i}}), 1e-10);
  }
}

TEST(Signature, LevelOneIsTotalIncrement) {
  Stream rng(25, 0);
  const Path p = random_walk_path(rng, 4, 8, 1.0);
  const auto inc = p.total_increment();
  const TruncatedSignature s = signature(p, 3);
  for (int i = 1; i <= 4; ++i) EXPECT_NEAR(s.coeff(Word{{i}}), inc[i - 1], 1e-13);
}

TEST(Signature, SizeGuard) {
  EXPECT_EQ(signature_size(2, 3), 15u);
  EXPECT_THROW(signature_size(64, 5), Error);
}
