#include "meandim/sofic.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace meandim;

namespace {

const Rational kTau(1, 5);

}  // namespace

TEST(Permutation, RejectsNonBijections) {
  EXPECT_THROW(Permutation({0, 0, 1}), Error);
  EXPECT_THROW(Permutation({0, 3}), Error);
  Permutation p({1, 2, 0});
  EXPECT_EQ(p * p.inverse(), Permutation::identity(3));
}

TEST(SeededRng, StableAcrossRuns) {
  SeededRng a(99), b(99);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(a.below(17), b.below(17));
  EXPECT_EQ(SeededRng(5).permutation(30), SeededRng(5).permutation(30));
}

TEST(Cyclic, ExactHomomorphism) {
  auto z = GroupSpec::parse("Z");
  auto sigma = from_cyclic(z, 5);
  EXPECT_EQ(sigma.permutation(z.from_integer(3)) * sigma.permutation(z.from_integer(2)),
            sigma.permutation(z.from_integer(5)));
  EXPECT_EQ(sigma.permutation(z.from_integer(5)), Permutation::identity(5));
  EXPECT_EQ(sigma.apply(z.from_integer(-1), 0), 4u);
  EXPECT_THROW(from_cyclic(GroupSpec::free(2), 5), Error);
}

TEST(Cyclic, GoodnessOnBalls) {
  auto z = GroupSpec::parse("Z");
  auto rep = goodness(from_cyclic(z, 100), ball(z, 2), kTau);
  EXPECT_EQ(rep.multiplicativity, 1);
  EXPECT_EQ(rep.separation, 1);
  EXPECT_EQ(rep.good_set.size(), 100u);
  EXPECT_TRUE(rep.meets_threshold);
  for (std::size_t d = 5; d <= 12; ++d)
    EXPECT_EQ(goodness(from_cyclic(z, d), ball(z, 2), Rational(1, 2)).separation, 1) << d;
  // d = 4: 2 and -2 coincide.
  EXPECT_EQ(goodness(from_cyclic(z, 4), ball(z, 2), Rational(1, 2)).separation, 0);
}

TEST(Goodness, IdentityWindow) {
  auto f2 = GroupSpec::free(2);
  auto rep = goodness(from_random(f2, 50, 3), FiniteWindow(f2, {f2.identity()}), kTau);
  EXPECT_EQ(rep.separation, 1);
  EXPECT_EQ(rep.multiplicativity, 1);
  EXPECT_EQ(rep.good_set.size(), 50u);
}

TEST(Goodness, RejectsBadTau) {
  auto z = GroupSpec::parse("Z");
  EXPECT_THROW(goodness(from_cyclic(z, 10), ball(z, 1), 0), PreconditionError);
  EXPECT_THROW(goodness(from_cyclic(z, 10), ball(z, 1), 1), PreconditionError);
  EXPECT_THROW(goodness(from_cyclic(z, 10), ball(GroupSpec::free(1), 1), kTau), Error);
}

TEST(Homomorphism, IdentityImages) {
  auto f2 = GroupSpec::free(2);
  auto sigma = from_homomorphism(f2, {Permutation::identity(6), Permutation::identity(6)});
  for (const auto& g : ball(f2, 3)) EXPECT_EQ(sigma.permutation(g), Permutation::identity(6));
  EXPECT_THROW(from_homomorphism(f2, {Permutation::identity(6), Permutation::identity(5)}), Error);
}

TEST(Homomorphism, RandomImagesAreMultiplicative) {
  auto f2 = GroupSpec::free(2);
  SeededRng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto sigma = from_homomorphism(f2, {rng.permutation(6), rng.permutation(6)});
    EXPECT_EQ(goodness(sigma, ball(f2, 2), kTau).multiplicativity, 1);
  }
}

TEST(Homomorphism, DerangementsSeparateB1) {
  auto f2 = GroupSpec::free(2);
  // a: v -> v+1, b: v -> v+3 on Z/7. On B_1 the images are shifts by 0, 1, -1, 3, -3.
  std::vector<std::uint32_t> a(7), b(7);
  for (std::uint32_t v = 0; v < 7; ++v) {
    a[v] = (v + 1) % 7;
    b[v] = (v + 3) % 7;
  }
  auto sigma = from_homomorphism(f2, {Permutation(a), Permutation(b)});
  EXPECT_EQ(goodness(sigma, ball(f2, 1), kTau).separation, 1);
}

TEST(Homomorphism, ForcedCollision) {
  auto f2 = GroupSpec::free(2);
  Permutation p({1, 2, 3, 4, 0});
  auto sigma = from_homomorphism(f2, {p, p});
  FiniteWindow ab(f2, {f2.generator(0), f2.generator(1)});
  auto rep = goodness(sigma, ab, kTau);
  EXPECT_EQ(rep.separation, 0);
  EXPECT_TRUE(rep.good_set.empty());
  EXPECT_FALSE(rep.meets_threshold);
}

TEST(Random, SameSeedSameMap) {
  auto f2 = GroupSpec::free(2);
  auto a = from_random(f2, 200, 42), b = from_random(f2, 200, 42);
  EXPECT_EQ(a.generator_image(0), b.generator_image(0));
  EXPECT_EQ(a.generator_image(1), b.generator_image(1));
  EXPECT_EQ(a.seed(), std::optional<std::uint64_t>(42));
  EXPECT_NE(from_random(f2, 200, 43).generator_image(0), a.generator_image(0));
}

TEST(Random, LatticeBreaksCommutation) {
  auto z2 = GroupSpec::lattice(2);
  auto rep = goodness(from_random(z2, 200, 1), ball(z2, 1), kTau);
  EXPECT_LT(rep.multiplicativity, 1);
}

TEST(Torus, ExactOnLattice) {
  auto z2 = GroupSpec::lattice(2);
  auto rep = goodness(from_torus(z2, 9), ball(z2, 2), kTau);
  EXPECT_EQ(rep.degree, 81u);
  EXPECT_EQ(rep.multiplicativity, 1);
  EXPECT_EQ(rep.separation, 1);
  EXPECT_EQ(rep.good_set.size(), 81u);
}

TEST(RegularAction, OrderAndExactness) {
  auto f2 = GroupSpec::free(2);
  // (1 2) and (1 2 3 4 5 6) generate S_6.
  auto sigma = from_regular_action(f2, {Permutation({1, 0, 2, 3, 4, 5}), Permutation({1, 2, 3, 4, 5, 0})}, 1000);
  EXPECT_EQ(sigma.degree(), 720u);
  auto rep = goodness(sigma, ball(f2, 1), kTau);
  EXPECT_EQ(rep.multiplicativity, 1);
  EXPECT_THROW(from_regular_action(f2, {Permutation({1, 0, 2, 3, 4, 5}), Permutation({1, 2, 3, 4, 5, 0})}, 700),
               Error);
}

TEST(RegularAction, RandomQuotientSeparatesWindow) {
  auto f2 = GroupSpec::free(2);
  auto b2 = ball(f2, 2);
  for (std::uint64_t seed : {1, 2, 3}) {
    auto sigma = random_finite_quotient(f2, seed, 500, 2000, b2);
    EXPECT_GE(sigma.degree(), 500u);
    EXPECT_LE(sigma.degree(), 2000u);
    auto rep = goodness(sigma, b2, kTau);
    EXPECT_EQ(rep.separation, 1);
    EXPECT_EQ(rep.multiplicativity, 1);
    EXPECT_EQ(rep.good_set.size(), sigma.degree());
  }
  EXPECT_EQ(random_finite_quotient(f2, 7, 720, 720, b2).degree(), 720u);
}

TEST(GoodnessProperties, PerPointRecheckAndMonotone) {
  auto f2 = GroupSpec::free(2);
  for (std::uint64_t seed : {5, 6}) {
    auto sigma = from_random(f2, 60, seed);
    for (int r = 0; r <= 2; ++r) {
      auto rep = goodness(sigma, ball(f2, r), kTau);
      std::set<std::uint32_t> good(rep.good_set.begin(), rep.good_set.end());
      SeededRng rng(seed * 31 + r);
      for (int k = 0; k < 100; ++k) {
        auto v = static_cast<std::uint32_t>(rng.below(60));
        EXPECT_EQ(good.contains(v), is_good_point(sigma, ball(f2, r), v));
      }
      if (r > 0) {
        auto smaller = goodness(sigma, ball(f2, r - 1), kTau);
        std::set<std::uint32_t> prev(smaller.good_set.begin(), smaller.good_set.end());
        for (auto v : good) EXPECT_TRUE(prev.contains(v));
      }
    }
  }
}
