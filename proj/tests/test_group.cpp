#include "meandim/group.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace meandim;

TEST(NormalForm, FreeReduction) {
  auto f2 = GroupSpec::free(2);
  EXPECT_EQ(f2.normal_form({{0, 1}, {0, -1}, {1, 1}}), f2.generator(1));
  EXPECT_EQ(f2.format(f2.parse_element("a.A.b")), "b");
  EXPECT_EQ(f2.format(f2.parse_element("a^-1 b a a^-1")), "Ab");
}

TEST(NormalForm, LatticeIsAbelian) {
  auto z2 = GroupSpec::lattice(2);
  auto g = z2.parse_element("x y x^-1");
  EXPECT_EQ(z2.lattice_coordinates(g), (std::vector<std::int64_t>{0, 1}));
}

TEST(NormalForm, FiniteCyclicReducesModOrder) {
  auto z5 = GroupSpec::cyclic(5);
  EXPECT_EQ(z5.normal_form({{0, 7}}), z5.normal_form({{0, 2}}));
  EXPECT_EQ(z5.format(z5.parse_element("g1^7")), "g1^2");
  EXPECT_EQ(z5.normal_form({{0, -1}}), z5.normal_form({{0, 4}}));
}

TEST(NormalForm, UnknownGeneratorRejected) {
  auto f2 = GroupSpec::free(2);
  EXPECT_THROW(f2.parse_element("abz"), Error);
  EXPECT_THROW(f2.normal_form({{5, 1}}), Error);
}

TEST(NormalForm, IntegersAcceptNumerals) {
  auto z = GroupSpec::parse("Z");
  EXPECT_EQ(z.to_integer(z.parse_element("-3")), -3);
  EXPECT_EQ(z.format(z.from_integer(12)), "12");
}

TEST(GroupSpecParse, Kinds) {
  EXPECT_EQ(GroupSpec::parse("F2").descriptor(), "free:2");
  EXPECT_EQ(GroupSpec::parse("Z^2").descriptor(), "lattice:2");
  EXPECT_EQ(GroupSpec::parse("lattice:1 x cyclic:3").descriptor(), "lattice:1 x cyclic:3");
  EXPECT_THROW(GroupSpec::parse("heisenberg:3"), Error);
  EXPECT_THROW(GroupSpec::parse("free:0"), Error);
}

TEST(GroupSpecParse, ProductArithmetic) {
  auto g = GroupSpec::parse("free:1 x cyclic:3");
  auto x = g.parse_element("a g1 a g1");
  EXPECT_EQ(g.format(x), "aag1^-1");  // shortlex word of g1^2 in Z/3
  EXPECT_TRUE(g.is_identity(g.multiply(x, g.inverse(x))));
}

TEST(Ball, FreeGroupSizes) {
  auto f2 = GroupSpec::free(2);
  EXPECT_EQ(ball(f2, 0).size(), 1u);
  EXPECT_EQ(ball(f2, 1).size(), 5u);
  EXPECT_EQ(ball(f2, 2).size(), oracle::reduced_words(2, 2).size());
  EXPECT_EQ(ball(f2, 2).size(), 17u);
  auto b1 = ball(f2, 1).words();
  EXPECT_EQ(b1, (std::vector<std::string>{"e", "a", "A", "b", "B"}));
}

TEST(Ball, FreeGroupClosedForm) {
  for (int k : {2, 3}) {
    auto fk = GroupSpec::free(k);
    for (int r = 0; r <= 6; ++r) {
      std::int64_t q = 2 * k - 1;
      std::int64_t pow = 1;
      for (int i = 0; i < r; ++i) pow *= q;
      std::int64_t closed = 1 + 2 * k * (pow - 1) / (2 * k - 2);
      std::size_t bfs = ball(fk, r).size();
      EXPECT_EQ(static_cast<std::int64_t>(bfs), closed) << "k=" << k << " r=" << r;
      if (r <= 4) EXPECT_EQ(bfs, oracle::reduced_words(k, r).size());
    }
  }
}

TEST(Ball, LatticeSizes) {
  auto z2 = GroupSpec::lattice(2);
  EXPECT_EQ(ball(z2, 2).size(), 13u);
  for (int d = 1; d <= 3; ++d)
    for (int r = 0; r <= 4; ++r)
      EXPECT_EQ(static_cast<std::int64_t>(ball(GroupSpec::lattice(d), r).size()),
                oracle::lattice_ball_size(d, r));
}

TEST(Ball, FiniteSaturates) {
  auto z5 = GroupSpec::cyclic(5);
  EXPECT_EQ(ball(z5, 10).size(), 5u);
}

TEST(ProductWindow, IdentityAndBallAlgebra) {
  auto f2 = GroupSpec::free(2);
  FiniteWindow e(f2, {f2.identity()});
  auto b3 = ball(f2, 3);
  auto kf = product_window(e, b3);
  EXPECT_EQ(kf.elements(), b3.elements());
  auto b1b2 = product_window(ball(f2, 1), ball(f2, 2));
  auto b3set = std::set<GroupElement>(b3.begin(), b3.end());
  EXPECT_EQ(std::set<GroupElement>(b1b2.begin(), b1b2.end()), b3set);
}

TEST(ProductWindow, MismatchedOwners) {
  auto f2 = GroupSpec::free(2);
  auto z2 = GroupSpec::lattice(2);
  EXPECT_THROW(product_window(ball(f2, 1), ball(z2, 1)), Error);
  EXPECT_THROW(folner_defect(ball(f2, 1), ball(z2, 1)), Error);
}

TEST(FolnerDefect, Values) {
  auto z2 = GroupSpec::lattice(2);
  FiniteWindow e(z2, {z2.identity()});
  EXPECT_EQ(folner_defect(e, box(z2, 10)), 0);
  EXPECT_EQ(folner_defect(ball(z2, 1), box(z2, 10)), Rational(40, 100));
  for (int n = 1; n <= 12; ++n) {
    auto kf = product_window(ball(z2, 1), box(z2, n));
    EXPECT_EQ(kf.size() - static_cast<std::size_t>(n * n), static_cast<std::size_t>(4 * n));
  }
  auto f2 = GroupSpec::free(2);
  auto b3 = ball(f2, 3);
  auto b4 = ball(f2, 4);
  EXPECT_EQ(folner_defect(ball(f2, 1), b3),
            Rational(static_cast<long long>(b4.size() - b3.size()), static_cast<long long>(b3.size())));
}

TEST(FolnerDefect, AmenabilityWitnesses) {
  auto z2 = GroupSpec::lattice(2);
  Rational prev = 10;
  for (int n : {2, 4, 8, 16, 32}) {
    Rational d = folner_defect(ball(z2, 1), box(z2, n));
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, Rational(1, 7));
  auto f2 = GroupSpec::free(2);
  for (int r = 0; r <= 8; ++r) EXPECT_GE(folner_defect(ball(f2, 1), ball(f2, r)), 1);
}

TEST(Enumeration, Conventions) {
  auto f2 = GroupSpec::free(2);
  auto first = Enumeration::first(f2, 5);
  EXPECT_TRUE(f2.is_identity(first[0]));
  EXPECT_EQ(first, ball(f2, 1).elements());
  auto z = GroupSpec::lattice(1);
  auto zs = Enumeration::first(z, 5);
  std::vector<std::int64_t> ints;
  for (const auto& g : zs) ints.push_back(z.to_integer(g));
  EXPECT_EQ(ints, (std::vector<std::int64_t>{0, 1, -1, 2, -2}));
  // Stable and injective.
  auto again = Enumeration::first(f2, 200);
  EXPECT_EQ(again, Enumeration::first(f2, 200));
  EXPECT_EQ(std::set<GroupElement>(again.begin(), again.end()).size(), 200u);
  // Prefixes are balls.
  EXPECT_EQ(Enumeration::first(f2, 53), ball(f2, 3).elements());
  // Finite groups are exhausted.
  EXPECT_EQ(Enumeration::first(GroupSpec::cyclic(7), 100).size(), 7u);
}

TEST(GroupProperties, AssociativityAndInverses) {
  std::mt19937_64 rng(2024);
  for (auto spec : {GroupSpec::free(2), GroupSpec::lattice(3), GroupSpec::cyclic(6),
                    GroupSpec::parse("free:2 x cyclic:4")}) {
    auto pool = ball(spec, 3).elements();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 1000; ++i) {
      const auto& g = pool[pick(rng)];
      const auto& h = pool[pick(rng)];
      const auto& k = pool[pick(rng)];
      EXPECT_EQ(spec.multiply(spec.multiply(g, h), k), spec.multiply(g, spec.multiply(h, k)));
      EXPECT_EQ(spec.inverse(spec.inverse(g)), g);
      EXPECT_EQ(spec.multiply(g, spec.identity()), g);
      EXPECT_EQ(spec.normal_form(spec.word_of(g)), g);
      EXPECT_EQ(spec.parse_element(spec.format(g)), g);
    }
  }
}

TEST(GroupProperties, ProductWindowAssociative) {
  std::mt19937_64 rng(7);
  for (auto spec : {GroupSpec::free(2), GroupSpec::lattice(2)}) {
    auto pool = ball(spec, 2).elements();
    for (int trial = 0; trial < 20; ++trial) {
      auto sample = [&](std::size_t n) {
        std::vector<GroupElement> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back(pool[rng() % pool.size()]);
        return FiniteWindow(spec, v);
      };
      auto k = sample(3), f = sample(4), g = sample(3);
      auto left = product_window(k, product_window(f, g));
      auto right = product_window(product_window(k, f), g);
      EXPECT_EQ(std::set<GroupElement>(left.begin(), left.end()),
                std::set<GroupElement>(right.begin(), right.end()));
    }
  }
}

TEST(Windows, ParseSpecsAndFamilies) {
  auto z = GroupSpec::lattice(1);
  auto w = parse_window(z, "interval:0..9");
  EXPECT_EQ(w.size(), 10u);
  EXPECT_EQ(parse_window(z, "list:0,1,1,5").size(), 3u);
  auto fam = parse_family(z, "intervals:1..10");
  EXPECT_EQ(fam.size(), 10u);
  EXPECT_EQ(fam.windows().back().size(), 10u);
  auto z2 = GroupSpec::lattice(2);
  EXPECT_EQ(parse_family(z2, "boxes:1..3").windows()[2].size(), 9u);
  EXPECT_THROW(parse_window(z, "blob:3"), Error);
  EXPECT_THROW(FiniteWindow(z, {}), Error);
}
