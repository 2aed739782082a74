#include "meandim/microstates.hpp"

#include <gtest/gtest.h>

using namespace meandim;

namespace {

const GroupSpec kZ = GroupSpec::parse("Z");

FiniteWindow one_step() { return FiniteWindow(kZ, {kZ.from_integer(1)}); }

MicrostateSpaceSpec make(ShiftSystem sys, FiniteWindow f, Rational delta, SoficMap sigma,
                         PseudometricSpec rho = {}) {
  return {std::move(sys), std::move(rho), std::move(f), std::move(delta), std::move(sigma)};
}

ShiftSystem binary() { return ShiftSystem::full(kZ, AlphabetSpace::discrete(2)); }

// Only the two alternating points.
ShiftSystem alternating() {
  FiniteWindow pair = interval(kZ, 0, 1);
  return ShiftSystem::subshift(kZ, AlphabetSpace::discrete(2), {Pattern{pair, {0, 0}}, Pattern{pair, {1, 1}}});
}

std::vector<int> random_labels(SeededRng& rng, std::size_t d, int k) {
  std::vector<int> w(d);
  for (auto& x : w) x = static_cast<int>(rng.below(k));
  return w;
}

}  // namespace

TEST(Membership, IdentityWindowAlwaysMember) {
  SeededRng rng(1);
  auto spec = make(binary(), parse_window(kZ, "identity"), Rational(0), from_random(kZ, 6, 4));
  for (int t = 0; t < 20; ++t) {
    Microstate phi;
    for (int v = 0; v < 6; ++v) phi.sites.push_back(Configuration::constant(kZ, static_cast<int>(rng.below(2))));
    EXPECT_EQ(is_member(spec, phi).verdict, Verdict::yes);
  }
}

TEST(Membership, FixedPointIsMember) {
  auto f2 = GroupSpec::parse("F2");
  auto sys = ShiftSystem::full(f2, AlphabetSpace::discrete(3));
  Microstate phi{std::vector<Configuration>(7, Configuration::constant(f2, 2))};
  PseudometricSpec induced{PseudometricSpec::Base::induced, 5, std::nullopt};
  auto spec = make(sys, ball(f2, 2), Rational(0), from_random(f2, 7, 9), induced);
  EXPECT_EQ(is_member(spec, phi).verdict, Verdict::yes);
}

TEST(Membership, NonEquivariantRejectedAtZero) {
  auto sigma = from_cyclic(kZ, 4);
  Microstate phi;
  for (int v = 0; v < 4; ++v) phi.sites.push_back(Configuration::constant(kZ, v % 2 == 0 ? 0 : 1));
  phi.sites[3] = Configuration::constant(kZ, 0);
  auto spec = make(binary(), one_step(), Rational(0), sigma);
  auto r = is_member(spec, phi);
  EXPECT_EQ(r.verdict, Verdict::no);
  // Sites 2 -> 3 and 3 -> 0 agree, 0 -> 1 and 1 -> 2 do not.
  EXPECT_EQ(r.mean_square[0].lo, Rational(1, 2));
  spec.delta = 1;
  EXPECT_EQ(is_member(spec, phi).verdict, Verdict::yes);
}

TEST(Membership, DimensionMismatch) {
  auto spec = make(binary(), one_step(), Rational(1, 4), from_cyclic(kZ, 4));
  Microstate phi{std::vector<Configuration>(3, Configuration::constant(kZ, 0))};
  EXPECT_THROW(is_member(spec, phi), Error);
  spec.delta = -1;
  EXPECT_THROW(spec.validate(), PreconditionError);
}

TEST(Pullback, CyclicIsExactMember) {
  SeededRng rng(3);
  for (std::size_t d : {3u, 5u, 8u}) {
    auto sigma = from_cyclic(kZ, d);
    auto spec = make(binary(), interval(kZ, -2, 2), Rational(0), sigma);
    for (int t = 0; t < 10; ++t) {
      auto phi = pullback(spec.sys, random_labels(rng, d, 2), sigma, model_window(spec));
      EXPECT_EQ(is_member(spec, phi).verdict, Verdict::yes);
    }
  }
}

TEST(Pullback, InducedMetricWithinTruncation) {
  const std::size_t d = 6;
  auto sigma = from_cyclic(kZ, d);
  PseudometricSpec induced{PseudometricSpec::Base::induced, 6, std::nullopt};
  auto spec = make(binary(), one_step(), Rational(0), sigma, induced);
  SeededRng rng(4);
  auto phi = pullback(spec.sys, random_labels(rng, d, 2), sigma, model_window(spec));
  auto r = is_member(spec, phi);
  EXPECT_EQ(r.verdict, Verdict::undecided);
  EXPECT_EQ(r.mean_square[0].lo, 0);
  EXPECT_LE(r.mean_square[0].hi, pow2(-12));
  spec.delta = pow2(-6);
  EXPECT_EQ(is_member(spec, phi).verdict, Verdict::yes);
}

TEST(Pullback, ConstantAndDistinctLabels) {
  auto sigma = from_random(kZ, 5, 11);
  auto w = interval(kZ, -1, 1);
  auto phi = pullback(binary(), std::vector<int>(5, 1), sigma, w);
  for (const auto& site : phi.sites)
    for (const auto& g : w) EXPECT_EQ(site.at(g), 1);
  std::vector<int> a{0, 1, 1, 0, 1}, b = a;
  b[2] = 0;
  auto pa = pullback(binary(), a, sigma, w), pb = pullback(binary(), b, sigma, w);
  auto m = microstate_metrics(binary(), PseudometricSpec{}, pa.sites, pb.sites);
  EXPECT_EQ(m.rho_inf.lo, 1);
  EXPECT_THROW(pullback(alternating(), a, sigma, w), PreconditionError);
}

TEST(Membership, MonotoneInDelta) {
  SeededRng rng(21);
  auto sigma = from_random(GroupSpec::parse("Z^2"), 6, 2);
  auto g = sigma.spec();
  auto sys = ShiftSystem::full(g, AlphabetSpace::on_line({0, Rational(1, 4), Rational(1, 2), 1}));
  for (int t = 0; t < 50; ++t) {
    Microstate phi;
    for (int v = 0; v < 6; ++v) phi.sites.push_back(Configuration::constant(g, static_cast<int>(rng.below(4))));
    std::optional<Verdict> prev;
    for (Rational delta : {Rational(0), Rational(1, 9), Rational(1, 4), Rational(1, 2), Rational(1)}) {
      auto v = is_member(make(sys, ball(g, 1), delta, sigma), phi).verdict;
      if (prev == Verdict::yes) EXPECT_EQ(v, Verdict::yes);
      prev = v;
    }
  }
}

TEST(MapLowerBound, RandomizedMembers) {
  // Perturbed pullbacks over Z and Z^2 with a four-point alphabet on the line.
  SeededRng rng(500);
  int certified = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const bool plane = trial % 2;
    GroupSpec g = plane ? GroupSpec::parse("Z^2") : kZ;
    auto sys = ShiftSystem::full(g, AlphabetSpace::on_line({0, Rational(1, 4), Rational(1, 2), 1}));
    const std::size_t d = 2 + rng.below(11);
    auto sigma = plane ? from_random(g, d, trial) : from_cyclic(g, d);
    const Rational delta = std::vector<Rational>{Rational(1, 4), Rational(1, 9), Rational(1, 2), Rational(9, 10)}[rng.below(4)];
    auto spec = make(sys, ball(g, 1), delta, sigma);
    auto phi = pullback(sys, random_labels(rng, d, 4), sigma, model_window(spec));
    for (std::uint64_t i = 0, n = rng.below(3); i < n; ++i) {
      auto& site = phi.sites[rng.below(d)];
      std::map<GroupElement, int> letters = site.letters();
      letters[g.identity()] = static_cast<int>(rng.below(4));
      site = Configuration(g, letters, std::nullopt);
    }
    if (is_member(spec, phi).verdict != Verdict::yes) {
      EXPECT_THROW(map_lowerbound_check(spec, phi), PreconditionError);
      continue;
    }
    ++certified;
    auto r = map_lowerbound_check(spec, phi);
    EXPECT_TRUE(r.pass) << trial;
  }
  EXPECT_GT(certified, 100);
}

TEST(MapLowerBound, ExactEquivariantCountsEverySite) {
  auto sigma = from_cyclic(kZ, 7);
  auto spec = make(binary(), interval(kZ, 1, 3), Rational(1, 4), sigma);
  SeededRng rng(6);
  auto r = map_lowerbound_check(spec, pullback(binary(), random_labels(rng, 7, 2), sigma, model_window(spec)));
  EXPECT_EQ(r.counts, (std::vector<std::size_t>{7, 7, 7}));
  auto unit = make(binary(), one_step(), Rational(1, 4), from_cyclic(kZ, 1));
  auto r1 = map_lowerbound_check(unit, Microstate{{Configuration::constant(kZ, 1)}});
  EXPECT_EQ(r1.counts, (std::vector<std::size_t>{1}));
}

TEST(Enumeration, MembersSatisfyLowerBound) {
  for (std::size_t d = 2; d <= 7; ++d)
    for (Rational delta : {Rational(1, 4), Rational(1, 9)}) {
      auto spec = make(ShiftSystem::golden_mean(), one_step(), delta, from_random(kZ, d, d));
      auto e = enumerate_members(spec, 100000);
      EXPECT_TRUE(e.complete);
      EXPECT_FALSE(e.members.empty());
      for (std::size_t i = 0; i < e.members.size(); ++i) {
        auto phi = e.microstate(i);
        ASSERT_EQ(is_member(spec, phi).verdict, Verdict::yes);
        EXPECT_TRUE(map_lowerbound_check(spec, phi).pass);
      }
    }
}

TEST(Enumeration, MatchesBruteForce) {
  // Every assignment of site patterns, checked one by one.
  auto line = AlphabetSpace::on_line({0, Rational(1, 2), 1});
  auto sys = ShiftSystem::full(kZ, line);
  for (std::size_t d : {2u, 3u, 4u}) {
    auto spec = make(sys, one_step(), Rational(1, 3), from_random(kZ, d, 40 + d));
    auto e = enumerate_members(spec, 1000000);
    const std::size_t k = e.patterns.size();
    std::size_t brute = 0;
    std::vector<int> ids(d, 0);
    while (true) {
      Microstate phi;
      for (int id : ids) phi.sites.push_back(Configuration::from_pattern(e.patterns[id], std::nullopt));
      brute += is_member(spec, phi).verdict == Verdict::yes;
      std::size_t v = d;
      while (v > 0 && ids[v - 1] == static_cast<int>(k) - 1) ids[--v] = 0;
      if (v == 0) break;
      ++ids[v - 1];
    }
    EXPECT_EQ(e.members.size(), brute) << d;
  }
}

TEST(Separated, FullShiftPullbackFamily) {
  for (std::size_t d = 1; d <= 12; ++d) {
    auto spec = make(binary(), one_step(), Rational(1, 4), from_cyclic(kZ, d));
    auto r = count_separated_microstates(spec, Rational(1), 1u << 12);
    EXPECT_EQ(r.count, std::size_t{1} << d);
    EXPECT_FALSE(r.partial);
    EXPECT_EQ(r.per_site, Value(LogRatio(2, 1)));
  }
}

TEST(Separated, ExhaustiveAgreesAtSmallDegree) {
  for (std::size_t d = 1; d <= 6; ++d) {
    auto spec = make(binary(), one_step(), Rational(1, 4), from_cyclic(kZ, d));
    auto exact = max_separated_microstates(spec, Rational(1), 100000);
    EXPECT_EQ(exact.count, std::size_t{1} << d);
  }
}

TEST(Separated, EmptyMapGivesMinusInfinity) {
  // An odd cycle cannot alternate.
  auto spec = make(alternating(), one_step(), Rational(0), from_cyclic(kZ, 5));
  auto r = count_separated_microstates(spec, Rational(1), 1000);
  EXPECT_EQ(r.count, 0u);
  EXPECT_EQ(r.per_site, Value::minus_infinity());
  spec.sigma = from_cyclic(kZ, 6);
  EXPECT_EQ(count_separated_microstates(spec, Rational(1), 1000).count, 2u);
}

TEST(Separated, SingleSite) {
  auto spec = make(ShiftSystem::golden_mean(), parse_window(kZ, "identity"), Rational(1, 4), from_cyclic(kZ, 1));
  EXPECT_EQ(count_separated_microstates(spec, Rational(1), 100).count, 2u);
  EXPECT_EQ(max_separated_microstates(spec, Rational(1), 100).count, 2u);
}

TEST(Separated, MonotoneInEpsAndBudget) {
  auto sys = ShiftSystem::full(kZ, AlphabetSpace::on_line({0, Rational(1, 4), Rational(1, 2), 1}));
  auto spec = make(sys, one_step(), Rational(1, 2), from_random(kZ, 4, 2));
  std::size_t prev = SIZE_MAX;
  for (Rational eps : {Rational(1, 8), Rational(1, 4), Rational(1, 2), Rational(1)}) {
    auto c = count_separated_microstates(spec, eps, 1000).count;
    EXPECT_LE(c, prev);
    prev = c;
  }
  std::size_t last = 0;
  for (std::size_t budget : {1u, 10u, 50u, 256u}) {
    auto c = count_separated_microstates(spec, Rational(1, 4), budget).count;
    EXPECT_GE(c, last);
    last = c;
  }
}
