#include "meandim/meanrank.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace meandim;

namespace {

const GroupSpec kZ = GroupSpec::parse("Z");

std::map<std::size_t, oracle::Rat> to_map(const SparseRow& r) {
  std::map<std::size_t, oracle::Rat> m;
  for (const auto& [c, x] : r) m[c] = oracle::Rat(x);
  return m;
}

// Dense elimination on the rows the library built.
std::size_t dense_rank_modulo(const TruncatedSystem& s) {
  auto dense = [&](const std::vector<SparseRow>& rows) {
    std::vector<std::vector<oracle::Rat>> m;
    for (const auto& r : rows) {
      m.emplace_back(s.columns, 0);
      for (const auto& [c, x] : r) m.back()[c] = oracle::Rat(x);
    }
    return m;
  };
  auto both = s.relations;
  both.insert(both.end(), s.generators.begin(), s.generators.end());
  return oracle::rational_rank(dense(both)) - oracle::rational_rank(dense(s.relations));
}

GroupRingElement poly(const std::vector<std::pair<long, long>>& terms) {
  GroupRingElement f(kZ);
  for (auto [g, c] : terms) f.add_term(kZ.from_integer(g), c);
  return f;
}

FiniteWindow intersect(const FiniteWindow& a, const FiniteWindow& b) {
  std::vector<GroupElement> out;
  for (const auto& g : a)
    if (b.contains(g)) out.push_back(g);
  return FiniteWindow(a.spec(), out);
}

}  // namespace

TEST(GroupRing, Arithmetic) {
  auto one_plus_t = poly({{0, 1}, {1, 1}});
  auto one_minus_t = poly({{0, 1}, {1, -1}});
  EXPECT_EQ(one_plus_t * one_minus_t, poly({{0, 1}, {2, -1}}));
  EXPECT_TRUE((one_plus_t - one_plus_t).is_zero());
  EXPECT_EQ(one_plus_t.translate(kZ.from_integer(3)), poly({{3, 1}, {4, 1}}));
  EXPECT_EQ(poly({{0, 2}, {1, -1}}).to_string(), "2*0 - 1");
  EXPECT_EQ(GroupRingElement(kZ).to_string(), "0");
  EXPECT_THROW(one_plus_t + GroupRingElement(GroupSpec::parse("F2")), Error);
}

TEST(GroupRing, NoncommutativeProduct) {
  auto f2 = GroupSpec::parse("F2");
  auto a = GroupRingElement::monomial(f2, f2.parse_element("a"));
  auto b = GroupRingElement::monomial(f2, f2.parse_element("b"));
  EXPECT_FALSE(a * b == b * a);
  EXPECT_EQ((a * b).terms().begin()->first, f2.parse_element("ab"));
}

TEST(ModuleFile, ParsesAndCanonicalizes) {
  auto m = parse_module_file(
      "# trivial action\n"
      "group Z\n"
      "rank 2\n"
      "relator 1 3 1 ; 1 e -1   # t^3 - 1 in the second slot\n"
      "relator 0 1 1 ; 0 e -1\n"
      "relator 0 e 0\n"
      "generator 0 e 1 ; 1 e 2\n");
  EXPECT_EQ(m.presentation.rank(), 2);
  ASSERT_EQ(m.presentation.relators().size(), 2u);
  EXPECT_TRUE(m.presentation.relators()[0][1].is_zero());
  EXPECT_EQ(m.subgroup.generators.size(), 1u);
  EXPECT_EQ(m.subgroup.generators[0][1].coefficient(kZ.identity()), 2);
}

TEST(ModuleFile, ReportsLine) {
  auto fails_at = [](const char* text, const char* needle) {
    try {
      parse_module_file(text);
    } catch (const Error& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(fails_at("group Z\nrank 1\ngenerator 1 e 1\n", "line 3"));
  EXPECT_TRUE(fails_at("group Z\nrank 1\ngenerator 0 e x\n", "bad coefficient"));
  EXPECT_TRUE(fails_at("rank 1\ngenerator 0 e 1\n", "line 2"));
  EXPECT_TRUE(fails_at("group Z\nrank 1\nfoo\n", "unknown key"));
  EXPECT_TRUE(fails_at("group Z\nrank 1\n", "no 'generator'"));
  EXPECT_TRUE(fails_at("group Z\nrank 0\n", "at least 1"));
}

TEST(Schedule, Parse) {
  auto rel = TruncationSchedule::parse("+0,+2");
  EXPECT_TRUE(rel.relative);
  EXPECT_EQ(rel.radii, (std::vector<int>{0, 2}));
  auto abs = TruncationSchedule::parse("3, 4, 7");
  EXPECT_FALSE(abs.relative);
  EXPECT_EQ(abs.describe(), "3,4,7");
  EXPECT_THROW(TruncationSchedule::parse("3,3"), Error);
  EXPECT_THROW(TruncationSchedule::parse("+1,2"), Error);
  EXPECT_THROW(TruncationSchedule::parse(""), Error);
}

TEST(WindowRank, FreeModuleCountsTranslates) {
  auto m = module_preset("ZGamma-free");
  for (int n = 1; n <= 12; ++n) {
    auto wr = window_subgroup_rank(m.presentation, m.subgroup, interval(kZ, 0, n - 1));
    EXPECT_EQ(wr.rank, static_cast<std::size_t>(n));
    EXPECT_TRUE(wr.stable);
  }
  auto res = naive_mean_rank_bracket(m.presentation, m.subgroup, parse_family(kZ, "balls:0..4"));
  ASSERT_TRUE(res.bracket);
  EXPECT_EQ(res.bracket->lower, Value(Rational(1)));
  EXPECT_EQ(res.bracket->upper, Value(Rational(1)));
  EXPECT_FALSE(res.heuristic);
}

TEST(WindowRank, TrivialQuotientCollapses) {
  auto m = module_preset("Z-trivial");
  for (int n = 1; n <= 20; ++n) {
    auto wr = window_subgroup_rank(m.presentation, m.subgroup, interval(kZ, 0, n - 1));
    EXPECT_EQ(wr.rank, 1u) << n;
    EXPECT_TRUE(wr.stable);
  }
  auto res = naive_mean_rank_bracket(m.presentation, m.subgroup, parse_family(kZ, "intervals:1..20"));
  ASSERT_TRUE(res.bracket);
  EXPECT_EQ(res.bracket->upper, Value(Rational(1, 20)));
  EXPECT_EQ(res.bracket->lower, Value(Rational(0)));
  EXPECT_TRUE(res.heuristic);
}

TEST(WindowRank, TrivialQuotientHandOracle) {
  // Coordinates -R..R, relations e_{k+1} - e_k, generators e_{-s}.
  auto m = module_preset("Z-trivial");
  for (int n = 1; n <= 8; ++n)
    for (int r = n - 1; r <= n + 2; ++r) {
      oracle::SparseRationalBasis basis;
      auto col = [&](int k) { return static_cast<std::size_t>(k + r); };
      for (int k = -r; k < r; ++k) basis.add({{col(k + 1), 1}, {col(k), -1}});
      const std::size_t base = basis.rank();
      for (int s = 0; s < n; ++s) basis.add({{col(-s), 1}});
      auto sys = truncated_system(m.presentation, m.subgroup, interval(kZ, 0, n - 1), r);
      EXPECT_EQ(rank_modulo(sys), basis.rank() - base);
      EXPECT_EQ(sys.relations.size(), static_cast<std::size_t>(2 * r));
    }
}

TEST(WindowRank, ZeroSubgroup) {
  ZGModulePresentation p(kZ, 1);
  SubgroupSpec zero{{ModuleVector{GroupRingElement(kZ)}}};
  EXPECT_EQ(window_subgroup_rank(p, zero, interval(kZ, 0, 4)).rank, 0u);
  auto res = naive_mean_rank_bracket(p, zero, parse_family(kZ, "intervals:1..3"));
  ASSERT_TRUE(res.bracket);
  EXPECT_EQ(res.bracket->upper, Value(Rational(0)));
}

TEST(WindowRank, ScheduleBelowSupportThrows) {
  auto m = module_preset("Z-trivial");
  EXPECT_THROW(window_subgroup_rank(m.presentation, m.subgroup, interval(kZ, 0, 9), TruncationSchedule::parse("2,3")),
               Error);
  auto wr = window_subgroup_rank(m.presentation, m.subgroup, interval(kZ, 0, 9), TruncationSchedule::parse("2,9,10"));
  EXPECT_EQ(wr.by_radius.front().first, 9);
}

TEST(WindowRank, FreeGroupBallRatios) {
  auto m = module_preset("F2-ball2");
  auto f2 = m.presentation.group();
  for (int r = 0; r <= 4; ++r) {
    auto wr = window_subgroup_rank(m.presentation, m.subgroup, ball(f2, r));
    const std::size_t expected = oracle::reduced_words(2, r + 2).size();
    EXPECT_EQ(wr.rank, expected);
    EXPECT_GE(Rational(static_cast<long>(wr.rank), static_cast<long>(ball(f2, r).size())), 8);
  }
}

TEST(WindowRank, RandomModulesMatchOracles) {
  // Random relators over Z and Z^2 with n |B_R| <= 200.
  SeededRng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const bool plane = trial % 2;
    GroupSpec g = plane ? GroupSpec::parse("Z^2") : kZ;
    const int rank = 1 + static_cast<int>(rng.below(2));
    auto random_vector = [&](int spread) {
      ModuleVector v(rank, GroupRingElement(g));
      const int terms = 1 + static_cast<int>(rng.below(3));
      for (int i = 0; i < terms; ++i) {
        std::vector<std::int64_t> c{static_cast<std::int64_t>(rng.below(spread + 1))};
        if (plane) c.push_back(static_cast<std::int64_t>(rng.below(2)));
        GroupElement e = plane ? g.from_lattice(c) : g.from_integer(c[0]);
        v[rng.below(rank)].add_term(e, static_cast<long>(rng.below(7)) - 3);
      }
      return v;
    };
    std::vector<ModuleVector> relators;
    for (std::uint64_t i = 0, k = rng.below(3); i < k; ++i) relators.push_back(random_vector(2));
    ZGModulePresentation pres(g, rank, relators);
    SubgroupSpec a{{random_vector(1)}};
    FiniteWindow w = plane ? box(g, 2) : interval(g, 0, static_cast<std::int64_t>(rng.below(4)));
    const int r0 = minimal_radius(pres, a, w);
    std::size_t prev = SIZE_MAX;
    for (int r = r0; r <= r0 + 3; ++r) {
      if (static_cast<std::size_t>(rank) * ball(g, r).size() > 200) break;
      auto sys = truncated_system(pres, a, w, r);
      const std::size_t k = rank_modulo(sys);
      EXPECT_EQ(k, dense_rank_modulo(sys)) << trial << " R=" << r;
      EXPECT_LE(k, prev) << "antitone in R";
      prev = k;
    }
  }
}

TEST(WindowRank, IntegerRelatorTranslatesByHand) {
  // For Z the translates t r with supp in [-R, R] are t in [-R - lo, R - hi].
  SeededRng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const long lo = static_cast<long>(rng.below(3)) - 1, hi = lo + 1 + static_cast<long>(rng.below(3));
    auto rel = poly({{lo, 1 + static_cast<long>(rng.below(3))}, {hi, -1 - static_cast<long>(rng.below(3))}});
    ZGModulePresentation pres(kZ, 1, {{rel}});
    SubgroupSpec a{{{poly({{0, 1}})}}};
    FiniteWindow w = interval(kZ, 0, static_cast<std::int64_t>(rng.below(5)));
    for (int r = minimal_radius(pres, a, w); r < 12; ++r) {
      oracle::SparseRationalBasis basis;
      auto col = [&](long k) { return static_cast<std::size_t>(k + r); };
      for (long t = -r - lo; t <= r - hi; ++t)
        basis.add({{col(t + lo), oracle::Rat(rel.coefficient(kZ.from_integer(lo)))},
                   {col(t + hi), oracle::Rat(rel.coefficient(kZ.from_integer(hi)))}});
      const std::size_t base = basis.rank();
      for (const auto& s : w) basis.add({{col(-kZ.to_integer(s)), 1}});
      EXPECT_EQ(rank_modulo(truncated_system(pres, a, w, r)), basis.rank() - base);
    }
  }
}

TEST(WindowRank, StronglySubadditive) {
  std::vector<ModuleFile> modules{module_preset("ZGamma-free"), module_preset("Z-trivial"),
                                  parse_module_file("group Z\nrank 2\nrelator 0 1 1 ; 1 e -2\ngenerator 0 e 1\ngenerator 1 e 1\n"),
                                  parse_module_file("group Z^2\nrank 1\nrelator 0 e 1 ; 0 x -1 ; 0 y -1 ; 0 xy 1\ngenerator 0 e 1\n")};
  SeededRng rng(5);
  for (const auto& m : modules) {
    const GroupSpec& g = m.presentation.group();
    auto rank_of = [&](const std::vector<GroupElement>& elems) -> std::size_t {
      if (elems.empty()) return 0;
      auto wr = window_subgroup_rank(m.presentation, m.subgroup, FiniteWindow(g, elems));
      EXPECT_TRUE(wr.stable);
      return wr.rank;
    };
    const auto pool = ball(g, 2);
    for (int trial = 0; trial < 15; ++trial) {
      std::vector<GroupElement> f1, f2;
      for (const auto& e : pool) {
        if (rng.below(2)) f1.push_back(e);
        if (rng.below(2)) f2.push_back(e);
      }
      if (f1.empty() || f2.empty()) continue;
      FiniteWindow w1(g, f1), w2(g, f2);
      FiniteWindow u = w1.union_with(w2);
      std::vector<GroupElement> inter;
      for (const auto& e : w1)
        if (w2.contains(e)) inter.push_back(e);
      EXPECT_LE(rank_of(u.elements()) + rank_of(inter), rank_of(f1) + rank_of(f2)) << m.presentation.describe();
    }
  }
}

TEST(Surrogate, IdentityWindowGivesRankOfA) {
  auto m = module_preset("ZGamma-free");
  auto sigma = from_random(kZ, 5, 3);
  auto s = sofic_rank_surrogate(m.presentation, m.subgroup, m.subgroup, parse_window(kZ, "identity"), sigma);
  EXPECT_EQ(s.value, 1);
}

TEST(Surrogate, CyclicShift) {
  auto free_mod = module_preset("ZGamma-free");
  auto trivial = module_preset("Z-trivial");
  FiniteWindow one(kZ, {kZ.from_integer(1)});
  for (std::size_t d : {4u, 6u, 8u}) {
    auto sigma = from_cyclic(kZ, d);
    EXPECT_EQ(sofic_rank_surrogate(free_mod.presentation, free_mod.subgroup, free_mod.subgroup, one, sigma).value, 1);
    EXPECT_EQ(sofic_rank_surrogate(trivial.presentation, trivial.subgroup, trivial.subgroup, one, sigma).value,
              Rational(1, static_cast<long>(d)));
  }
}

TEST(Surrogate, ZeroAndErrors) {
  ZGModulePresentation p(kZ, 1);
  SubgroupSpec zero{{ModuleVector{GroupRingElement(kZ)}}};
  SubgroupSpec one{{ModuleVector{poly({{0, 1}})}}};
  auto sigma = from_cyclic(kZ, 4);
  EXPECT_EQ(sofic_rank_surrogate(p, zero, one, interval(kZ, 0, 1), sigma).value, 0);
  EXPECT_THROW(sofic_rank_surrogate(p, one, one, interval(kZ, 0, 1), sigma, -1, 10), Error);
  auto f2 = GroupSpec::parse("F2");
  EXPECT_THROW(sofic_rank_surrogate(p, one, one, interval(kZ, 0, 1), from_random(f2, 4, 1)), Error);
}
