#include "meandim/run.hpp"

#include "meandim/invariants.hpp"
#include "meandim/linalg.hpp"
#include "meandim/meanrank.hpp"
#include "meandim/microstates.hpp"
#include "meandim/sofic.hpp"
#include "meandim/tiling.hpp"

#include <cctype>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace meandim::run {

namespace {

// ---- field access ------------------------------------------------------------

class Req {
 public:
  Req(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  const std::string& path() const { return path_; }
  std::string path_of(const std::string& key) const { return path_ + "/" + key; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_.empty() ? "/" : path_, msg); }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const { throw ConfigError(path_of(key), msg); }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.contains(it.key())) fail(it.key(), "unknown key");
  }
  bool has(const std::string& key) const { return j_.contains(key); }
  const Json& at(const std::string& key) const {
    if (!has(key)) fail(key, "missing required field");
    return j_.at(key);
  }
  Req sub(const std::string& key) const { return Req(at(key), path_of(key)); }

  std::string str(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }

  long long integer(const std::string& key, long long lo, long long hi) const {
    const Json& v = at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    long long x = v.get<long long>();
    if (x < lo || x > hi) fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }
  long long integer(const std::string& key, long long lo, long long hi, long long fallback) const {
    return has(key) ? integer(key, lo, hi) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!at(key).is_boolean()) fail(key, "expected true or false");
    return at(key).get<bool>();
  }

  Rational rational_of(const Json& v, const std::string& where) const {
    try {
      if (v.is_string()) return parse_rational(v.get<std::string>());
      if (v.is_number()) return parse_rational(v.dump());
    } catch (const Error& e) {
      throw ConfigError(where, e.what());
    }
    throw ConfigError(where, "expected a number or a rational string such as \"1/3\"");
  }
  Rational rational(const std::string& key) const { return rational_of(at(key), path_of(key)); }
  Rational rational(const std::string& key, const Rational& fallback) const {
    return has(key) ? rational(key) : fallback;
  }
  std::vector<Rational> rationals(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_array()) return {rational(key)};
    std::vector<Rational> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(rational_of(v[i], path_of(key) + "/" + std::to_string(i)));
    if (out.empty()) fail(key, "empty list");
    return out;
  }
  std::vector<std::string> strings(const std::string& key) const {
    const Json& v = at(key);
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array() || v.empty()) fail(key, "expected a string or a nonempty list of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) fail(key, "expected strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

 private:
  const Json& j_;
  std::string path_;
};

template <class F>
auto guarded(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where, e.what());
  }
}

// ---- domain parsers ------------------------------------------------------------

GroupSpec group_of(const Json& j, const std::string& where) {
  if (j.is_string()) return guarded(where, [&] { return GroupSpec::parse(j.get<std::string>()); });
  Req r(j, where);
  const std::string kind = r.str("kind");
  if (kind == "free") {
    r.allow({"kind", "rank"});
    return GroupSpec::free(static_cast<int>(r.integer("rank", 1, 26)));
  }
  if (kind == "lattice") {
    r.allow({"kind", "dim"});
    return GroupSpec::lattice(static_cast<int>(r.integer("dim", 1, 8)));
  }
  if (kind == "cyclic") {
    r.allow({"kind", "order"});
    return GroupSpec::cyclic(static_cast<int>(r.integer("order", 1, 1 << 20)));
  }
  if (kind == "finite") {
    r.allow({"kind", "table", "generators"});
    return guarded(where, [&] {
      return GroupSpec::finite(r.at("table").get<std::vector<std::vector<int>>>(),
                               r.at("generators").get<std::vector<int>>());
    });
  }
  if (kind == "product") {
    r.allow({"kind", "factors"});
    const Json& f = r.at("factors");
    if (!f.is_array() || f.empty()) r.fail("factors", "expected a nonempty list");
    std::vector<GroupSpec> factors;
    for (std::size_t i = 0; i < f.size(); ++i) factors.push_back(group_of(f[i], r.path_of("factors") + "/" + std::to_string(i)));
    return GroupSpec::product(factors);
  }
  r.fail("kind", "unknown group kind '" + kind + "'");
}

GroupSpec group_field(const Req& r, const std::string& fallback = "") {
  if (!r.has("group")) {
    if (fallback.empty()) r.fail("group", "missing required field");
    return GroupSpec::parse(fallback);
  }
  return group_of(r.at("group"), r.path_of("group"));
}

FiniteWindow window_field(const Req& r, const GroupSpec& g, const std::string& key) {
  const std::string text = r.str(key);
  return guarded(r.path_of(key), [&] { return parse_window(g, text); });
}

WindowFamily family_field(const Req& r, const GroupSpec& g, const std::string& key = "family") {
  const std::string text = r.str(key);
  return guarded(r.path_of(key), [&] { return parse_family(g, text); });
}

AlphabetSpace alphabet_of(const Json& j, const std::string& where) {
  Req r(j, where);
  r.allow({"discrete", "line", "matrix"});
  return guarded(where, [&] {
    if (r.has("discrete")) return AlphabetSpace::discrete(static_cast<int>(r.integer("discrete", 1, 256)));
    if (r.has("line")) return AlphabetSpace::on_line(r.rationals("line"));
    if (r.has("matrix")) {
      std::vector<std::vector<Rational>> m;
      const Json& rows = r.at("matrix");
      if (!rows.is_array()) r.fail("matrix", "expected a list of rows");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array()) r.fail("matrix", "expected a list of rows");
        m.emplace_back();
        for (std::size_t k = 0; k < rows[i].size(); ++k)
          m.back().push_back(r.rational_of(rows[i][k], where + "/matrix/" + std::to_string(i)));
      }
      return AlphabetSpace(m);
    }
    r.fail("expected one of 'discrete', 'line', 'matrix'");
  });
}

Pattern pattern_of(const GroupSpec& g, const Json& j, const std::string& where) {
  Req r(j, where);
  r.allow({"window", "letters"});
  FiniteWindow w = window_field(r, g, "window");
  const Json& l = r.at("letters");
  if (!l.is_array() || l.size() != w.size()) r.fail("letters", "expected one letter per window element");
  std::vector<int> letters;
  for (const auto& x : l) {
    if (!x.is_number_integer()) r.fail("letters", "letters are integers");
    letters.push_back(x.get<int>());
  }
  return Pattern{w, letters};
}

// "golden-mean", "full:k", "cube:m", or an object.
ShiftSystem system_of(const GroupSpec& g, const Json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    return guarded(where, [&] {
      if (s == "golden-mean") {
        if (!g.is_integers()) throw Error("the golden-mean shift lives over Z");
        return ShiftSystem::golden_mean();
      }
      if (s.rfind("full:", 0) == 0) return ShiftSystem::full(g, AlphabetSpace::discrete(std::stoi(s.substr(5))));
      if (s.rfind("cube:", 0) == 0) return ShiftSystem::cube(g, CubeSpace{std::stoi(s.substr(5))});
      throw Error("unknown system '" + s + "' (golden-mean, full:k, cube:m)");
    });
  }
  Req r(j, where);
  const std::string kind = r.str("kind");
  if (kind == "golden-mean") {
    r.allow({"kind"});
    return system_of(g, Json("golden-mean"), where);
  }
  if (kind == "full") {
    r.allow({"kind", "alphabet"});
    return ShiftSystem::full(g, alphabet_of(r.at("alphabet"), r.path_of("alphabet")));
  }
  if (kind == "cube") {
    r.allow({"kind", "dim"});
    return ShiftSystem::cube(g, CubeSpace{static_cast<int>(r.integer("dim", 1, 64))});
  }
  if (kind == "subshift") {
    r.allow({"kind", "alphabet", "forbidden"});
    const Json& f = r.at("forbidden");
    if (!f.is_array()) r.fail("forbidden", "expected a list of patterns");
    std::vector<Pattern> forbidden;
    for (std::size_t i = 0; i < f.size(); ++i) forbidden.push_back(pattern_of(g, f[i], r.path_of("forbidden") + "/" + std::to_string(i)));
    auto alphabet = alphabet_of(r.at("alphabet"), r.path_of("alphabet"));
    return guarded(where, [&] { return ShiftSystem::subshift(g, alphabet, forbidden); });
  }
  r.fail("kind", "unknown system kind '" + kind + "'");
}

PseudometricSpec metric_of(const GroupSpec& g, const Req& parent) {
  PseudometricSpec rho;
  if (!parent.has("metric")) return rho;
  Req r = parent.sub("metric");
  r.allow({"base", "depth", "window"});
  const std::string base = r.str("base", "disc");
  if (base == "induced")
    rho.base = PseudometricSpec::Base::induced;
  else if (base != "disc")
    r.fail("base", "expected 'disc' or 'induced'");
  rho.depth = static_cast<int>(r.integer("depth", 0, 64, rho.base == PseudometricSpec::Base::induced ? 8 : 0));
  if (r.has("window")) rho.window = window_field(r, g, "window");
  return rho;
}

// ---- sofic maps ----------------------------------------------------------------

struct SoficRecipe {
  GroupSpec group;
  std::string construction;
  std::size_t d = 0, n = 0, d_min = 0, d_max = 0;
  std::uint64_t seed = 0;
  std::optional<FiniteWindow> window;
  std::vector<Permutation> generators;

  SoficMap build(std::optional<std::uint64_t> reseed = std::nullopt) const {
    const std::uint64_t s = reseed.value_or(seed);
    if (construction == "cyclic") return from_cyclic(group, d);
    if (construction == "torus") return from_torus(group, n);
    if (construction == "random") return from_random(group, d, s);
    if (construction == "regular") return from_regular_action(group, generators, 100000);
    return random_finite_quotient(group, s, d_min, d_max, *window);
  }
  bool seeded() const { return construction == "random" || construction == "quotient"; }
};

SoficRecipe sofic_field(const Req& parent, const GroupSpec& g, const std::optional<FiniteWindow>& window,
                        bool prefer_quotient) {
  Req r = parent.sub("sofic");
  r.allow({"construction", "d", "n", "seed", "d_min", "d_max", "window", "generators"});
  SoficRecipe s{g, "", 0, 0, 0, 0, 0, window, {}};
  std::string fallback = g.is_integers() ? "cyclic" : (prefer_quotient && g.free_rank() ? "quotient" : "random");
  s.construction = r.str("construction", fallback);
  s.seed = static_cast<std::uint64_t>(r.integer("seed", 0, (1LL << 62), 0));
  const long long dmax = 1 << 22;
  if (s.construction == "cyclic" || s.construction == "random") {
    r.allow({"construction", "d", "seed"});
    s.d = static_cast<std::size_t>(r.integer("d", 1, dmax));
    if (s.construction == "cyclic" && !g.is_integers()) r.fail("construction", "cyclic maps need the group Z");
  } else if (s.construction == "torus") {
    r.allow({"construction", "n"});
    s.n = static_cast<std::size_t>(r.integer("n", 1, 4096));
    if (!g.lattice_dim()) r.fail("construction", "torus maps need a lattice group");
  } else if (s.construction == "quotient") {
    r.allow({"construction", "d", "d_min", "d_max", "seed", "window"});
    if (!g.free_rank()) r.fail("construction", "quotient maps need a free group");
    if (r.has("d")) s.d_min = s.d_max = static_cast<std::size_t>(r.integer("d", 1, dmax));
    s.d_min = static_cast<std::size_t>(r.integer("d_min", 1, dmax, static_cast<long long>(s.d_min)));
    s.d_max = static_cast<std::size_t>(r.integer("d_max", 1, dmax, static_cast<long long>(s.d_max)));
    if (s.d_min == 0 || s.d_max < s.d_min) r.fail("give 'd' or 'd_min' <= 'd_max'");
    if (r.has("window")) s.window = window_field(r, g, "window");
    if (!s.window) s.window = ball(g, 1);
  } else if (s.construction == "regular") {
    r.allow({"construction", "generators"});
    if (!g.free_rank()) r.fail("construction", "regular actions need a free group");
    s.generators = guarded(r.path_of("generators"), [&] {
      std::vector<Permutation> out;
      for (const auto& p : r.at("generators")) out.emplace_back(p.get<std::vector<std::uint32_t>>());
      return out;
    });
  } else {
    r.fail("construction", "unknown construction '" + s.construction + "'");
  }
  return s;
}

// ---- outcome -------------------------------------------------------------------

struct Outcome {
  Json data = Json::object();
  std::optional<Bracket> bracket;
  std::vector<Row> rows;
  std::string status = "ok";
  std::vector<std::uint64_t> seeds;
};
using Thunk = std::function<Outcome()>;

Json value_json(const Value& v) { return v.to_string(); }

Json approx_json(const Value& v) {
  if (!v.is_finite()) return nullptr;
  return v.approx();
}

Json bracket_json(const Bracket& b) {
  Json j;
  j["lower"] = value_json(b.lower);
  j["upper"] = value_json(b.upper);
  j["lower_approx"] = approx_json(b.lower);
  j["upper_approx"] = approx_json(b.upper);
  j["lower_witness"] = b.lower_witness;
  j["upper_witness"] = b.upper_witness;
  j["valid"] = b.valid();
  return j;
}

Json row_json(const Row& r) {
  return Json{{"invariant", r.invariant}, {"window", r.window}, {"lower", value_json(r.lower)},
              {"upper", value_json(r.upper)}, {"witness", r.witness}, {"status", r.status}};
}

Outcome from_invariant(InvariantResult res) {
  Outcome o;
  o.bracket = res.bracket;
  o.rows = std::move(res.rows);
  return o;
}

std::string fingerprint(const SoficMap& sigma) {
  std::uint64_t h = 1469598103934665603ULL;
  for (int i = 0; i < sigma.spec().generator_count(); ++i)
    for (std::uint32_t x : sigma.generator_image(i).images()) {
      h ^= x;
      h *= 1099511628211ULL;
    }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

Json sofic_json(const SoficMap& sigma) {
  Json j{{"construction", sigma.construction()}, {"degree", sigma.degree()}, {"fingerprint", fingerprint(sigma)}};
  j["seed"] = sigma.seed() ? Json(*sigma.seed()) : Json(nullptr);
  if (sigma.degree() <= 32) {
    Json images = Json::array();
    for (int i = 0; i < sigma.spec().generator_count(); ++i) images.push_back(sigma.generator_image(i).images());
    j["generator_images"] = images;
  }
  return j;
}

std::vector<std::uint32_t> all_points(std::size_t d) {
  std::vector<std::uint32_t> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = static_cast<std::uint32_t>(i);
  return v;
}

// ---- ops -----------------------------------------------------------------------

Thunk op_group_info(const Req& r) {
  r.allow({"op", "id", "group", "radius", "folner"});
  GroupSpec g = group_field(r);
  const int radius = static_cast<int>(r.integer("radius", 0, 12, 3));
  std::optional<std::pair<FiniteWindow, FiniteWindow>> folner;
  if (r.has("folner")) {
    Req f = r.sub("folner");
    f.allow({"K", "F"});
    folner.emplace(window_field(f, g, "K"), window_field(f, g, "F"));
  }
  return [g, radius, folner] {
    Outcome o;
    o.data["descriptor"] = g.descriptor();
    Json gens = Json::array();
    for (int i = 0; i < g.generator_count(); ++i) gens.push_back(g.generator_name(i));
    o.data["generators"] = gens;
    Json sizes = Json::array();
    for (int k = 0; k <= radius; ++k) sizes.push_back(ball(g, k).size());
    o.data["ball_sizes"] = sizes;
    Json head = Json::array();
    for (const auto& e : Enumeration::first(g, 10)) head.push_back(g.format(e));
    o.data["enumeration_head"] = head;
    o.data["orderable"] = g.is_torsion_free_orderable();
    if (folner) o.data["folner_defect"] = to_string(folner_defect(folner->first, folner->second));
    return o;
  };
}

Thunk op_sofic_gen(const Req& r) {
  r.allow({"op", "id", "group", "sofic"});
  GroupSpec g = group_field(r);
  SoficRecipe s = sofic_field(r, g, std::nullopt, false);
  return [s] {
    Outcome o;
    SoficMap sigma = s.build();
    if (s.seeded()) o.seeds.push_back(s.seed);
    o.data["sofic"] = sofic_json(sigma);
    return o;
  };
}

Json goodness_json(const GoodnessReport& rep) {
  return Json{{"window", rep.window.describe()},
              {"tau", to_string(rep.tau)},
              {"degree", rep.degree},
              {"multiplicativity", to_string(rep.multiplicativity)},
              {"separation", to_string(rep.separation)},
              {"good_set_size", rep.good_set.size()},
              {"good_set_threshold", to_string(rep.good_set_threshold)},
              {"meets_threshold", rep.meets_threshold}};
}

Thunk op_sofic_audit(const Req& r) {
  r.allow({"op", "id", "group", "sofic", "F", "tau"});
  GroupSpec g = group_field(r);
  FiniteWindow f = window_field(r, g, "F");
  Rational tau = r.rational("tau", Rational(1, 5));
  if (tau <= 0 || tau >= 1) r.fail("tau", "must lie in (0, 1)");
  SoficRecipe s = sofic_field(r, g, f, false);
  return [s, f, tau] {
    Outcome o;
    SoficMap sigma = s.build();
    if (s.seeded()) o.seeds.push_back(s.seed);
    o.data["sofic"] = sofic_json(sigma);
    o.data["goodness"] = goodness_json(goodness(sigma, f, tau));
    return o;
  };
}

std::vector<std::uint64_t> seeds_field(const Req& r, std::uint64_t fallback) {
  if (!r.has("seeds")) return {fallback};
  const Json& j = r.at("seeds");
  std::vector<std::uint64_t> out;
  if (j.is_array()) {
    for (const auto& x : j) {
      if (!x.is_number_unsigned()) r.fail("seeds", "expected nonnegative integers");
      out.push_back(x.get<std::uint64_t>());
    }
  } else {
    Req s = r.sub("seeds");
    s.allow({"first", "count"});
    const auto first = static_cast<std::uint64_t>(s.integer("first", 0, 1LL << 62));
    const auto count = static_cast<std::uint64_t>(s.integer("count", 1, 100000));
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(first + i);
  }
  if (out.empty()) r.fail("seeds", "empty seed list");
  return out;
}

Thunk op_tile(const Req& r) {
  r.allow({"op", "id", "group", "sofic", "F", "tau", "eta", "seeds", "permissive"});
  GroupSpec g = group_field(r);
  std::vector<FiniteWindow> windows;
  for (const auto& text : r.strings("F")) windows.push_back(guarded(r.path_of("F"), [&] { return parse_window(g, text); }));
  std::vector<Rational> taus = r.rationals("tau");
  for (const auto& t : taus)
    if (t <= 0 || t >= 1) r.fail("tau", "must lie in (0, 1)");
  Rational eta = r.rational("eta", Rational(0));
  if (eta < 0 || eta >= 1) r.fail("eta", "must lie in [0, 1)");
  const bool permissive = r.boolean("permissive", false);
  FiniteWindow sep = windows.front();
  for (const auto& w : windows) sep = sep.union_with(w);
  SoficRecipe s = sofic_field(r, g, sep, true);
  std::vector<std::uint64_t> seeds = seeds_field(r, s.seed);
  if (!s.seeded() && seeds.size() > 1) r.fail("seeds", "this construction takes no seed");
  return [=] {
    Outcome o;
    std::size_t runs = 0, passed = 0, maximal = 0;
    std::set<std::size_t> degrees;
    for (std::uint64_t seed : seeds) {
      SoficMap sigma = s.build(seed);
      if (s.seeded()) o.seeds.push_back(seed);
      degrees.insert(sigma.degree());
      const auto pts = all_points(sigma.degree());
      for (const auto& f : windows)
        for (const auto& tau : taus) {
          ++runs;
          const std::string witness = "d=" + std::to_string(sigma.degree()) +
                                      (s.seeded() ? " seed=" + std::to_string(seed) : "") + " tau=" + to_string(tau);
          GoodnessReport rep = goodness(sigma, f, tau);
          try {
            Tiling t = tile(sigma, f, tau, eta, rep.good_set, pts, permissive);
            TilingVerdict v = verify_tiling(t, sigma, f, tau, eta);
            auto bad = maximality_violation(t, sigma, f, tau, rep.good_set, pts);
            passed += v.pass;
            maximal += !bad;
            std::string status = v.pass ? "PASS" : "FAIL " + v.describe();
            if (bad) status += " maximality@" + std::to_string(*bad);
            o.rows.push_back({"tiling", f.describe(), v.coverage, Rational(1 - tau - eta),
                              witness + " tiles=" + std::to_string(t.tiles.size()), status});
          } catch (const PreconditionError& e) {
            o.rows.push_back({"tiling", f.describe(), Rational(0), Rational(1 - tau - eta), witness,
                              std::string("PRECONDITION ") + e.what()});
          }
        }
    }
    o.data["runs"] = runs;
    o.data["passed"] = passed;
    o.data["maximality_certified"] = maximal;
    o.data["degrees"] = Json(std::vector<std::size_t>(degrees.begin(), degrees.end()));
    return o;
  };
}

struct SystemRequest {
  GroupSpec group;
  ShiftSystem sys;
};

SystemRequest system_field(const Req& r) {
  GroupSpec g = group_field(r, "Z");
  return {g, system_of(g, r.at("system"), r.path_of("system"))};
}

Thunk op_entropy(const Req& r) {
  r.allow({"op", "id", "group", "system", "metric", "eps", "family"});
  auto [g, sys] = system_field(r);
  if (sys.is_cube()) r.fail("system", "entropy needs a finite alphabet");
  PseudometricSpec rho = metric_of(g, r);
  Rational eps = r.rational("eps");
  if (eps <= 0) r.fail("eps", "must be positive");
  WindowFamily fam = family_field(r, g);
  return [sys, rho, eps, fam] { return from_invariant(naive_eps_entropy(sys, rho, eps, fam)); };
}

Thunk op_mdim(const Req& r) {
  r.allow({"op", "id", "group", "system", "eps", "family", "eps0", "cube_refinement"});
  auto [g, sys] = system_field(r);
  Rational eps = r.rational("eps");
  if (eps <= 0) r.fail("eps", "must be positive");
  WindowFamily fam = family_field(r, g);
  WdimOptions opt;
  if (r.has("eps0")) opt.eps0 = r.rational("eps0");
  opt.cube_refinement = r.boolean("cube_refinement", false);
  return [sys, eps, fam, opt] { return from_invariant(naive_mdim_bracket(sys, eps, fam, opt)); };
}

Thunk op_amplification(const Req& r) {
  r.allow({"op", "id", "group", "S", "family"});
  GroupSpec g = group_field(r);
  FiniteWindow s = window_field(r, g, "S");
  WindowFamily fam = family_field(r, g);
  return [s, fam] { return from_invariant(amplification(s, fam)); };
}

Admissibility mode_field(const Req& r) {
  const std::string m = r.str("mode", "global");
  if (m == "global") return Admissibility::global;
  if (m == "local") return Admissibility::local;
  r.fail("mode", "expected 'global' or 'local'");
}

Thunk op_ocap(const Req& r) {
  r.allow({"op", "id", "group", "system", "cylinders", "family", "mode"});
  auto [g, sys] = system_field(r);
  if (sys.is_cube()) r.fail("system", "orbit capacity needs a finite alphabet");
  const Json& c = r.at("cylinders");
  if (!c.is_array()) r.fail("cylinders", "expected a list of patterns");
  std::vector<Pattern> cylinders;
  for (std::size_t i = 0; i < c.size(); ++i) cylinders.push_back(pattern_of(g, c[i], r.path_of("cylinders") + "/" + std::to_string(i)));
  WindowFamily fam = family_field(r, g);
  Admissibility mode = mode_field(r);
  if (mode == Admissibility::global && !g.is_integers()) r.fail("mode", "global admissibility needs the group Z");
  return [sys, cylinders, fam, mode] { return from_invariant(orbit_capacity(sys, cylinders, fam, mode)); };
}

ModuleFile module_field(const Req& r) {
  Req m = r.sub("module");
  m.allow({"preset", "file", "text"});
  return guarded(m.path(), [&] {
    if (m.has("preset")) return module_preset(m.str("preset"));
    if (m.has("text")) return parse_module_file(m.str("text"));
    if (m.has("file")) {
      std::ifstream in(m.str("file"));
      if (!in) throw Error("cannot read module file '" + m.str("file") + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      return parse_module_file(buf.str());
    }
    m.fail("expected one of 'preset', 'text', 'file'");
  });
}

Thunk op_meanrank(const Req& r) {
  r.allow({"op", "id", "module", "family", "schedule", "surrogate"});
  ModuleFile mod = module_field(r);
  const GroupSpec g = mod.presentation.group();
  WindowFamily fam = family_field(r, g);
  TruncationSchedule sched;
  if (r.has("schedule")) sched = guarded(r.path_of("schedule"), [&] { return TruncationSchedule::parse(r.str("schedule")); });
  struct Surr {
    SoficRecipe recipe;
    FiniteWindow window;
    int radius;
  };
  std::optional<Surr> surr;
  if (r.has("surrogate")) {
    Req s = r.sub("surrogate");
    s.allow({"sofic", "F", "radius"});
    FiniteWindow f = window_field(s, g, "F");
    surr = Surr{sofic_field(s, g, f, false), f, static_cast<int>(s.integer("radius", -1, 64, -1))};
  }
  return [mod, fam, sched, surr] {
    Outcome o;
    MeanRankResult res = naive_mean_rank_bracket(mod.presentation, mod.subgroup, fam, sched);
    o.rows = res.rows;
    o.bracket = res.bracket;
    o.data["module"] = mod.presentation.describe();
    o.data["subgroup"] = mod.subgroup.describe();
    o.data["schedule"] = sched.describe();
    o.data["heuristic"] = res.heuristic;
    if (!res.bracket) o.status = "unstable";
    if (surr) {
      SoficMap sigma = surr->recipe.build();
      if (surr->recipe.seeded()) o.seeds.push_back(surr->recipe.seed);
      SurrogateResult sr =
          sofic_rank_surrogate(mod.presentation, mod.subgroup, mod.subgroup, surr->window, sigma, surr->radius);
      Json sj{{"F", surr->window.describe()}, {"degree", sigma.degree()}, {"radius", sr.radius},
              {"rank", sr.rank},           {"value", to_string(sr.value)}};
      if (res.bracket) {
        const double gap = to_double(sr.value) - res.bracket->upper.approx();
        sj["below_naive_upper"] = gap <= 1e-9;
      }
      o.data["surrogate"] = sj;
      o.rows.push_back({"sofic-rank-surrogate", surr->window.describe(), Rational(0), sr.value,
                        "d=" + std::to_string(sigma.degree()) + " R=" + std::to_string(sr.radius), "upper @ (F, sigma)"});
    }
    return o;
  };
}

Thunk op_microstates(const Req& r) {
  r.allow({"op", "id", "group", "system", "metric", "F", "delta", "sofic", "mode", "eps", "budget"});
  auto [g, sys] = system_field(r);
  if (sys.is_cube()) r.fail("system", "microstates need a finite alphabet");
  PseudometricSpec rho = metric_of(g, r);
  FiniteWindow f = window_field(r, g, "F");
  Rational delta = r.rational("delta");
  if (delta < 0) r.fail("delta", "must be >= 0");
  SoficRecipe s = sofic_field(r, g, f, false);
  const std::string mode = r.str("mode", "count");
  if (mode != "count" && mode != "exhaustive" && mode != "lowerbound")
    r.fail("mode", "expected 'count', 'exhaustive' or 'lowerbound'");
  Rational eps = r.rational("eps", Rational(1));
  if (eps <= 0) r.fail("eps", "must be positive");
  const auto budget = static_cast<std::size_t>(r.integer("budget", 1, 50'000'000, 100000));
  return [=] {
    Outcome o;
    SoficMap sigma = s.build();
    if (s.seeded()) o.seeds.push_back(s.seed);
    MicrostateSpaceSpec spec{sys, rho, f, delta, sigma};
    const std::string where = "d=" + std::to_string(sigma.degree()) + " delta=" + to_string(delta);
    o.data["model_window"] = model_window(spec).describe();
    if (mode == "lowerbound") {
      MemberEnumeration e = enumerate_members(spec, budget);
      std::size_t violations = 0;
      for (std::size_t i = 0; i < e.members.size(); ++i) violations += !map_lowerbound_check(spec, e.microstate(i)).pass;
      o.data["members"] = e.members.size();
      o.data["undecided"] = e.undecided;
      o.data["complete"] = e.complete;
      o.data["violations"] = violations;
      if (!e.complete) o.status = "partial";
      o.rows.push_back({"map-lowerbound", f.describe(), Rational(0), Rational(static_cast<long>(violations)),
                        where + " members=" + std::to_string(e.members.size()), violations ? "FAIL" : "PASS"});
      return o;
    }
    SeparatedMicrostates c = mode == "count" ? count_separated_microstates(spec, eps, budget)
                                             : max_separated_microstates(spec, eps, budget);
    o.data["count"] = c.count;
    o.data["candidates"] = c.candidates;
    o.data["method"] = c.method;
    o.data["per_site"] = value_json(c.per_site);
    if (c.partial) o.status = "partial";
    o.rows.push_back({"microstates", f.describe(), c.per_site, Value::infinity(),
                      where + " eps=" + to_string(eps) + " " + c.describe(), "lower @ (F, delta, sigma)"});
    return o;
  };
}

Thunk op_decay(const Req& r) {
  r.allow({"op", "id", "group", "system", "metric", "eps", "family"});
  auto [g, sys] = system_field(r);
  if (sys.is_cube()) r.fail("system", "decay needs a finite alphabet");
  PseudometricSpec rho = metric_of(g, r);
  std::vector<Rational> grid = r.rationals("eps");
  for (const auto& e : grid)
    if (e <= 0 || e >= 1) r.fail("eps", "every eps must lie in (0, 1)");
  WindowFamily fam = family_field(r, g);
  return [sys, rho, grid, fam] {
    Outcome o;
    DecayResult d = decay_diagnostic(sys, rho, grid, fam);
    Json rows = Json::array();
    for (const auto& row : d.rows) {
      rows.push_back(Json{{"eps", to_string(row.eps)},
                          {"entropy_ratio", row.entropy_ratio},
                          {"capacity_ratio", row.capacity_ratio},
                          {"product", row.product}});
      o.rows.push_back({"decay", "eps=" + to_string(row.eps), Rational(0), Value(Rational(0)),
                        "h/|log eps|=" + std::to_string(row.entropy_ratio) +
                            " logN/|log eps|=" + std::to_string(row.capacity_ratio),
                        "product=" + std::to_string(row.product)});
    }
    o.data["rows"] = rows;
    o.data["trends_to_zero"] = d.trends_to_zero;
    return o;
  };
}

DistanceMatrix random_l1_space(SeededRng& rng, std::size_t points, int dim, int bound) {
  std::vector<std::vector<int>> coords(points, std::vector<int>(dim));
  for (auto& c : coords)
    for (auto& x : c) x = static_cast<int>(rng.below(bound + 1));
  DistanceMatrix m(points, std::vector<Rational>(points, 0));
  for (std::size_t i = 0; i < points; ++i)
    for (std::size_t j = 0; j < points; ++j) {
      long s = 0;
      for (int k = 0; k < dim; ++k) s += std::abs(coords[i][k] - coords[j][k]);
      m[i][j] = s;
    }
  return m;
}

Thunk op_separated(const Req& r) {
  r.allow({"op", "id", "eps", "line", "random"});
  Rational eps = r.rational("eps");
  if (eps <= 0) r.fail("eps", "must be positive");
  if (r.has("line")) {
    std::vector<Rational> pts = r.rationals("line");
    return [pts, eps] {
      Outcome o;
      DistanceMatrix m = line_distances(pts);
      const std::size_t exact = separated_exact(m, eps);
      const std::size_t greedy = separated_greedy(m, eps).size();
      o.data["exact"] = exact;
      o.data["greedy"] = greedy;
      o.rows.push_back({"separated", "line:" + std::to_string(pts.size()), Rational(static_cast<long>(greedy)),
                        Rational(static_cast<long>(exact)), "greedy / exact", "ok"});
      return o;
    };
  }
  Req g = r.sub("random");
  g.allow({"count", "max_points", "dim", "bound", "seed"});
  const auto count = static_cast<std::size_t>(g.integer("count", 1, 100000));
  const auto max_points = static_cast<std::size_t>(g.integer("max_points", 1, 20));
  const int dim = static_cast<int>(g.integer("dim", 1, 8, 2));
  const int bound = static_cast<int>(g.integer("bound", 1, 1000, 6));
  const auto seed = static_cast<std::uint64_t>(g.integer("seed", 0, 1LL << 62, 0));
  return [=] {
    Outcome o;
    o.seeds.push_back(seed);
    SeededRng rng(seed);
    std::size_t sandwiched = 0;
    for (std::size_t t = 0; t < count; ++t) {
      DistanceMatrix m = random_l1_space(rng, 1 + rng.below(max_points), dim, bound);
      const std::size_t greedy = separated_greedy(m, eps).size();
      const std::size_t hi = separated_exact(m, eps), lo = separated_exact(m, 2 * eps);
      sandwiched += lo <= greedy && greedy <= hi;
    }
    o.data["cases"] = count;
    o.data["greedy_sandwiched"] = sandwiched;
    o.rows.push_back({"separated", "random:" + std::to_string(count), Rational(static_cast<long>(sandwiched)),
                      Rational(static_cast<long>(count)), "exact(2 eps) <= greedy <= exact(eps)",
                      sandwiched == count ? "PASS" : "FAIL"});
    return o;
  };
}

bool smith_checks(const IntMatrix& m, std::size_t cols, SmithForm* out) {
  SmithForm s = smith_normal_form(m, cols);
  bool ok = multiply(multiply(s.u, m), s.v) == s.d;
  ok = ok && abs(bareiss_determinant(s.u)) == 1 && abs(bareiss_determinant(s.v)) == 1;
  for (std::size_t i = 0; i + 1 < s.invariants.size(); ++i) ok = ok && s.invariants[i + 1] % s.invariants[i] == 0;
  ok = ok && s.rank == bareiss_rank(m);
  if (out) *out = std::move(s);
  return ok;
}

Thunk op_smith(const Req& r) {
  r.allow({"op", "id", "matrix", "random"});
  if (r.has("matrix")) {
    IntMatrix m = guarded(r.path_of("matrix"), [&] {
      IntMatrix out;
      for (const auto& row : r.at("matrix")) {
        out.emplace_back();
        for (const auto& x : row) out.back().emplace_back(x.get<long long>());
      }
      if (out.empty()) throw Error("empty matrix");
      for (const auto& row : out)
        if (row.size() != out[0].size()) throw Error("ragged matrix");
      return out;
    });
    return [m] {
      Outcome o;
      SmithForm s;
      const bool ok = smith_checks(m, m[0].size(), &s);
      Json inv = Json::array();
      for (const auto& x : s.invariants) inv.push_back(x.str());
      o.data["invariants"] = inv;
      o.data["rank"] = s.rank;
      o.data["verified"] = ok;
      o.rows.push_back({"smith", std::to_string(m.size()) + "x" + std::to_string(m[0].size()),
                        Rational(static_cast<long>(s.rank)), Rational(static_cast<long>(s.rank)), "rank",
                        ok ? "PASS" : "FAIL"});
      return o;
    };
  }
  Req g = r.sub("random");
  g.allow({"count", "max_size", "bound", "seed"});
  const auto count = static_cast<std::size_t>(g.integer("count", 1, 1000000));
  const auto max_size = static_cast<std::size_t>(g.integer("max_size", 1, 32));
  const long bound = static_cast<long>(g.integer("bound", 0, 1000000));
  const auto seed = static_cast<std::uint64_t>(g.integer("seed", 0, 1LL << 62, 0));
  return [=] {
    Outcome o;
    o.seeds.push_back(seed);
    SeededRng rng(seed);
    std::size_t passed = 0;
    for (std::size_t t = 0; t < count; ++t) {
      const std::size_t rows = 1 + rng.below(max_size), cols = 1 + rng.below(max_size);
      IntMatrix m(rows, std::vector<BigInt>(cols));
      for (auto& row : m)
        for (auto& x : row) x = static_cast<long>(rng.below(2 * bound + 1)) - bound;
      passed += smith_checks(m, cols, nullptr);
    }
    o.data["matrices"] = count;
    o.data["verified"] = passed;
    o.rows.push_back({"smith", "random:" + std::to_string(count), Rational(static_cast<long>(passed)),
                      Rational(static_cast<long>(count)), "U M V = D, divisibility, rank = Bareiss",
                      passed == count ? "PASS" : "FAIL"});
    return o;
  };
}

using Compiler = std::function<Thunk(const Req&)>;

const std::map<std::string, Compiler>& compilers() {
  static const std::map<std::string, Compiler> table{
      {"group-info", op_group_info}, {"sofic-gen", op_sofic_gen},       {"sofic-audit", op_sofic_audit},
      {"tile", op_tile},             {"entropy", op_entropy},           {"mdim", op_mdim},
      {"amplification", op_amplification}, {"ocap", op_ocap},           {"meanrank", op_meanrank},
      {"microstates", op_microstates}, {"decay", op_decay},             {"separated", op_separated},
      {"smith", op_smith}};
  return table;
}

}  // namespace

// ---- public ---------------------------------------------------------------------

Json parse_config_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is one past the last byte read; step back to the token start.
    std::size_t at = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size() ? text.size() - 1 : 0);
    auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+'; };
    if (at < text.size() && text[at] == '"') {
      std::size_t k = at;
      while (k > 0 && text[k - 1] != '\n' && !(text[k - 1] == '"' && (k < 2 || text[k - 2] != '\\'))) --k;
      if (k > 0 && text[k - 1] == '"') at = k - 1;
    } else if (at < text.size() && (word(text[at]) || (at > 0 && word(text[at - 1])))) {
      if (!word(text[at])) --at;
      while (at > 0 && word(text[at - 1])) --at;
    }
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), msg);
  }
}

namespace {

struct Compiled {
  std::string id, op;
  Thunk thunk;
};

std::vector<Compiled> compile(const Json& config) {
  Req top(config, "");
  top.allow({"version", "name", "description", "requests"});
  if (top.has("version") && top.integer("version", 1, 1) != 1) top.fail("version", "unsupported version");
  if (top.has("name")) top.str("name");
  if (top.has("description")) top.str("description");
  const Json& requests = top.at("requests");
  if (!requests.is_array()) top.fail("requests", "expected a list");

  std::vector<Compiled> compiled;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    Req r(requests[i], "/requests/" + std::to_string(i));
    const std::string op = r.str("op");
    auto it = compilers().find(op);
    if (it == compilers().end()) r.fail("op", "unknown op '" + op + "'");
    const std::string id = r.str("id", op + "-" + std::to_string(i));
    if (!ids.insert(id).second) r.fail("id", "duplicate id '" + id + "'");
    compiled.push_back({id, op, it->second(r)});
  }
  return compiled;
}

}  // namespace

void check_config(const Json& config) { compile(config); }

RunOutput run_config(const Json& config) {
  std::vector<Compiled> compiled = compile(config);

  RunOutput out;
  out.report["tool"] = "meandim";
  out.report["version"] = kToolVersion;
  out.report["schema"] = kReportSchema;
  out.report["config"] = config;
  Json seeds = Json::array();
  Json results = Json::array();
  out.tsv = tsv_header();
  std::size_t errors = 0;
  for (auto& c : compiled) {
    Json res;
    res["id"] = c.id;
    res["op"] = c.op;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.thunk();
    } catch (const std::exception& e) {
      o = Outcome{};
      o.status = "error";
      res["error"] = e.what();
      ++errors;
    }
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    res["status"] = o.status;
    res["timing_ms"] = ms;
    res["bracket"] = o.bracket ? bracket_json(*o.bracket) : Json(nullptr);
    Json rows = Json::array();
    for (auto& row : o.rows) {
      rows.push_back(row_json(row));
      row.invariant = c.id + ":" + row.invariant;
      out.tsv += tsv_row(row);
    }
    res["rows"] = rows;
    res["data"] = o.data;
    results.push_back(res);
    if (!o.seeds.empty()) seeds.push_back(Json{{"request", c.id}, {"seeds", o.seeds}});
  }
  out.report["seeds"] = seeds;
  out.report["results"] = results;
  out.report["summary"] = Json{{"requests", compiled.size()}, {"errors", errors}};
  out.any_error = errors > 0;
  return out;
}

Json mask_timings(Json report) {
  std::function<void(Json&)> walk = [&](Json& j) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "timing_ms")
          it.value() = 0;
        else
          walk(it.value());
      }
    } else if (j.is_array()) {
      for (auto& x : j) walk(x);
    }
  };
  walk(report);
  return report;
}

std::string tsv_header() { return "invariant\twindow\tlower\tupper\twitness\tstatus\n"; }

std::string tsv_row(const Row& row) {
  auto clean = [](std::string s) {
    for (char& c : s)
      if (c == '\t' || c == '\n') c = ' ';
    return s;
  };
  return clean(row.invariant) + "\t" + clean(row.window) + "\t" + row.lower.to_string() + "\t" + row.upper.to_string() +
         "\t" + clean(row.witness) + "\t" + clean(row.status) + "\n";
}

}  // namespace meandim::run
