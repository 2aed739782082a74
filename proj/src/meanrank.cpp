#include "meandim/meanrank.hpp"

#include "meandim/parallel.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

namespace meandim {

// ---- group ring ------------------------------------------------------------

GroupRingElement GroupRingElement::monomial(const GroupSpec& owner, const GroupElement& g, BigInt coefficient) {
  GroupRingElement f(owner);
  f.add_term(g, coefficient);
  return f;
}

BigInt GroupRingElement::coefficient(const GroupElement& g) const {
  auto it = terms_.find(g);
  return it == terms_.end() ? BigInt(0) : it->second;
}

void GroupRingElement::add_term(const GroupElement& g, const BigInt& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(g, c);
  if (fresh) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

GroupRingElement GroupRingElement::operator+(const GroupRingElement& o) const {
  if (!(owner_ == o.owner_)) throw Error("group ring elements over different groups");
  GroupRingElement r = *this;
  for (const auto& [g, c] : o.terms_) r.add_term(g, c);
  return r;
}

GroupRingElement GroupRingElement::operator-(const GroupRingElement& o) const {
  if (!(owner_ == o.owner_)) throw Error("group ring elements over different groups");
  GroupRingElement r = *this;
  for (const auto& [g, c] : o.terms_) r.add_term(g, -c);
  return r;
}

GroupRingElement GroupRingElement::operator*(const GroupRingElement& o) const {
  if (!(owner_ == o.owner_)) throw Error("group ring elements over different groups");
  GroupRingElement r(owner_);
  for (const auto& [s, a] : terms_)
    for (const auto& [t, b] : o.terms_) r.add_term(owner_.multiply(s, t), a * b);
  return r;
}

GroupRingElement GroupRingElement::translate(const GroupElement& g) const {
  GroupRingElement r(owner_);
  for (const auto& [s, c] : terms_) r.terms_.emplace(owner_.multiply(g, s), c);
  return r;
}

std::string GroupRingElement::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [g, c] : terms_) {
    BigInt mag = c < 0 ? BigInt(-c) : c;
    if (out.empty())
      out += c < 0 ? "-" : "";
    else
      out += c < 0 ? " - " : " + ";
    if (mag != 1) out += mag.str() + "*";
    out += owner_.format(g);
  }
  return out;
}

ModuleVector translate(const GroupElement& g, const ModuleVector& v) {
  ModuleVector r;
  r.reserve(v.size());
  for (const auto& f : v) r.push_back(f.translate(g));
  return r;
}

bool is_zero(const ModuleVector& v) {
  return std::all_of(v.begin(), v.end(), [](const auto& f) { return f.is_zero(); });
}

std::vector<GroupElement> support(const ModuleVector& v) {
  std::set<GroupElement> s;
  for (const auto& f : v)
    for (const auto& [g, c] : f.terms()) s.insert(g);
  return {s.begin(), s.end()};
}

namespace {

std::string describe_vector(const ModuleVector& v) {
  if (v.size() == 1) return v[0].to_string();
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].to_string();
  return out + ")";
}

using VectorKey = std::vector<std::tuple<std::size_t, GroupElement, BigInt>>;

VectorKey key_of(const ModuleVector& v) {
  VectorKey k;
  for (std::size_t c = 0; c < v.size(); ++c)
    for (const auto& [g, x] : v[c].terms()) k.emplace_back(c, g, x);
  return k;
}

void check_vector(const GroupSpec& group, int rank, const ModuleVector& v, const char* what) {
  if (static_cast<int>(v.size()) != rank) throw Error(std::string(what) + " has the wrong number of components");
  for (const auto& f : v)
    if (!(f.owner() == group)) throw Error(std::string(what) + " lives over a different group");
}

}  // namespace

// ---- presentations ---------------------------------------------------------

ZGModulePresentation::ZGModulePresentation(GroupSpec group, int rank, std::vector<ModuleVector> relators)
    : group_(std::move(group)), rank_(rank) {
  if (rank < 1) throw Error("module rank must be at least 1");
  for (auto& r : relators) {
    check_vector(group_, rank_, r, "relator");
    if (!is_zero(r)) relators_.push_back(std::move(r));
  }
  std::sort(relators_.begin(), relators_.end(),
            [](const ModuleVector& a, const ModuleVector& b) { return key_of(a) < key_of(b); });
}

std::string ZGModulePresentation::describe() const {
  std::string out = "Z[" + group_.descriptor() + "]";
  if (rank_ > 1) out += "^" + std::to_string(rank_);
  if (relators_.empty()) return out;
  out += " / <";
  for (std::size_t i = 0; i < relators_.size(); ++i) out += (i ? "; " : "") + describe_vector(relators_[i]);
  return out + ">";
}

std::string SubgroupSpec::describe() const {
  std::string out = "<";
  for (std::size_t i = 0; i < generators.size(); ++i) out += (i ? "; " : "") + describe_vector(generators[i]);
  return out + ">";
}

TruncationSchedule TruncationSchedule::parse(std::string_view text) {
  TruncationSchedule s;
  s.radii.clear();
  std::string item;
  std::stringstream in{std::string(text)};
  bool first = true;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    const bool rel = !item.empty() && item[0] == '+';
    if (first) s.relative = rel;
    if (rel != s.relative) throw Error("schedule mixes absolute and relative radii: " + std::string(text));
    first = false;
    std::size_t used = 0;
    int r = 0;
    try {
      r = std::stoi(rel ? item.substr(1) : item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() - (rel ? 1 : 0) || r < 0) throw Error("bad schedule radius: " + item);
    if (!s.radii.empty() && r <= s.radii.back()) throw Error("schedule radii must increase strictly");
    s.radii.push_back(r);
  }
  if (s.radii.empty()) throw Error("empty truncation schedule");
  return s;
}

std::string TruncationSchedule::describe() const {
  std::string out;
  for (std::size_t i = 0; i < radii.size(); ++i) out += (i ? "," : "") + std::string(relative ? "+" : "") + std::to_string(radii[i]);
  return out;
}

// ---- module files ----------------------------------------------------------

namespace {

[[noreturn]] void file_error(std::size_t line, const std::string& msg) {
  throw Error("module file line " + std::to_string(line) + ": " + msg);
}

ModuleVector parse_triples(const GroupSpec& group, int rank, const std::string& body, std::size_t line) {
  ModuleVector v(rank, GroupRingElement(group));
  std::stringstream in(body);
  std::string triple;
  while (std::getline(in, triple, ';')) {
    std::stringstream t(triple);
    long comp = 0;
    std::string word, coef;
    if (!(t >> comp >> word >> coef)) file_error(line, "expected '<component> <word> <coefficient>'");
    std::string extra;
    if (t >> extra) file_error(line, "unexpected '" + extra + "'");
    if (comp < 0 || comp >= rank) file_error(line, "component " + std::to_string(comp) + " out of range");
    BigInt c;
    try {
      c = BigInt(coef);
    } catch (const std::exception&) {
      file_error(line, "bad coefficient '" + coef + "'");
    }
    GroupElement g;
    try {
      g = group.parse_element(word);
    } catch (const Error& e) {
      file_error(line, e.what());
    }
    v[comp].add_term(g, c);
  }
  return v;
}

}  // namespace

ModuleFile parse_module_file(std::string_view text) {
  std::optional<GroupSpec> group;
  int rank = 0;
  std::vector<ModuleVector> relators, generators;
  std::stringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::stringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest;
    std::getline(ls, rest);
    if (key == "group") {
      if (group) file_error(line, "duplicate 'group'");
      try {
        group = GroupSpec::parse(rest.substr(rest.find_first_not_of(' ')));
      } catch (const std::exception& e) {
        file_error(line, e.what());
      }
    } else if (key == "rank") {
      if (rank) file_error(line, "duplicate 'rank'");
      try {
        rank = std::stoi(rest);
      } catch (const std::exception&) {
        file_error(line, "bad rank");
      }
      if (rank < 1) file_error(line, "rank must be at least 1");
    } else if (key == "relator" || key == "generator") {
      if (!group || !rank) file_error(line, "'group' and 'rank' must come first");
      (key == "relator" ? relators : generators).push_back(parse_triples(*group, rank, rest, line));
    } else {
      file_error(line, "unknown key '" + key + "'");
    }
  }
  if (!group) file_error(line, "missing 'group'");
  if (!rank) file_error(line, "missing 'rank'");
  if (generators.empty()) file_error(line, "no 'generator' lines");
  return {ZGModulePresentation(*group, rank, std::move(relators)), SubgroupSpec{std::move(generators)}};
}

std::vector<std::string> module_preset_names() { return {"ZGamma-free", "Z-trivial", "F2-ball2"}; }

ModuleFile module_preset(std::string_view name) {
  if (name == "ZGamma-free") return parse_module_file("group Z\nrank 1\ngenerator 0 e 1\n");
  if (name == "Z-trivial") return parse_module_file("group Z\nrank 1\nrelator 0 1 1 ; 0 e -1\ngenerator 0 e 1\n");
  if (name == "F2-ball2") {
    GroupSpec f2 = GroupSpec::parse("F2");
    std::string text = "group F2\nrank 1\n";
    for (const auto& g : ball(f2, 2)) text += "generator 0 " + f2.format(g) + " 1\n";
    return parse_module_file(text);
  }
  throw Error("unknown module preset '" + std::string(name) + "'");
}

// ---- truncation ------------------------------------------------------------

namespace {

int radius_of(const GroupSpec& group, const std::vector<GroupElement>& elements, int start = 0) {
  for (int r = start; r <= 256; ++r) {
    FiniteWindow b = ball(group, r);
    if (std::all_of(elements.begin(), elements.end(), [&](const auto& g) { return b.contains(g); })) return r;
    if (group.is_finite() && r > 0 && ball(group, r - 1).size() == b.size())
      throw Error("element outside its finite group");
  }
  throw Error("support radius above 256");
}

struct Coordinates {
  FiniteWindow ball;
  std::size_t rank;
  std::size_t block() const { return rank * ball.size(); }

  SparseRow row(const ModuleVector& v, std::size_t offset = 0) const {
    SparseRow r;
    for (std::size_t c = 0; c < v.size(); ++c)
      for (const auto& [g, x] : v[c].terms()) {
        auto i = ball.index_of(g);
        if (!i) throw Error("support leaves the truncation ball");
        r.emplace_back(static_cast<std::uint32_t>(offset + c * ball.size() + *i), x);
      }
    return r;
  }
};

// All t with t * supp(r) inside the ball.
std::vector<ModuleVector> relator_translates(const ZGModulePresentation& pres, const FiniteWindow& b) {
  const GroupSpec& G = pres.group();
  std::vector<ModuleVector> out;
  for (const auto& r : pres.relators()) {
    const auto supp = support(r);
    std::set<GroupElement> shifts;
    for (const auto& x : b) shifts.insert(G.multiply(x, G.inverse(supp.front())));
    for (const auto& t : shifts) {
      if (std::all_of(supp.begin(), supp.end(), [&](const auto& u) { return b.contains(G.multiply(t, u)); }))
        out.push_back(translate(t, r));
    }
  }
  return out;
}

}  // namespace

int minimal_radius(const ZGModulePresentation& pres, const SubgroupSpec& a, const FiniteWindow& window) {
  const GroupSpec& G = pres.group();
  if (!(window.spec() == G)) throw Error("window and module live over different groups");
  std::vector<GroupElement> all;
  for (const auto& s : window) {
    const GroupElement si = G.inverse(s);
    for (const auto& gen : a.generators)
      for (const auto& u : support(gen)) all.push_back(G.multiply(si, u));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return radius_of(G, all);
}

TruncatedSystem truncated_system(const ZGModulePresentation& pres, const SubgroupSpec& a, const FiniteWindow& window,
                                 int radius) {
  if (a.generators.empty()) throw Error("subgroup needs at least one generator");
  for (const auto& gen : a.generators) check_vector(pres.group(), pres.rank(), gen, "generator");
  if (radius < minimal_radius(pres, a, window)) throw Error("radius below the generator supports");
  const GroupSpec& G = pres.group();
  Coordinates co{ball(G, radius), static_cast<std::size_t>(pres.rank())};
  TruncatedSystem sys;
  sys.radius = radius;
  sys.columns = co.block();
  for (const auto& t : relator_translates(pres, co.ball)) sys.relations.push_back(co.row(t));
  const std::size_t m = a.generators.size();
  sys.generators.resize(window.size() * m);
  parallel_chunks(sys.generators.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      sys.generators[i] = co.row(translate(G.inverse(window[i / m]), a.generators[i % m]));
  });
  return sys;
}

std::size_t rank_modulo(const TruncatedSystem& system) {
  SparseEliminator e;
  for (const auto& r : system.relations) e.add(r);
  const std::size_t base = e.rank();
  for (const auto& r : system.generators) e.add(r);
  return e.rank() - base;
}

std::string WindowRank::describe() const {
  std::string out;
  for (const auto& [r, k] : by_radius) out += (out.empty() ? "" : ",") + ("R=" + std::to_string(r) + ":" + std::to_string(k));
  return out;
}

WindowRank window_subgroup_rank(const ZGModulePresentation& pres, const SubgroupSpec& a, const FiniteWindow& window,
                                const TruncationSchedule& schedule) {
  const int rmin = minimal_radius(pres, a, window);
  std::vector<int> radii;
  for (int r : schedule.radii)
    if (schedule.relative || r >= rmin) radii.push_back(schedule.relative ? rmin + r : r);
  if (radii.empty())
    throw Error("window/generator support (radius " + std::to_string(rmin) + ") exceeds every schedule radius");
  WindowRank out;
  for (int r : radii) {
    const std::size_t k = rank_modulo(truncated_system(pres, a, window, r));
    out.by_radius.emplace_back(r, k);
    out.rank = k;
    // Without relators the truncation is exact.
    if (pres.is_free()) return out.stable = true, out;
    if (out.by_radius.size() >= 2 && out.by_radius[out.by_radius.size() - 2].second == k) {
      out.stable = true;
      break;
    }
  }
  return out;
}

MeanRankResult naive_mean_rank_bracket(const ZGModulePresentation& pres, const SubgroupSpec& a,
                                       const WindowFamily& family, const TruncationSchedule& schedule) {
  MeanRankResult res;
  res.heuristic = !pres.is_free();
  Value lower = Rational(0);
  std::string lower_witness = "trivial";
  const bool all_zero = std::all_of(a.generators.begin(), a.generators.end(), [](const auto& g) { return is_zero(g); });
  if (pres.is_free() && !all_zero) {
    // Monomial generators: the translates F^-1 g of one monomial per hit
    // component are distinct basis vectors.
    bool monomial = true;
    std::set<std::size_t> comps;
    for (const auto& gen : a.generators) {
      std::size_t nonzero = 0;
      for (std::size_t c = 0; c < gen.size(); ++c)
        if (!gen[c].is_zero()) {
          nonzero += gen[c].terms().size();
          comps.insert(c);
        }
      monomial = monomial && nonzero <= 1;
    }
    if (monomial) {
      lower = Rational(static_cast<long>(comps.size()));
      lower_witness = "monomial generators in " + std::to_string(comps.size()) + " component(s)";
    } else if (pres.group().is_torsion_free_orderable()) {
      lower = Rational(1);
      lower_witness = "nonzero generator, no zero divisors";
    }
  }
  std::optional<Value> best;
  std::string best_window;
  for (const auto& w : family) {
    WindowRank wr = window_subgroup_rank(pres, a, w, schedule);
    Value ratio = Rational(static_cast<long>(wr.rank), static_cast<long>(w.size()));
    res.rows.push_back({"mrk", w.describe(), lower, ratio, wr.describe(), wr.stable ? "stable" : "UNSTABLE"});
    if (!wr.stable) continue;
    if (!best || ratio < *best) {
      best = ratio;
      best_window = w.describe() + " " + wr.describe();
    }
  }
  if (best) res.bracket = Bracket{lower, *best, lower_witness, best_window};
  return res;
}

// ---- sofic surrogate -------------------------------------------------------

SurrogateResult sofic_rank_surrogate(const ZGModulePresentation& pres, const SubgroupSpec& a, const SubgroupSpec& b,
                                     const FiniteWindow& window, const SoficMap& sigma, int radius,
                                     std::size_t max_columns) {
  const GroupSpec& G = pres.group();
  if (!(sigma.spec() == G) || !(window.spec() == G)) throw Error("sofic map, window and module differ in group");
  if (a.generators.empty() || b.generators.empty()) throw Error("subgroup needs at least one generator");
  for (const auto& gen : a.generators) check_vector(G, pres.rank(), gen, "generator");
  for (const auto& gen : b.generators) check_vector(G, pres.rank(), gen, "generator");
  std::vector<GroupElement> need;
  for (const auto& gen : a.generators)
    for (const auto& u : support(gen)) need.push_back(u);
  for (const auto& gen : b.generators)
    for (const auto& u : support(gen)) {
      need.push_back(u);
      for (const auto& s : window) need.push_back(G.multiply(s, u));
    }
  const int rmin = need.empty() ? 0 : radius_of(G, need);
  if (radius < 0) radius = rmin;
  if (radius < rmin) throw Error("radius below the supports of A, B and F B");

  const std::size_t d = sigma.degree();
  Coordinates co{ball(G, radius), static_cast<std::size_t>(pres.rank())};
  const std::size_t block = co.block();
  if (block * d > max_columns)
    throw Error("surrogate needs " + std::to_string(block * d) + " columns, limit " + std::to_string(max_columns));

  SparseEliminator e;
  const auto translates = relator_translates(pres, co.ball);
  for (std::size_t v = 0; v < d; ++v)
    for (const auto& t : translates) e.add(co.row(t, v * block));
  for (std::size_t v = 0; v < d; ++v)
    for (const auto& s : window) {
      const std::size_t w = sigma.apply(s, static_cast<std::uint32_t>(v));
      for (const auto& gen : b.generators) {
        SparseRow row = co.row(gen, v * block);
        for (auto [c, x] : co.row(translate(s, gen), w * block)) {
          auto it = std::find_if(row.begin(), row.end(), [&](const auto& p) { return p.first == c; });
          if (it == row.end())
            row.emplace_back(c, -x);
          else
            it->second -= x;
        }
        e.add(std::move(row));
      }
    }
  const std::size_t base = e.rank();
  for (std::size_t v = 0; v < d; ++v)
    for (const auto& gen : a.generators) e.add(co.row(gen, v * block));
  SurrogateResult out;
  out.rank = e.rank() - base;
  out.radius = radius;
  out.value = Rational(static_cast<long>(out.rank), static_cast<long>(d));
  return out;
}

}  // namespace meandim
