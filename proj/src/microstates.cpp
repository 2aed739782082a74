#include "meandim/microstates.hpp"

#include "meandim/parallel.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

namespace meandim {

std::string Microstate::describe() const {
  std::string out = "d=" + std::to_string(sites.size()) + ": [";
  for (std::size_t v = 0; v < sites.size(); ++v) out += (v ? "; " : "") + sites[v].describe();
  return out + "]";
}

void MicrostateSpaceSpec::validate() const {
  if (delta < 0) throw PreconditionError("delta must be >= 0");
  if (sys.is_cube()) throw PreconditionError("microstates need a finite alphabet");
  const GroupSpec& g = sys.group();
  if (!(sigma.spec() == g) || !(window.spec() == g) || (rho.window && !(rho.window->spec() == g)))
    throw Error("system, window, metric and sofic map must share one group");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes:
      return "YES";
    case Verdict::no:
      return "NO";
    case Verdict::undecided:
      break;
  }
  return "UNDECIDED";
}

namespace {

Enclosure square(const Enclosure& e) { return {e.lo * e.lo, e.hi * e.hi}; }

Verdict decide(const std::vector<Enclosure>& mean_square, const Rational& delta) {
  const Rational bound = delta * delta;
  bool all_below = true;
  for (const auto& e : mean_square) {
    if (e.lo > bound) return Verdict::no;
    all_below = all_below && e.hi <= bound;
  }
  return all_below ? Verdict::yes : Verdict::undecided;
}

// Per (s, v) distance rho(s phi(v), phi(sigma_s v)).
std::vector<std::vector<Enclosure>> equivariance_defects(const MicrostateSpaceSpec& spec, const Microstate& phi) {
  spec.validate();
  const std::size_t d = spec.sigma.degree();
  if (phi.degree() != d)
    throw Error("microstate has " + std::to_string(phi.degree()) + " sites, sofic map has degree " + std::to_string(d));
  std::vector<std::vector<Enclosure>> out;
  for (const auto& s : spec.window) {
    const Permutation p = spec.sigma.permutation(s);
    std::vector<Enclosure> row(d);
    parallel_chunks(d, [&](std::size_t begin, std::size_t end) {
      for (std::size_t v = begin; v < end; ++v)
        row[v] = eval_metric(spec.sys, spec.rho, act(s, phi.sites[v]), phi.sites[p(static_cast<std::uint32_t>(v))]);
    });
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

MembershipReport is_member(const MicrostateSpaceSpec& spec, const Microstate& phi) {
  MembershipReport r;
  const Rational d(static_cast<long>(phi.degree()));
  for (const auto& row : equivariance_defects(spec, phi)) {
    Enclosure sum = Enclosure::exact(0);
    for (const auto& e : row) sum += square(e);
    r.mean_square.push_back({sum.lo / d, sum.hi / d});
  }
  r.verdict = decide(r.mean_square, spec.delta);
  return r;
}

FiniteWindow metric_coordinates(const ShiftSystem& sys, const PseudometricSpec& rho) {
  const GroupSpec& g = sys.group();
  std::vector<GroupElement> ts = rho.window ? rho.window->elements() : std::vector<GroupElement>{g.identity()};
  std::vector<GroupElement> order{g.identity()};
  if (rho.base == PseudometricSpec::Base::induced && rho.depth > 0)
    order = Enumeration::first(g, static_cast<std::size_t>(rho.depth));
  std::vector<GroupElement> out{g.identity()};
  for (const auto& t : ts)
    for (const auto& u : order) {
      GroupElement c = g.multiply(g.inverse(t), u);
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
  return FiniteWindow(g, out);
}

FiniteWindow model_window(const MicrostateSpaceSpec& spec) {
  FiniteWindow c = metric_coordinates(spec.sys, spec.rho);
  return c.union_with(product_window(spec.window.inverse(), c));
}

Microstate pullback(const ShiftSystem& sys, const std::vector<int>& omega, const SoficMap& sigma,
                    const FiniteWindow& support) {
  if (!sys.is_full()) throw PreconditionError("pullbacks are only taken on full shifts");
  if (sys.is_cube()) throw PreconditionError("pullbacks need a finite alphabet");
  if (omega.size() != sigma.degree()) throw Error("labeling size differs from the sofic degree");
  for (int a : omega)
    if (a < 0 || a >= sys.alphabet().size()) throw Error("labeling uses a letter outside the alphabet");
  const GroupSpec& g = sys.group();
  std::vector<Permutation> perms;
  for (const auto& x : support) perms.push_back(sigma.permutation(g.inverse(x)));
  Microstate phi;
  for (std::uint32_t v = 0; v < omega.size(); ++v) {
    std::map<GroupElement, int> letters;
    for (std::size_t i = 0; i < support.size(); ++i) letters.emplace(support[i], omega[perms[i](v)]);
    phi.sites.emplace_back(g, std::move(letters), std::nullopt);
  }
  return phi;
}

LowerBoundReport map_lowerbound_check(const MicrostateSpaceSpec& spec, const Microstate& phi) {
  if (is_member(spec, phi).verdict != Verdict::yes)
    throw PreconditionError("map_lowerbound_check needs a certified member");
  LowerBoundReport r;
  r.required = (1 - spec.delta) * Rational(static_cast<long>(phi.degree()));
  for (const auto& row : equivariance_defects(spec, phi)) {
    // rho <= sqrt(delta) iff rho^2 <= delta; undecided sites are not counted.
    const auto n = static_cast<std::size_t>(
        std::count_if(row.begin(), row.end(), [&](const Enclosure& e) { return e.hi * e.hi <= spec.delta; }));
    r.counts.push_back(n);
    r.pass = r.pass && Rational(static_cast<long>(n)) >= r.required;
  }
  return r;
}

// ---- model -----------------------------------------------------------------

namespace {

struct Model {
  FiniteWindow support;
  std::vector<Pattern> patterns;
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<std::uint32_t>> perms;  // sigma_s per s in F
  std::vector<std::vector<std::uint32_t>> inverse_perms;
  // Squared defects scaled to integers: term(s, p, q) for s phi(v) = p-site
  // shifted by s against q-site.
  std::vector<std::vector<std::int64_t>> lo, hi;
  std::int64_t threshold = 0;  // delta^2 d, scaled
  std::vector<Enclosure> dist;  // rho(p-site, q-site)
  std::size_t k() const { return patterns.size(); }
};

Model build_model(const MicrostateSpaceSpec& spec) {
  spec.validate();
  const GroupSpec& g = spec.sys.group();
  Model m{model_window(spec), {}, {}, {}, {}, {}, {}, 0, {}};
  const Admissibility mode = g.is_integers() ? Admissibility::global : Admissibility::local;
  m.patterns = enumerate_patterns(spec.sys, m.support, mode);
  if (m.patterns.size() > 4096) throw Error("more than 4096 site patterns on the model window");
  for (std::size_t i = 0; i < m.patterns.size(); ++i) m.index.emplace(m.patterns[i].letters, static_cast<int>(i));
  std::vector<Configuration> conf;
  for (const auto& p : m.patterns) conf.push_back(Configuration::from_pattern(p, std::nullopt));
  const std::size_t k = m.k();
  const std::size_t d = spec.sigma.degree();

  std::vector<std::vector<Enclosure>> sq;
  for (const auto& s : spec.window) {
    const Permutation p = spec.sigma.permutation(s);
    m.perms.push_back(p.images());
    m.inverse_perms.push_back(p.inverse().images());
    std::vector<Enclosure> table(k * k);
    parallel_chunks(k, [&](std::size_t begin, std::size_t end) {
      for (std::size_t a = begin; a < end; ++a) {
        Configuration shifted = act(s, conf[a]);
        for (std::size_t b = 0; b < k; ++b) table[a * k + b] = square(eval_metric(spec.sys, spec.rho, shifted, conf[b]));
      }
    });
    sq.push_back(std::move(table));
  }
  m.dist.resize(k * k);
  parallel_chunks(k, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a)
      for (std::size_t b = 0; b < k; ++b) m.dist[a * k + b] = eval_metric(spec.sys, spec.rho, conf[a], conf[b]);
  });

  // Common denominator so the search adds integers.
  const Rational bound = spec.delta * spec.delta * Rational(static_cast<long>(d));
  BigInt den = boost::multiprecision::denominator(bound);
  for (const auto& t : sq)
    for (const auto& e : t) den = lcm(lcm(den, boost::multiprecision::denominator(e.lo)), boost::multiprecision::denominator(e.hi));
  const BigInt cap = BigInt(std::numeric_limits<std::int64_t>::max() / 4) / BigInt(d * spec.window.size() + 1);
  auto scaled = [&](const Rational& q) {
    BigInt n = boost::multiprecision::numerator(q) * (den / boost::multiprecision::denominator(q));
    if (n > cap) throw Error("metric values too fine for the integer search");
    return static_cast<std::int64_t>(n);
  };
  m.threshold = scaled(bound);
  for (const auto& t : sq) {
    m.lo.emplace_back();
    m.hi.emplace_back();
    for (const auto& e : t) {
      m.lo.back().push_back(scaled(e.lo));
      m.hi.back().push_back(scaled(e.hi));
    }
  }
  return m;
}

// Sums of the squared defects per s; lo prunes, hi certifies.
struct Sums {
  std::vector<std::int64_t> lo, hi;
};

enum class Leaf { member, undecided, outside };

Leaf classify(const Model& m, const Sums& s) {
  bool certified = true;
  for (std::size_t k = 0; k < s.lo.size(); ++k) {
    if (s.lo[k] > m.threshold) return Leaf::outside;
    certified = certified && s.hi[k] <= m.threshold;
  }
  return certified ? Leaf::member : Leaf::undecided;
}

Sums total_sums(const Model& m, const std::vector<int>& ids) {
  Sums s{std::vector<std::int64_t>(m.perms.size(), 0), std::vector<std::int64_t>(m.perms.size(), 0)};
  const std::size_t k = m.k();
  for (std::size_t j = 0; j < m.perms.size(); ++j)
    for (std::size_t v = 0; v < ids.size(); ++v) {
      const std::size_t cell = ids[v] * k + ids[m.perms[j][v]];
      s.lo[j] += m.lo[j][cell];
      s.hi[j] += m.hi[j][cell];
    }
  return s;
}

bool separated(const Model& m, const std::vector<int>& a, const std::vector<int>& b, const Rational& eps) {
  for (std::size_t v = 0; v < a.size(); ++v)
    if (m.dist[a[v] * m.k() + b[v]].lo >= eps) return true;
  return false;
}

// Greedy: keep each candidate separated from everything kept so far.
std::size_t greedy_separated(const Model& m, const std::vector<std::vector<int>>& candidates, const Rational& eps) {
  const std::size_t k = m.k();
  std::vector<char> sep(k * k);
  for (std::size_t i = 0; i < k * k; ++i) sep[i] = m.dist[i].lo >= eps;
  std::vector<const std::vector<int>*> kept;
  for (const auto& c : candidates) {
    bool ok = true;
    for (const auto* q : kept) {
      bool apart = false;
      for (std::size_t v = 0; v < c.size() && !apart; ++v) apart = sep[c[v] * k + (*q)[v]];
      if (!apart) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(&c);
  }
  return kept.size();
}

Value per_site(std::size_t count, std::size_t d) {
  if (count == 0) return Value::minus_infinity();
  return LogRatio(BigInt(count), static_cast<std::int64_t>(d));
}

MemberEnumeration enumerate_with(const Model& m, const MicrostateSpaceSpec& spec, std::size_t max_members,
                                 std::size_t max_nodes) {
  MemberEnumeration out{m.support, m.patterns, {}, 0, true};
  const std::size_t d = spec.sigma.degree();
  const std::size_t k = m.k();
  const std::size_t ns = m.perms.size();
  std::vector<int> ids(d, -1);
  Sums sums{std::vector<std::int64_t>(ns, 0), std::vector<std::int64_t>(ns, 0)};
  std::size_t nodes = 0;
  bool stop = false;

  std::function<void(std::size_t)> go = [&](std::size_t v) {
    if (stop) return;
    if (v == d) {
      switch (classify(m, sums)) {
        case Leaf::member:
          if (out.members.size() == max_members) {
            out.complete = false;
            stop = true;
            return;
          }
          out.members.push_back(ids);
          break;
        case Leaf::undecided:
          ++out.undecided;
          break;
        case Leaf::outside:
          break;
      }
      return;
    }
    for (std::size_t x = 0; x < k && !stop; ++x) {
      if (++nodes > max_nodes) {
        out.complete = false;
        stop = true;
        return;
      }
      ids[v] = static_cast<int>(x);
      std::vector<std::int64_t> add_lo(ns, 0), add_hi(ns, 0);
      bool pruned = false;
      for (std::size_t j = 0; j < ns; ++j) {
        const std::uint32_t w = m.perms[j][v];
        if (w <= v) {
          add_lo[j] += m.lo[j][x * k + ids[w]];
          add_hi[j] += m.hi[j][x * k + ids[w]];
        }
        const std::uint32_t u = m.inverse_perms[j][v];
        if (u < v) {
          add_lo[j] += m.lo[j][ids[u] * k + x];
          add_hi[j] += m.hi[j][ids[u] * k + x];
        }
        pruned = pruned || sums.lo[j] + add_lo[j] > m.threshold;
      }
      if (pruned) continue;
      for (std::size_t j = 0; j < ns; ++j) {
        sums.lo[j] += add_lo[j];
        sums.hi[j] += add_hi[j];
      }
      go(v + 1);
      for (std::size_t j = 0; j < ns; ++j) {
        sums.lo[j] -= add_lo[j];
        sums.hi[j] -= add_hi[j];
      }
    }
    ids[v] = -1;
  };
  go(0);
  return out;
}

// Maximum clique with greedy-coloring bounds.
class MaxClique {
 public:
  explicit MaxClique(std::vector<std::vector<bool>> adj) : adj_(std::move(adj)) {}
  std::size_t solve() {
    std::vector<int> all(adj_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    expand(all, 0);
    return best_;
  }

 private:
  std::vector<std::vector<bool>> adj_;
  std::size_t best_ = 0;

  void expand(const std::vector<int>& cand, std::size_t size) {
    // Color classes in order; color[i] bounds the clique within cand[0..i].
    std::vector<int> order;
    std::vector<std::size_t> color;
    std::vector<std::vector<int>> classes;
    for (int v : cand) {
      std::size_t c = 0;
      while (c < classes.size() &&
             std::any_of(classes[c].begin(), classes[c].end(), [&](int u) { return adj_[u][v]; }))
        ++c;
      if (c == classes.size()) classes.emplace_back();
      classes[c].push_back(v);
    }
    for (std::size_t c = 0; c < classes.size(); ++c)
      for (int v : classes[c]) {
        order.push_back(v);
        color.push_back(c + 1);
      }
    for (std::size_t i = order.size(); i-- > 0;) {
      if (size + color[i] <= best_) return;
      const int v = order[i];
      std::vector<int> next;
      for (std::size_t j = 0; j < i; ++j)
        if (adj_[v][order[j]]) next.push_back(order[j]);
      if (next.empty())
        best_ = std::max(best_, size + 1);
      else
        expand(next, size + 1);
    }
  }
};

}  // namespace

Microstate MemberEnumeration::microstate(std::size_t i) const {
  Microstate phi;
  for (int id : members.at(i)) phi.sites.push_back(Configuration::from_pattern(patterns[id], std::nullopt));
  return phi;
}

MemberEnumeration enumerate_members(const MicrostateSpaceSpec& spec, std::size_t max_members, std::size_t max_nodes) {
  return enumerate_with(build_model(spec), spec, max_members, max_nodes);
}

std::string SeparatedMicrostates::describe() const {
  return "count=" + std::to_string(count) + " of " + std::to_string(candidates) + " (" + method + (partial ? ", partial" : "") +
         ") per-site " + per_site.to_string();
}

SeparatedMicrostates count_separated_microstates(const MicrostateSpaceSpec& spec, const Rational& eps,
                                                 std::size_t budget) {
  if (eps <= 0) throw PreconditionError("eps must be positive");
  const Model m = build_model(spec);
  const std::size_t d = spec.sigma.degree();
  SeparatedMicrostates out;
  std::vector<std::vector<int>> candidates;
  if (spec.sys.is_full()) {
    out.method = "pullback family, greedy";
    const GroupSpec& g = spec.sys.group();
    const int a = spec.sys.alphabet().size();
    std::vector<Permutation> perms;
    for (const auto& x : m.support) perms.push_back(spec.sigma.permutation(g.inverse(x)));
    std::vector<int> omega(d, 0);
    std::vector<int> letters(m.support.size());
    while (true) {
      if (out.candidates == budget) {
        out.partial = true;
        break;
      }
      ++out.candidates;
      std::vector<int> ids(d);
      for (std::uint32_t v = 0; v < d; ++v) {
        for (std::size_t i = 0; i < letters.size(); ++i) letters[i] = omega[perms[i](v)];
        ids[v] = m.index.at(letters);
      }
      if (classify(m, total_sums(m, ids)) == Leaf::member) candidates.push_back(std::move(ids));
      // Next labeling, last site fastest.
      std::size_t v = d;
      while (v > 0 && omega[v - 1] == a - 1) omega[--v] = 0;
      if (v == 0) break;
      ++omega[v - 1];
    }
  } else {
    out.method = "model members, greedy";
    MemberEnumeration e = enumerate_with(m, spec, budget, 50'000'000);
    out.candidates = e.members.size();
    out.partial = !e.complete;
    candidates = std::move(e.members);
  }
  out.count = greedy_separated(m, candidates, eps);
  out.per_site = per_site(out.count, d);
  return out;
}

SeparatedMicrostates max_separated_microstates(const MicrostateSpaceSpec& spec, const Rational& eps,
                                               std::size_t budget) {
  if (eps <= 0) throw PreconditionError("eps must be positive");
  const Model m = build_model(spec);
  MemberEnumeration e = enumerate_with(m, spec, budget, 50'000'000);
  if (!e.complete) throw Error("member enumeration exceeded its budget");
  const std::size_t n = e.members.size();
  if (n > 512) throw Error("more than 512 members for the exact search");
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) adj[i][j] = adj[j][i] = separated(m, e.members[i], e.members[j], eps);
  SeparatedMicrostates out;
  out.method = "all model members, maximum clique";
  out.candidates = n;
  out.count = MaxClique(std::move(adj)).solve();
  out.per_site = per_site(out.count, spec.sigma.degree());
  return out;
}

}  // namespace meandim
