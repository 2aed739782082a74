#include "meandim/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace meandim {

namespace {

Rational ratio(std::size_t a, std::size_t b) {
  return Rational(static_cast<long long>(a), static_cast<long long>(b));
}

Value log_value(const BigInt& count, std::size_t size) {
  if (count == 0) return Value::minus_infinity();
  return LogRatio(count, static_cast<std::int64_t>(size));
}

template <typename Better>
void keep_best(Bracket& b, const Value& v, const std::string& witness, bool first, Better better) {
  if (first || better(v, b.upper)) {
    b.upper = v;
    b.upper_witness = witness;
  }
}

}  // namespace

// ---- separated sets --------------------------------------------------------

std::size_t separated_exact(const DistanceMatrix& dist, const Rational& eps, std::size_t limit) {
  const std::size_t n = dist.size();
  if (n > limit || n > 64) throw Error("separated_exact: " + std::to_string(n) + " points exceed the limit " + std::to_string(limit));
  if (n == 0) return 0;
  std::vector<std::uint64_t> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && dist[i][j] >= eps) adj[i] |= std::uint64_t{1} << j;
  std::size_t best = 0;
  auto expand = [&](auto&& self, std::size_t size, std::uint64_t cand) -> void {
    if (cand == 0) {
      best = std::max(best, size);
      return;
    }
    while (cand) {
      if (size + static_cast<std::size_t>(__builtin_popcountll(cand)) <= best) return;
      const int v = __builtin_ctzll(cand);
      cand &= cand - 1;
      self(self, size + 1, cand & adj[v]);
    }
  };
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  expand(expand, 0, all);
  return best;
}

std::vector<std::size_t> separated_greedy(const DistanceMatrix& dist, const Rational& eps) {
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    bool far = true;
    for (auto j : chosen)
      if (dist[i][j] < eps) {
        far = false;
        break;
      }
    if (far) chosen.push_back(i);
  }
  return chosen;
}

DistanceMatrix line_distances(const std::vector<Rational>& points) {
  DistanceMatrix d(points.size(), std::vector<Rational>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j) d[i][j] = abs(points[i] - points[j]);
  return d;
}

// ---- entropy ---------------------------------------------------------------

namespace {

Admissibility best_mode(const ShiftSystem& sys) {
  return sys.group().is_integers() ? Admissibility::global : Admissibility::local;
}

FiniteWindow first_coordinates(const GroupSpec& g, std::size_t w) {
  return FiniteWindow(g, Enumeration::first(g, w), "s_1..s_" + std::to_string(w));
}

// Least w with diam 2^-w < eps.
int tail_depth(const Rational& diam, const Rational& eps) {
  int w = 0;
  while (diam * pow2(-w) >= eps) ++w;
  return w;
}

}  // namespace

SeparatedCount separated_count(const ShiftSystem& sys, const PseudometricSpec& rho, const Rational& eps,
                               const FiniteWindow& window) {
  if (sys.is_cube()) throw Error("separated counts need a finite alphabet");
  if (eps <= 0) throw Error("eps must be positive");
  const AlphabetSpace& alpha = sys.alphabet();
  if (alpha.size() == 1 || eps > alpha.diameter()) return {1, true, "eps exceeds the diameter"};
  const Admissibility mode = best_mode(sys);
  const bool counts_are_exact = mode == Admissibility::global || sys.is_full();
  const std::string mode_note = std::string(" (") + to_string(mode) + " patterns)";

  if (rho.base == PseudometricSpec::Base::induced) {
    const int w = tail_depth(alpha.diameter(), eps);
    const FiniteWindow coords = product_window(window.inverse(), first_coordinates(sys.group(), w));
    return {count_patterns(sys, coords, mode), false,
            "patterns on F^-1 s_1..s_" + std::to_string(w) + " (" + std::to_string(coords.size()) + " cells)" + mode_note};
  }

  const FiniteWindow coords = window.inverse();
  const BigInt total = count_patterns(sys, coords, mode);
  if (eps <= *alpha.min_gap()) return {total, counts_are_exact, "patterns on F^-1" + mode_note};
  if (total <= 20) {
    auto pats = enumerate_patterns(sys, coords, mode);
    DistanceMatrix d(pats.size(), std::vector<Rational>(pats.size(), 0));
    for (std::size_t i = 0; i < pats.size(); ++i)
      for (std::size_t j = 0; j < pats.size(); ++j)
        for (std::size_t c = 0; c < coords.size(); ++c)
          d[i][j] = std::max(d[i][j], alpha.distance(pats[i].letters[c], pats[j].letters[c]));
    return {BigInt(separated_exact(d, eps)), counts_are_exact, "exact separated subset of patterns on F^-1" + mode_note};
  }
  return {total, false, "pattern count on F^-1 bounds N" + mode_note};
}

InvariantResult naive_eps_entropy(const ShiftSystem& sys, const PseudometricSpec& rho, const Rational& eps,
                                  const WindowFamily& family) {
  if (sys.is_cube()) throw Error("entropy needs a finite alphabet");
  if (!(family.spec() == sys.group())) throw Error("window family belongs to a different group");
  InvariantResult out;
  bool first = true;
  for (const auto& f : family) {
    SeparatedCount c = separated_count(sys, rho, eps, f);
    Value v = log_value(c.count, f.size());
    out.rows.push_back({"naive_eps_entropy", f.describe(), c.exact ? v : Value(Rational(0)), v,
                        "N=" + to_string(c.count) + " via " + c.method, c.exact ? "exact" : "upper"});
    keep_best(out.bracket, v, f.describe(), first, [](const Value& a, const Value& b) { return a < b; });
    first = false;
  }
  const AlphabetSpace& alpha = sys.alphabet();
  const bool cylinder_exact = sys.is_full() && rho.base == PseudometricSpec::Base::disc &&
                              (alpha.size() == 1 || eps <= *alpha.min_gap());
  if (cylinder_exact) {
    out.bracket.lower = LogRatio(alpha.size(), 1);
    out.bracket.lower_witness = "full shift: N = k^|F| on every window";
  } else {
    out.bracket.lower = Rational(0);
    out.bracket.lower_witness = "no exact-count argument";
  }
  return out;
}

// ---- mean dimension --------------------------------------------------------

FiniteWindow embedding_window(const GroupSpec& group, const Rational& eps, const FiniteWindow& window) {
  const int w = tail_depth(1, eps);
  if (w == 0) return FiniteWindow(group, {group.identity()}, "none");
  return product_window(window.inverse(), first_coordinates(group, w));
}

Bracket wdim_bracket(const ShiftSystem& sys, const Rational& eps, const FiniteWindow& window,
                     const WdimOptions& options) {
  if (!sys.is_cube()) throw Error("wdim_bracket needs a cube alphabet");
  if (eps <= 0) throw Error("eps must be positive");
  const int m = sys.cube_space().dim;
  const Rational eps0 = options.eps0.value_or(Rational(1, 4));
  Bracket b;
  const int w = tail_depth(1, eps);
  if (w == 0) {
    b.upper = Rational(0);
    b.upper_witness = "constant map: eps exceeds the diameter";
  } else {
    const FiniteWindow coords = embedding_window(sys.group(), eps, window);
    b.upper = Rational(static_cast<long long>(m) * static_cast<long long>(coords.size()));
    b.upper_witness = "projection to " + std::to_string(coords.size()) + " coordinates (depth " + std::to_string(w) + ")";
  }
  if (eps < eps0) {
    const int slope = options.cube_refinement ? m : m - 1;
    b.lower = Rational(static_cast<long long>(window.size()) * slope);
    b.lower_witness = options.cube_refinement ? "|F| m (sup-metric cube refinement, external)" : "|F| (m - 1)";
  } else {
    b.lower = Rational(0);
    b.lower_witness = "eps >= eps0";
  }
  return b;
}

Rational stabdim(const std::vector<AlphabetFactor>& factors) {
  long long dim = 0;
  for (const auto& f : factors) {
    if (f.size < 1) throw Error("alphabet factors must be nonempty");
    if (f.cube) dim += f.size;
  }
  return Rational(dim);
}

InvariantResult naive_mdim_bracket(const ShiftSystem& sys, const Rational& eps, const WindowFamily& family,
                                   const WdimOptions& options) {
  if (!(family.spec() == sys.group())) throw Error("window family belongs to a different group");
  InvariantResult out;
  if (!sys.is_cube()) {
    for (const auto& f : family) out.rows.push_back({"naive_mdim", f.describe(), Rational(0), Rational(0), "totally disconnected", "exact"});
    out.bracket = {Rational(0), Rational(0), "finite alphabet", "finite alphabet"};
    return out;
  }
  bool first = true;
  for (const auto& f : family) {
    Bracket w = wdim_bracket(sys, eps, f, options);
    const Rational size = ratio(f.size(), 1);
    Value lo = Rational(w.lower.rational() / size), hi = Rational(w.upper.rational() / size);
    out.rows.push_back({"naive_mdim", f.describe(), lo, hi, w.upper_witness, "bracket"});
    keep_best(out.bracket, hi, f.describe(), first, [](const Value& a, const Value& b) { return a < b; });
    first = false;
  }
  const Rational eps0 = options.eps0.value_or(Rational(1, 4));
  const int m = sys.cube_space().dim;
  if (eps < eps0) {
    out.bracket.lower = Rational(options.cube_refinement ? m : m - 1);
    out.bracket.lower_witness = options.cube_refinement ? "slope m, all windows (external refinement)" : "slope m - 1, all windows";
  } else {
    out.bracket.lower = Rational(0);
    out.bracket.lower_witness = "eps >= eps0";
  }
  return out;
}

InvariantResult amplification(const FiniteWindow& s, const WindowFamily& family) {
  if (!(family.spec() == s.spec())) throw Error("window family belongs to a different group");
  InvariantResult out;
  bool first = true;
  for (const auto& f : family) {
    const std::size_t sf = product_window(s, f).size();
    Value v = ratio(sf, f.size());
    out.rows.push_back({"amplification", f.describe(), v, v, "|SF|=" + std::to_string(sf) + " |F|=" + std::to_string(f.size()), "exact"});
    keep_best(out.bracket, v, f.describe(), first, [](const Value& a, const Value& b) { return a < b; });
    first = false;
  }
  out.bracket.lower = out.bracket.upper;
  out.bracket.lower_witness = out.bracket.upper_witness;
  return out;
}

// ---- orbit capacity --------------------------------------------------------

namespace {

FiniteWindow cylinder_support(const std::vector<Pattern>& cylinders) {
  FiniteWindow u = cylinders.front().window;
  for (const auto& c : cylinders) u = u.union_with(c.window);
  return u;
}

std::size_t visits_on_line(const ShiftSystem& sys, const std::vector<Pattern>& cylinders, const FiniteWindow& window,
                           Admissibility mode) {
  const GroupSpec& g = sys.group();
  const LineShift line(sys);
  const int k = line.letters();
  const std::size_t mem_span = static_cast<std::size_t>(line.span() - 1);
  struct Cyl {
    std::vector<std::int64_t> cells;
    std::vector<int> letters;
  };
  std::vector<Cyl> cyls;
  std::int64_t u_min = 0, u_max = 0;
  bool any = false;
  for (const auto& c : cylinders) {
    Cyl cy;
    for (std::size_t i = 0; i < c.window.size(); ++i) {
      const std::int64_t u = g.to_integer(c.window[i]);
      cy.cells.push_back(u);
      cy.letters.push_back(c.letters[i]);
      u_min = any ? std::min(u_min, u) : u;
      u_max = any ? std::max(u_max, u) : u;
      any = true;
    }
    cyls.push_back(std::move(cy));
  }
  // s in F reads cells u - s; it is scored when position u_max - s is reached.
  std::map<std::int64_t, std::vector<std::int64_t>> trigger;
  std::int64_t lo = 0, hi = 0;
  bool first = true;
  for (const auto& s : window) {
    const std::int64_t t = g.to_integer(s);
    trigger[u_max - t].push_back(t);
    lo = first ? u_min - t : std::min(lo, u_min - t);
    hi = first ? u_max - t : std::max(hi, u_max - t);
    first = false;
  }
  hi = std::max<std::int64_t>(hi, lo + static_cast<std::int64_t>(mem_span) - 1);
  const std::size_t memory = std::max<std::size_t>(mem_span, static_cast<std::size_t>(u_max - u_min));
  const bool global = mode == Admissibility::global;

  std::map<std::vector<int>, long> states{{{}, 0}};
  for (std::int64_t p = lo; p <= hi; ++p) {
    std::map<std::vector<int>, long> next;
    const std::size_t len = static_cast<std::size_t>(p - lo + 1);
    auto trig = trigger.find(p);
    for (const auto& [state, score] : states) {
      for (int a = 0; a < k; ++a) {
        std::vector<int> w = state;
        w.push_back(a);
        if (line.violates_at_end(w)) continue;
        long gained = 0;
        if (trig != trigger.end()) {
          for (std::int64_t t : trig->second) {
            bool hit = false;
            for (const auto& cy : cyls) {
              bool match = true;
              for (std::size_t i = 0; i < cy.cells.size() && match; ++i) {
                const std::int64_t back = p - (cy.cells[i] - t);
                match = w[w.size() - 1 - back] == cy.letters[i];
              }
              hit = hit || match;
            }
            gained += hit;
          }
        }
        if (w.size() > memory) w.erase(w.begin());
        if (global && len == mem_span && mem_span > 0) {
          std::vector<int> head(w.end() - mem_span, w.end());
          if (!line.globally_admissible(head)) continue;
        }
        auto [it, inserted] = next.try_emplace(w, score + gained);
        if (!inserted) it->second = std::max(it->second, score + gained);
      }
    }
    states = std::move(next);
  }
  long best = -1;
  for (const auto& [state, score] : states) {
    if (global) {
      std::vector<int> tail(state.end() - std::min(state.size(), mem_span), state.end());
      if (!line.globally_admissible(tail)) continue;
    }
    best = std::max(best, score);
  }
  if (best < 0) throw Error("the subshift has no admissible pattern on " + window.describe());
  return static_cast<std::size_t>(best);
}

}  // namespace

std::size_t orbit_visits(const ShiftSystem& sys, const std::vector<Pattern>& cylinders, const FiniteWindow& window,
                         Admissibility mode, std::string* method) {
  if (sys.is_cube()) throw Error("orbit capacity needs a finite alphabet");
  if (cylinders.empty()) {
    if (method) *method = "empty set";
    return 0;
  }
  for (const auto& c : cylinders)
    if (!(c.window.spec() == sys.group())) throw Error("cylinder over a different group");
  if (sys.group().is_integers()) {
    if (method) *method = std::string("dynamic programming, ") + to_string(mode) + " patterns";
    return visits_on_line(sys, cylinders, window, mode);
  }
  const GroupSpec& g = sys.group();
  const FiniteWindow dep = product_window(window.inverse(), cylinder_support(cylinders));
  if (method) *method = "exhaustive, local patterns on F^-1 supp(A)";
  // cells[s][j][i] = index in dep of s^-1 u_i for cylinder j
  std::vector<std::vector<std::vector<std::size_t>>> cells;
  for (const auto& s : window) {
    std::vector<std::vector<std::size_t>> per;
    for (const auto& c : cylinders) {
      std::vector<std::size_t> idx;
      for (const auto& u : c.window) idx.push_back(*dep.index_of(g.multiply(g.inverse(s), u)));
      per.push_back(std::move(idx));
    }
    cells.push_back(std::move(per));
  }
  std::size_t best = 0;
  bool seen = false;
  for (const auto& p : enumerate_patterns(sys, dep, Admissibility::local)) {
    seen = true;
    std::size_t score = 0;
    for (const auto& per : cells) {
      bool hit = false;
      for (std::size_t j = 0; j < cylinders.size() && !hit; ++j) {
        bool match = true;
        for (std::size_t i = 0; i < per[j].size() && match; ++i) match = p.letters[per[j][i]] == cylinders[j].letters[i];
        hit = match;
      }
      score += hit;
    }
    best = std::max(best, score);
  }
  if (!seen) throw Error("the subshift has no admissible pattern on " + dep.describe());
  return best;
}

InvariantResult orbit_capacity(const ShiftSystem& sys, const std::vector<Pattern>& cylinders, const WindowFamily& family,
                               Admissibility mode) {
  if (!(family.spec() == sys.group())) throw Error("window family belongs to a different group");
  InvariantResult out;
  bool first = true;
  for (const auto& f : family) {
    std::string method;
    const std::size_t visits = orbit_visits(sys, cylinders, f, mode, &method);
    Value v = ratio(visits, f.size());
    out.rows.push_back({"orbit_capacity", f.describe(), Value(Rational(0)), v,
                        "sup visits " + std::to_string(visits) + " via " + method, "upper"});
    keep_best(out.bracket, v, f.describe(), first, [](const Value& a, const Value& b) { return a < b; });
    first = false;
  }

  // Lower bounds valid for every window: a fixed point in A, or for Z the
  // visit frequency of a periodic point (averaging its shifts).
  Rational lower = 0;
  std::string witness = "none";
  const GroupSpec& g = sys.group();
  const int k = sys.alphabet().size();
  auto in_cylinder = [&](const Pattern& c, auto letter_at) {
    for (std::size_t i = 0; i < c.window.size(); ++i)
      if (letter_at(c.window[i]) != c.letters[i]) return false;
    return true;
  };
  if (!cylinders.empty()) {
    for (int a = 0; a < k; ++a) {
      if (!admits(sys, Configuration::constant(g, a))) continue;
      for (const auto& c : cylinders)
        if (in_cylinder(c, [&](const GroupElement&) { return a; }) && lower < 1) {
          lower = 1;
          witness = "fixed point " + std::to_string(a);
        }
    }
    if (g.is_integers() && lower < 1) {
      const LineShift line(sys);
      for (int p = 1; p <= 12; ++p) {
        double total = std::pow(static_cast<double>(k), p);
        if (total > 20000) break;
        std::vector<int> w(p, 0);
        while (true) {
          std::vector<int> rep;
          for (int i = 0; i < p + line.span(); ++i) rep.push_back(w[i % p]);
          if (line.locally_admissible(rep)) {
            std::size_t hits = 0;
            for (int t = 0; t < p; ++t) {
              auto letter_at = [&](const GroupElement& u) {
                const std::int64_t idx = ((g.to_integer(u) - t) % p + p) % p;
                return w[idx];
              };
              bool hit = false;
              for (const auto& c : cylinders) hit = hit || in_cylinder(c, letter_at);
              hits += hit;
            }
            const Rational freq = ratio(hits, p);
            if (freq > lower) {
              lower = freq;
              witness = "periodic point of period " + std::to_string(p) + ": ";
              for (int a : w) witness += std::to_string(a);
            }
          }
          int i = p - 1;
          while (i >= 0 && w[i] == k - 1) w[i--] = 0;
          if (i < 0) break;
          ++w[i];
        }
      }
    }
  }
  out.bracket.lower = lower;
  out.bracket.lower_witness = witness;
  return out;
}

// ---- decay -----------------------------------------------------------------

DecayResult decay_diagnostic(const ShiftSystem& sys, const PseudometricSpec& rho, std::vector<Rational> eps_grid,
                             const WindowFamily& family) {
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());
  DecayResult out;
  const FiniteWindow e(sys.group(), {sys.group().identity()});
  for (const auto& eps : eps_grid) {
    if (eps <= 0 || eps >= 1) throw Error("decay grid values must lie in (0,1)");
    const double log_eps = std::fabs(std::log(to_double(eps)));
    const double h = naive_eps_entropy(sys, rho, eps, family).bracket.upper.approx();
    const double n = log_value(separated_count(sys, rho, eps, e).count, 1).approx();
    DecayRow row{eps, h / log_eps, n / log_eps, 0};
    row.product = row.entropy_ratio * row.capacity_ratio;
    out.rows.push_back(row);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (out.rows[i].product > out.rows[i - 1].product + 1e-12) monotone = false;
  const bool all_zero = std::all_of(out.rows.begin(), out.rows.end(), [](const DecayRow& r) { return r.product == 0; });
  out.trends_to_zero =
      !out.rows.empty() && (all_zero || (monotone && out.rows.back().product < out.rows.front().product));
  return out;
}

}  // namespace meandim
