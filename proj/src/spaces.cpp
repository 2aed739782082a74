#include "meandim/spaces.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace meandim {

// ---- alphabets -------------------------------------------------------------

AlphabetSpace::AlphabetSpace(std::vector<std::vector<Rational>> metric) : metric_(std::move(metric)) {
  const std::size_t k = metric_.size();
  if (k == 0) throw Error("alphabet must have at least one letter");
  for (const auto& row : metric_)
    if (row.size() != k) throw Error("alphabet metric must be square");
  for (std::size_t a = 0; a < k; ++a) {
    if (metric_[a][a] != 0) throw Error("alphabet metric must vanish on the diagonal");
    for (std::size_t b = 0; b < k; ++b) {
      if (metric_[a][b] != metric_[b][a]) throw Error("alphabet metric must be symmetric");
      if (a != b && metric_[a][b] <= 0) throw Error("alphabet metric must separate distinct letters");
      for (std::size_t c = 0; c < k; ++c)
        if (metric_[a][c] > metric_[a][b] + metric_[b][c])
          throw Error("alphabet metric violates the triangle inequality at (" + std::to_string(a) + ", " +
                      std::to_string(b) + ", " + std::to_string(c) + ")");
    }
  }
}

AlphabetSpace AlphabetSpace::discrete(int k) {
  if (k < 1) throw Error("alphabet must have at least one letter");
  std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k, 1));
  for (int a = 0; a < k; ++a) m[a][a] = 0;
  return AlphabetSpace(std::move(m));
}

AlphabetSpace AlphabetSpace::on_line(const std::vector<Rational>& points) {
  std::vector<std::vector<Rational>> m(points.size(), std::vector<Rational>(points.size()));
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = 0; b < points.size(); ++b) m[a][b] = abs(points[a] - points[b]);
  return AlphabetSpace(std::move(m));
}

Rational AlphabetSpace::diameter() const {
  Rational d = 0;
  for (const auto& row : metric_)
    for (const auto& x : row) d = std::max(d, x);
  return d;
}

std::optional<Rational> AlphabetSpace::min_gap() const {
  std::optional<Rational> gap;
  for (std::size_t a = 0; a < metric_.size(); ++a)
    for (std::size_t b = a + 1; b < metric_.size(); ++b)
      if (!gap || metric_[a][b] < *gap) gap = metric_[a][b];
  return gap;
}

// ---- patterns and systems --------------------------------------------------

std::optional<int> Pattern::at(const GroupElement& g) const {
  auto i = window.index_of(g);
  if (!i) return std::nullopt;
  return letters[*i];
}

std::string Pattern::describe() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < window.size(); ++i)
    out << (i ? "," : "") << window.spec().format(window[i]) << ':' << letters[i];
  out << '}';
  return out.str();
}

const char* to_string(Admissibility a) { return a == Admissibility::local ? "local" : "global"; }

ShiftSystem::ShiftSystem(GroupSpec group, std::optional<AlphabetSpace> alphabet, std::optional<CubeSpace> cube,
                         std::vector<Pattern> forbidden)
    : group_(std::move(group)), alphabet_(std::move(alphabet)), cube_(cube), forbidden_(std::move(forbidden)) {}

ShiftSystem ShiftSystem::full(GroupSpec group, AlphabetSpace alphabet) {
  return ShiftSystem(std::move(group), std::move(alphabet), std::nullopt, {});
}

ShiftSystem ShiftSystem::subshift(GroupSpec group, AlphabetSpace alphabet, std::vector<Pattern> forbidden) {
  for (const auto& p : forbidden) {
    if (!(p.window.spec() == group)) throw Error("forbidden pattern over a different group");
    if (p.letters.size() != p.window.size()) throw Error("forbidden pattern letters do not match its window");
    for (int a : p.letters)
      if (a < 0 || a >= alphabet.size()) throw Error("forbidden pattern uses letter " + std::to_string(a));
  }
  return ShiftSystem(std::move(group), std::move(alphabet), std::nullopt, std::move(forbidden));
}

ShiftSystem ShiftSystem::cube(GroupSpec group, CubeSpace cube) {
  if (cube.dim < 1) throw Error("cube dimension must be >= 1");
  return ShiftSystem(std::move(group), std::nullopt, cube, {});
}

ShiftSystem ShiftSystem::golden_mean() {
  auto z = GroupSpec::lattice(1);
  Pattern p{interval(z, 0, 1), {1, 1}};
  return subshift(z, AlphabetSpace::discrete(2), {p});
}

const AlphabetSpace& ShiftSystem::alphabet() const {
  if (!alphabet_) throw Error("cube systems have no finite alphabet");
  return *alphabet_;
}

const CubeSpace& ShiftSystem::cube_space() const {
  if (!cube_) throw Error("not a cube system");
  return *cube_;
}

std::string ShiftSystem::describe() const {
  std::string g = " over " + group_.descriptor();
  if (cube_) return "cube:" + std::to_string(cube_->dim) + g;
  std::string base = "full:" + std::to_string(alphabet_->size());
  if (forbidden_.empty()) return base + g;
  std::string out = "subshift:" + std::to_string(alphabet_->size()) + " forbid";
  for (const auto& p : forbidden_) out += " " + p.describe();
  return out + g;
}

// ---- configurations --------------------------------------------------------

Configuration::Configuration(GroupSpec group, std::map<GroupElement, int> letters, std::optional<int> tail)
    : group_(std::move(group)), tail_(tail) {
  for (auto& [g, a] : letters)
    if (!tail_ || a != *tail_) letters_.emplace(g, a);
}

Configuration Configuration::constant(GroupSpec group, int letter) { return Configuration(std::move(group), {}, letter); }

Configuration Configuration::from_pattern(const Pattern& p, std::optional<int> tail) {
  std::map<GroupElement, int> letters;
  for (std::size_t i = 0; i < p.window.size(); ++i) letters.emplace(p.window[i], p.letters[i]);
  return Configuration(p.window.spec(), std::move(letters), tail);
}

std::optional<int> Configuration::at(const GroupElement& g) const {
  auto it = letters_.find(g);
  if (it != letters_.end()) return it->second;
  return tail_;
}

std::string Configuration::describe() const {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const auto& [g, a] : letters_) {
    out << (first ? "" : ",") << group_.format(g) << ':' << a;
    first = false;
  }
  out << "} tail " << (tail_ ? std::to_string(*tail_) : "?");
  return out.str();
}

Configuration act(const GroupElement& s, const Configuration& x) {
  std::map<GroupElement, int> moved;
  for (const auto& [u, a] : x.letters()) moved.emplace(x.group().multiply(s, u), a);
  return Configuration(x.group(), std::move(moved), x.tail());
}

bool admits(const ShiftSystem& sys, const Configuration& x) {
  const GroupSpec& g = sys.group();
  for (const auto& p : sys.forbidden()) {
    if (x.tail() && std::all_of(p.letters.begin(), p.letters.end(), [&](int a) { return a == *x.tail(); }))
      return false;
    std::set<GroupElement> translates;
    for (const auto& [w, a] : x.letters())
      for (const auto& u : p.window) translates.insert(g.multiply(w, g.inverse(u)));
    for (const auto& t : translates) {
      bool hit = true;
      for (std::size_t i = 0; i < p.window.size() && hit; ++i) {
        auto a = x.at(g.multiply(t, p.window[i]));
        hit = a && *a == p.letters[i];
      }
      if (hit) return false;
    }
  }
  return true;
}

// ---- metrics ---------------------------------------------------------------

std::string PseudometricSpec::describe() const {
  std::string out = base == Base::disc ? "disc" : "induced(depth=" + std::to_string(depth) + ")";
  if (window) out += " on " + window->describe();
  return out;
}

namespace {

Enclosure letter_distance(const AlphabetSpace& alpha, const std::optional<int>& a, const std::optional<int>& b) {
  if (a && b) return Enclosure::exact(alpha.distance(*a, *b));
  return {0, alpha.diameter()};
}

// Distance between sx and sy under the base pseudometric.
Enclosure base_distance(const ShiftSystem& sys, const PseudometricSpec& rho, const std::vector<GroupElement>& order,
                        const Configuration& x, const Configuration& y, const GroupElement& s) {
  const GroupSpec& g = sys.group();
  const AlphabetSpace& alpha = sys.alphabet();
  const GroupElement s_inv = g.inverse(s);
  if (rho.base == PseudometricSpec::Base::disc) return letter_distance(alpha, x.at(s_inv), y.at(s_inv));
  Enclosure total = Enclosure::exact(0);
  for (std::size_t n = 0; n < order.size(); ++n) {
    const GroupElement t = g.multiply(s_inv, order[n]);
    Enclosure term = letter_distance(alpha, x.at(t), y.at(t));
    const Rational w = pow2(-static_cast<int>(n + 1));
    total += Enclosure{term.lo * w, term.hi * w};
  }
  // With equal known tails the omitted coordinates contribute nothing unless a
  // differing cell lies beyond the truncation.
  bool tail_vanishes = x.tail() && y.tail() && *x.tail() == *y.tail();
  if (tail_vanishes) {
    const std::set<GroupElement> listed(order.begin(), order.end());
    auto check = [&](const Configuration& c) {
      for (const auto& [u, a] : c.letters())
        if (x.at(u) != y.at(u) && !listed.contains(g.multiply(s, u))) tail_vanishes = false;
    };
    check(x);
    check(y);
  }
  if (!tail_vanishes) total.hi += alpha.diameter() * pow2(-static_cast<int>(order.size()));
  return total;
}

std::vector<GroupElement> coordinate_order(const ShiftSystem& sys, const PseudometricSpec& rho) {
  if (rho.base == PseudometricSpec::Base::disc) return {};
  if (rho.depth < 0) throw Error("truncation depth must be >= 0");
  return Enumeration::first(sys.group(), static_cast<std::size_t>(rho.depth));
}

}  // namespace

Enclosure eval_metric(const ShiftSystem& sys, const PseudometricSpec& rho, const Configuration& x,
                      const Configuration& y) {
  if (sys.is_cube()) throw Error("metrics on cube systems are not evaluated numerically");
  const auto order = coordinate_order(sys, rho);
  if (!rho.window) return base_distance(sys, rho, order, x, y, sys.group().identity());
  std::optional<Enclosure> best;
  for (const auto& s : *rho.window) {
    Enclosure e = base_distance(sys, rho, order, x, y, s);
    best = best ? max(*best, e) : e;
  }
  return *best;
}

MicrostateDistances microstate_metrics(const ShiftSystem& sys, const PseudometricSpec& rho,
                                       const std::vector<Configuration>& phi, const std::vector<Configuration>& psi) {
  if (phi.empty() || phi.size() != psi.size()) throw Error("microstates must have the same positive degree");
  Rational sum_lo = 0, sum_hi = 0;
  std::optional<Enclosure> worst;
  for (std::size_t v = 0; v < phi.size(); ++v) {
    Enclosure e = eval_metric(sys, rho, phi[v], psi[v]);
    sum_lo += e.lo * e.lo;
    sum_hi += e.hi * e.hi;
    worst = worst ? max(*worst, e) : e;
  }
  const Rational d(static_cast<long long>(phi.size()));
  return {{sqrt_enclosure(sum_lo / d).lo, sqrt_enclosure(sum_hi / d).hi}, *worst};
}

// ---- one-dimensional subshifts ---------------------------------------------

LineShift::LineShift(const ShiftSystem& sys) {
  if (!sys.group().is_integers()) throw Error("line shifts need the group Z, got " + sys.group().descriptor());
  k_ = sys.alphabet().size();
  for (const auto& p : sys.forbidden()) {
    std::vector<std::pair<std::int64_t, int>> cells;
    for (std::size_t i = 0; i < p.window.size(); ++i) cells.emplace_back(sys.group().to_integer(p.window[i]), p.letters[i]);
    std::sort(cells.begin(), cells.end());
    Word w;
    for (auto [pos, a] : cells) {
      w.offsets.push_back(static_cast<int>(pos - cells.front().first));
      w.letters.push_back(a);
    }
    w.extent = w.offsets.back() + 1;
    span_ = std::max(span_, w.extent);
    words_.push_back(std::move(w));
  }
  compute_viable();
}

bool LineShift::violates_at_end(const std::vector<int>& word) const {
  const int m = static_cast<int>(word.size());
  for (const auto& w : words_) {
    const int start = m - w.extent;
    if (start < 0) continue;
    bool hit = true;
    for (std::size_t i = 0; i < w.offsets.size() && hit; ++i) hit = word[start + w.offsets[i]] == w.letters[i];
    if (hit) return true;
  }
  return false;
}

bool LineShift::locally_admissible(const std::vector<int>& word) const {
  std::vector<int> prefix;
  for (int a : word) {
    prefix.push_back(a);
    if (violates_at_end(prefix)) return false;
  }
  return true;
}

void LineShift::compute_viable() {
  const int len = span_ - 1;
  std::vector<std::vector<int>> nodes;
  std::vector<int> block(len, 0);
  while (true) {
    if (locally_admissible(block)) nodes.push_back(block);
    int i = len - 1;
    while (i >= 0 && block[i] == k_ - 1) block[i--] = 0;
    if (i < 0) break;
    ++block[i];
  }
  auto step = [&](const std::vector<int>& u, int a, bool forward) {
    std::vector<int> w = u;
    if (forward) w.push_back(a);
    else w.insert(w.begin(), a);
    if (!locally_admissible(w)) return std::optional<std::vector<int>>();
    if (forward) w.erase(w.begin());
    else w.pop_back();
    return std::optional<std::vector<int>>(w);
  };
  for (bool forward : {true, false}) {
    std::set<std::vector<int>> alive(nodes.begin(), nodes.end());
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto it = alive.begin(); it != alive.end();) {
        bool has_edge = false;
        for (int a = 0; a < k_ && !has_edge; ++a) {
          auto next = step(*it, a, forward);
          has_edge = next && alive.contains(*next);
        }
        if (!has_edge) {
          it = alive.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    (forward ? right_viable_ : left_viable_).assign(alive.begin(), alive.end());
  }
}

bool LineShift::is_left_viable(const std::vector<int>& block) const {
  return std::binary_search(left_viable_.begin(), left_viable_.end(), block);
}

bool LineShift::is_right_viable(const std::vector<int>& block) const {
  return std::binary_search(right_viable_.begin(), right_viable_.end(), block);
}

bool LineShift::globally_admissible(const std::vector<int>& word) const {
  if (!locally_admissible(word)) return false;
  const std::size_t len = static_cast<std::size_t>(span_ - 1);
  if (word.size() >= len) {
    std::vector<int> first(word.begin(), word.begin() + len);
    std::vector<int> last(word.end() - len, word.end());
    return is_left_viable(first) && is_right_viable(last);
  }
  for (const auto& node : left_viable_)
    if (is_right_viable(node) && std::equal(word.begin(), word.end(), node.begin())) return true;
  return false;
}

BigInt LineShift::count(int n, Admissibility mode) const {
  if (n < 0) throw Error("negative length");
  const std::size_t len = static_cast<std::size_t>(span_ - 1);
  const bool global = mode == Admissibility::global;
  if (global && static_cast<std::size_t>(n) < len) {
    std::set<std::vector<int>> prefixes;
    for (const auto& node : left_viable_)
      if (is_right_viable(node)) prefixes.emplace(node.begin(), node.begin() + n);
    return BigInt(prefixes.size());
  }
  if (global && len == 0 && left_viable_.empty()) return 0;
  std::map<std::vector<int>, BigInt> states{{{}, BigInt(1)}};
  for (int p = 0; p < n; ++p) {
    std::map<std::vector<int>, BigInt> next;
    for (const auto& [state, ways] : states) {
      for (int a = 0; a < k_; ++a) {
        std::vector<int> w = state;
        w.push_back(a);
        if (violates_at_end(w)) continue;
        if (w.size() > len) w.erase(w.begin());
        if (global && static_cast<std::size_t>(p + 1) == len && !is_left_viable(w)) continue;
        next[w] += ways;
      }
    }
    states = std::move(next);
  }
  BigInt total = 0;
  for (const auto& [state, ways] : states)
    if (!global || is_right_viable(state)) total += ways;
  return total;
}

// ---- pattern enumeration ---------------------------------------------------

namespace {

constexpr std::size_t kPatternLimit = 5'000'000;

// A forbidden pattern placed inside W: cells are indices into W.
struct Placement {
  std::vector<std::size_t> cells;
  std::vector<int> letters;
};

std::vector<std::vector<Placement>> placements_by_trigger(const ShiftSystem& sys, const FiniteWindow& w) {
  const GroupSpec& g = sys.group();
  std::vector<std::vector<Placement>> by_trigger(w.size());
  for (const auto& p : sys.forbidden()) {
    std::set<GroupElement> translates;
    for (const auto& x : w)
      for (const auto& u : p.window) translates.insert(g.multiply(x, g.inverse(u)));
    for (const auto& t : translates) {
      Placement pl;
      bool inside = true;
      for (std::size_t i = 0; i < p.window.size() && inside; ++i) {
        auto idx = w.index_of(g.multiply(t, p.window[i]));
        if (!idx) inside = false;
        else pl.cells.push_back(*idx);
      }
      if (!inside) continue;
      pl.letters = p.letters;
      const std::size_t trigger = *std::max_element(pl.cells.begin(), pl.cells.end());
      by_trigger[trigger].push_back(std::move(pl));
    }
  }
  return by_trigger;
}

template <typename Visit>
void backtrack_local(const ShiftSystem& sys, const FiniteWindow& w, Visit&& visit) {
  const int k = sys.alphabet().size();
  const auto by_trigger = placements_by_trigger(sys, w);
  std::vector<int> letters(w.size(), 0);
  auto ok_at = [&](std::size_t i) {
    for (const auto& pl : by_trigger[i]) {
      bool hit = true;
      for (std::size_t j = 0; j < pl.cells.size() && hit; ++j) hit = letters[pl.cells[j]] == pl.letters[j];
      if (hit) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == w.size()) {
      visit(letters);
      return;
    }
    for (int a = 0; a < k; ++a) {
      letters[i] = a;
      if (ok_at(i)) self(self, i + 1);
    }
  };
  rec(rec, 0);
}

bool is_interval(const GroupSpec& g, const FiniteWindow& w) {
  if (!g.is_integers()) return false;
  std::int64_t lo = g.to_integer(w[0]), hi = lo;
  for (const auto& x : w) {
    lo = std::min(lo, g.to_integer(x));
    hi = std::max(hi, g.to_integer(x));
  }
  return static_cast<std::size_t>(hi - lo + 1) == w.size();
}

}  // namespace

std::vector<Pattern> enumerate_patterns(const ShiftSystem& sys, const FiniteWindow& window, Admissibility mode) {
  if (sys.is_cube()) throw Error("pattern enumeration needs a finite alphabet");
  if (!(window.spec() == sys.group())) throw Error("window belongs to a different group");
  if (count_patterns(sys, window, Admissibility::local) > kPatternLimit)
    throw Error("more than " + std::to_string(kPatternLimit) + " patterns on " + window.describe());
  std::vector<Pattern> out;
  if (mode == Admissibility::local || sys.is_full()) {
    backtrack_local(sys, window, [&](const std::vector<int>& letters) { out.push_back({window, letters}); });
    return out;
  }
  // Global: enumerate words on the hull of W (at least span-1 long), keep the
  // extendable ones and project to W.
  const GroupSpec& g = sys.group();
  LineShift line(sys);
  std::int64_t lo = g.to_integer(window[0]), hi = lo;
  for (const auto& x : window) {
    lo = std::min(lo, g.to_integer(x));
    hi = std::max(hi, g.to_integer(x));
  }
  hi = std::max(hi, lo + line.span() - 2);
  auto hull = meandim::interval(g, lo, hi);
  std::set<std::vector<int>> projected;
  backtrack_local(sys, hull, [&](const std::vector<int>& word) {
    if (!line.globally_admissible(word)) return;
    std::vector<int> p;
    for (const auto& x : window) p.push_back(word[g.to_integer(x) - lo]);
    projected.insert(std::move(p));
  });
  for (const auto& p : projected) out.push_back({window, p});
  return out;
}

BigInt count_patterns(const ShiftSystem& sys, const FiniteWindow& window, Admissibility mode) {
  if (sys.is_cube()) throw Error("pattern counting needs a finite alphabet");
  if (!(window.spec() == sys.group())) throw Error("window belongs to a different group");
  if (sys.is_full()) return boost::multiprecision::pow(BigInt(sys.alphabet().size()), static_cast<unsigned>(window.size()));
  if (is_interval(sys.group(), window)) return LineShift(sys).count(static_cast<int>(window.size()), mode);
  if (mode == Admissibility::global) return BigInt(enumerate_patterns(sys, window, mode).size());
  BigInt n = 0;
  backtrack_local(sys, window, [&](const std::vector<int>&) { ++n; });
  return n;
}

}  // namespace meandim
