#include "meandim/group.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace meandim {

std::size_t GroupElementHash::operator()(const GroupElement& g) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::int32_t x : g.data()) {
    h ^= static_cast<std::uint32_t>(x);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

namespace {

struct Factor {
  FactorKind kind = FactorKind::free;
  int rank = 0;             // free rank, lattice dimension, or generator count
  int first_generator = 0;  // global index of this factor's first generator
  std::string descriptor;
  // Finite factors only.
  std::vector<std::vector<int>> table;
  std::vector<int> generators;
  int identity = 0;
  std::vector<int> inverse;
  std::vector<RawWord> words;  // shortlex word per element, local generator indices
};

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error("not an integer: '" + std::string(s) + "'");
  return v;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(trim(s.substr(pos)));
      break;
    }
    out.push_back(trim(s.substr(pos, next - pos)));
    pos = next + sep.size();
  }
  return out;
}

// "a..b" -> (a, b)
std::pair<std::int64_t, std::int64_t> parse_range(std::string_view s) {
  auto dots = s.find("..");
  if (dots == std::string_view::npos) {
    std::int64_t v = parse_int(trim(s));
    return {v, v};
  }
  return {parse_int(trim(s.substr(0, dots))), parse_int(trim(s.substr(dots + 2)))};
}

}  // namespace

struct GroupSpec::Impl {
  std::vector<Factor> factors;
  std::vector<std::string> names;
  std::vector<int> generator_factor;
  std::string descriptor;

  // Splits flat data into per-factor [begin, end) offsets.
  std::vector<std::pair<std::size_t, std::size_t>> spans(const std::vector<std::int32_t>& d) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(factors.size());
    std::size_t pos = 0;
    for (const auto& f : factors) {
      switch (f.kind) {
        case FactorKind::free: {
          std::size_t len = static_cast<std::size_t>(d.at(pos));
          out.emplace_back(pos + 1, pos + 1 + len);
          pos += 1 + len;
          break;
        }
        case FactorKind::lattice:
          out.emplace_back(pos, pos + f.rank);
          pos += f.rank;
          break;
        case FactorKind::finite:
          out.emplace_back(pos, pos + 1);
          pos += 1;
          break;
      }
    }
    return out;
  }
};

namespace {

std::shared_ptr<GroupSpec::Impl> make_impl(std::vector<Factor> factors) {
  auto impl = std::make_shared<GroupSpec::Impl>();
  int next = 0;
  std::vector<std::string> descriptors;
  for (std::size_t fi = 0; fi < factors.size(); ++fi) {
    auto& f = factors[fi];
    f.first_generator = next;
    for (int i = 0; i < f.rank; ++i) {
      std::string name;
      switch (f.kind) {
        case FactorKind::free:
          name = f.rank <= 26 ? std::string(1, static_cast<char>('a' + i)) : "s" + std::to_string(i + 1);
          break;
        case FactorKind::lattice:
          name = f.rank <= 3 ? std::string(1, "xyz"[i]) : "x" + std::to_string(i + 1);
          break;
        case FactorKind::finite:
          name = "g" + std::to_string(i + 1);
          break;
      }
      if (std::find(impl->names.begin(), impl->names.end(), name) != impl->names.end())
        name += "_" + std::to_string(fi + 1);
      impl->names.push_back(name);
      impl->generator_factor.push_back(static_cast<int>(fi));
    }
    next += f.rank;
    descriptors.push_back(f.descriptor);
  }
  for (std::size_t i = 0; i < descriptors.size(); ++i)
    impl->descriptor += (i ? " x " : "") + descriptors[i];
  impl->factors = std::move(factors);
  return impl;
}

Factor make_finite_factor(std::vector<std::vector<int>> table, std::vector<int> generators,
                          std::string descriptor) {
  const int n = static_cast<int>(table.size());
  if (n == 0) throw Error("finite group needs a nonempty multiplication table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n) throw Error("multiplication table is not square");
    for (int x : row)
      if (x < 0 || x >= n) throw Error("multiplication table entry out of range");
  }
  Factor f;
  f.kind = FactorKind::finite;
  f.rank = static_cast<int>(generators.size());
  // Identity: the element e with e*x = x for all x.
  f.identity = -1;
  for (int e = 0; e < n && f.identity < 0; ++e) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x) ok = table[e][x] == x && table[x][e] == x;
    if (ok) f.identity = e;
  }
  if (f.identity < 0) throw Error("multiplication table has no identity");
  f.inverse.assign(n, -1);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (table[x][y] == f.identity) f.inverse[x] = y;
  for (int x = 0; x < n; ++x)
    if (f.inverse[x] < 0) throw Error("multiplication table element without inverse");
  for (int g : generators) {
    if (g < 0 || g >= n) throw Error("finite group generator out of range");
    if (g == f.identity) throw Error("generator set must exclude the identity");
  }
  // Shortlex words by BFS over g1, g1^-1, g2, g2^-1, ...
  f.words.assign(n, {});
  std::vector<bool> seen(n, false);
  std::vector<int> queue{f.identity};
  seen[f.identity] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int x = queue[head];
    for (int i = 0; i < f.rank; ++i) {
      for (int sign : {1, -1}) {
        int g = sign > 0 ? generators[i] : f.inverse[generators[i]];
        int y = table[x][g];
        if (seen[y]) continue;
        seen[y] = true;
        f.words[y] = f.words[x];
        if (!f.words[y].empty() && f.words[y].back().generator == i &&
            (f.words[y].back().exponent > 0) == (sign > 0))
          f.words[y].back().exponent += sign;
        else
          f.words[y].push_back({i, sign});
        queue.push_back(y);
      }
    }
  }
  if (static_cast<int>(queue.size()) != n)
    throw Error("generators do not generate the finite group");
  f.table = std::move(table);
  f.generators = std::move(generators);
  f.descriptor = std::move(descriptor);
  return f;
}

Factor parse_factor(const std::string& text) {
  std::string t = trim(text);
  auto colon = t.find(':');
  std::string head = colon == std::string::npos ? t : t.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : t.substr(colon + 1);
  Factor f;
  if (head == "free" || (head.size() > 1 && head[0] == 'F' && std::isdigit(static_cast<unsigned char>(head[1])))) {
    int rank = static_cast<int>(parse_int(head == "free" ? arg : head.substr(1)));
    if (rank < 1) throw Error("free group rank must be >= 1");
    f.kind = FactorKind::free;
    f.rank = rank;
    f.descriptor = "free:" + std::to_string(rank);
    return f;
  }
  if (head == "lattice" || head == "Z" || head.rfind("Z^", 0) == 0) {
    int dim = head == "lattice" ? static_cast<int>(parse_int(arg))
              : head == "Z"     ? 1
                                : static_cast<int>(parse_int(head.substr(2)));
    if (dim < 1) throw Error("lattice dimension must be >= 1");
    f.kind = FactorKind::lattice;
    f.rank = dim;
    f.descriptor = "lattice:" + std::to_string(dim);
    return f;
  }
  if (head == "cyclic" || head.rfind("Z/", 0) == 0) {
    int n = static_cast<int>(parse_int(head == "cyclic" ? arg : head.substr(2)));
    if (n < 2) throw Error("cyclic group order must be >= 2");
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) table[i][j] = (i + j) % n;
    return make_finite_factor(std::move(table), {1}, "cyclic:" + std::to_string(n));
  }
  throw Error("unknown group kind: '" + t + "'");
}

}  // namespace

GroupSpec GroupSpec::free(int rank) {
  if (rank < 1) throw Error("free group rank must be >= 1");
  Factor f;
  f.kind = FactorKind::free;
  f.rank = rank;
  f.descriptor = "free:" + std::to_string(rank);
  return GroupSpec(make_impl({f}));
}

GroupSpec GroupSpec::lattice(int dim) {
  if (dim < 1) throw Error("lattice dimension must be >= 1");
  Factor f;
  f.kind = FactorKind::lattice;
  f.rank = dim;
  f.descriptor = "lattice:" + std::to_string(dim);
  return GroupSpec(make_impl({f}));
}

GroupSpec GroupSpec::finite(std::vector<std::vector<int>> table, std::vector<int> generators) {
  std::ostringstream d;
  d << "finite:" << table.size() << "[";
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < table[i].size(); ++j) d << (i || j ? "," : "") << table[i][j];
  }
  d << "]<";
  for (std::size_t i = 0; i < generators.size(); ++i) d << (i ? "," : "") << generators[i];
  d << ">";
  return GroupSpec(make_impl({make_finite_factor(std::move(table), std::move(generators), d.str())}));
}

GroupSpec GroupSpec::cyclic(int order) {
  if (order < 2) throw Error("cyclic group order must be >= 2");
  std::vector<std::vector<int>> table(order, std::vector<int>(order));
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j) table[i][j] = (i + j) % order;
  return GroupSpec(make_impl({make_finite_factor(std::move(table), {1}, "cyclic:" + std::to_string(order))}));
}

GroupSpec GroupSpec::product(const std::vector<GroupSpec>& factors) {
  if (factors.empty()) throw Error("product of no groups");
  std::vector<Factor> all;
  for (const auto& g : factors)
    for (const auto& f : g.impl_->factors) all.push_back(f);
  return GroupSpec(make_impl(std::move(all)));
}

GroupSpec GroupSpec::parse(std::string_view text) {
  std::vector<Factor> factors;
  for (const auto& part : split(text, " x ")) factors.push_back(parse_factor(part));
  return GroupSpec(make_impl(std::move(factors)));
}

const std::string& GroupSpec::descriptor() const { return impl_->descriptor; }
std::size_t GroupSpec::factor_count() const { return impl_->factors.size(); }
FactorKind GroupSpec::factor_kind(std::size_t i) const { return impl_->factors.at(i).kind; }
int GroupSpec::factor_rank(std::size_t i) const { return impl_->factors.at(i).rank; }
int GroupSpec::generator_count() const { return static_cast<int>(impl_->names.size()); }
const std::string& GroupSpec::generator_name(int g) const { return impl_->names.at(g); }

std::vector<GroupElement> GroupSpec::symmetric_generators() const {
  std::vector<GroupElement> out;
  for (int g = 0; g < generator_count(); ++g) {
    out.push_back(generator(g, 1));
    out.push_back(generator(g, -1));
  }
  return out;
}

GroupElement GroupSpec::identity() const {
  std::vector<std::int32_t> d;
  for (const auto& f : impl_->factors) {
    switch (f.kind) {
      case FactorKind::free: d.push_back(0); break;
      case FactorKind::lattice: d.insert(d.end(), f.rank, 0); break;
      case FactorKind::finite: d.push_back(f.identity); break;
    }
  }
  return GroupElement(std::move(d));
}

GroupElement GroupSpec::generator(int g, int exponent) const {
  if (g < 0 || g >= generator_count())
    throw Error("unknown generator index " + std::to_string(g));
  const int fi = impl_->generator_factor[g];
  const auto& f = impl_->factors[fi];
  const int local = g - f.first_generator;
  std::vector<std::int32_t> d;
  for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
    const auto& h = impl_->factors[i];
    const bool mine = static_cast<int>(i) == fi;
    switch (h.kind) {
      case FactorKind::free:
        if (mine) {
          d.push_back(std::abs(exponent));
          d.insert(d.end(), std::abs(exponent), exponent > 0 ? local + 1 : -(local + 1));
        } else {
          d.push_back(0);
        }
        break;
      case FactorKind::lattice:
        for (int j = 0; j < h.rank; ++j) d.push_back(mine && j == local ? exponent : 0);
        break;
      case FactorKind::finite: {
        int x = h.identity;
        if (mine) {
          int step = exponent > 0 ? h.generators[local] : h.inverse[h.generators[local]];
          int order = 1;
          for (int y = step; y != h.identity; y = h.table[y][step]) ++order;
          for (int k = 0; k < std::abs(exponent) % order; ++k) x = h.table[x][step];
        }
        d.push_back(x);
        break;
      }
    }
  }
  return GroupElement(std::move(d));
}

GroupElement GroupSpec::multiply(const GroupElement& a, const GroupElement& b) const {
  const auto& ad = a.data();
  const auto& bd = b.data();
  auto as = impl_->spans(ad);
  auto bs = impl_->spans(bd);
  std::vector<std::int32_t> d;
  d.reserve(ad.size() + bd.size());
  for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
    const auto& f = impl_->factors[i];
    switch (f.kind) {
      case FactorKind::free: {
        std::size_t len_pos = d.size();
        d.push_back(0);
        d.insert(d.end(), ad.begin() + as[i].first, ad.begin() + as[i].second);
        for (std::size_t k = bs[i].first; k < bs[i].second; ++k) {
          if (d.size() > len_pos + 1 && d.back() == -bd[k])
            d.pop_back();
          else
            d.push_back(bd[k]);
        }
        d[len_pos] = static_cast<std::int32_t>(d.size() - len_pos - 1);
        break;
      }
      case FactorKind::lattice:
        for (int j = 0; j < f.rank; ++j) d.push_back(ad[as[i].first + j] + bd[bs[i].first + j]);
        break;
      case FactorKind::finite:
        d.push_back(f.table[ad[as[i].first]][bd[bs[i].first]]);
        break;
    }
  }
  return GroupElement(std::move(d));
}

GroupElement GroupSpec::inverse(const GroupElement& a) const {
  const auto& ad = a.data();
  auto as = impl_->spans(ad);
  std::vector<std::int32_t> d;
  d.reserve(ad.size());
  for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
    const auto& f = impl_->factors[i];
    switch (f.kind) {
      case FactorKind::free:
        d.push_back(static_cast<std::int32_t>(as[i].second - as[i].first));
        for (std::size_t k = as[i].second; k > as[i].first; --k) d.push_back(-ad[k - 1]);
        break;
      case FactorKind::lattice:
        for (int j = 0; j < f.rank; ++j) d.push_back(-ad[as[i].first + j]);
        break;
      case FactorKind::finite:
        d.push_back(f.inverse[ad[as[i].first]]);
        break;
    }
  }
  return GroupElement(std::move(d));
}

GroupElement GroupSpec::normal_form(const RawWord& word) const {
  GroupElement g = identity();
  for (const auto& l : word) {
    if (l.generator < 0 || l.generator >= generator_count())
      throw Error("unknown generator symbol with index " + std::to_string(l.generator));
    if (l.exponent == 0) continue;
    g = multiply(g, generator(l.generator, l.exponent));
  }
  return g;
}

RawWord GroupSpec::word_of(const GroupElement& g) const {
  const auto& d = g.data();
  auto spans = impl_->spans(d);
  RawWord w;
  for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
    const auto& f = impl_->factors[i];
    switch (f.kind) {
      case FactorKind::free:
        for (std::size_t k = spans[i].first; k < spans[i].second; ++k) {
          int gen = f.first_generator + std::abs(d[k]) - 1;
          int sign = d[k] > 0 ? 1 : -1;
          if (!w.empty() && w.back().generator == gen && (w.back().exponent > 0) == (sign > 0))
            w.back().exponent += sign;
          else
            w.push_back({gen, sign});
        }
        break;
      case FactorKind::lattice:
        for (int j = 0; j < f.rank; ++j)
          if (int c = d[spans[i].first + j]; c != 0) w.push_back({f.first_generator + j, c});
        break;
      case FactorKind::finite:
        for (const auto& l : f.words[d[spans[i].first]])
          w.push_back({f.first_generator + l.generator, l.exponent});
        break;
    }
  }
  return w;
}

bool GroupSpec::is_integers() const {
  return impl_->factors.size() == 1 && impl_->factors[0].kind != FactorKind::finite &&
         impl_->factors[0].rank == 1;
}

std::int64_t GroupSpec::to_integer(const GroupElement& g) const {
  if (!is_integers()) throw Error("group is not Z");
  const auto& d = g.data();
  if (impl_->factors[0].kind == FactorKind::lattice) return d[0];
  return d[0] == 0 ? 0 : static_cast<std::int64_t>(d[0]) * (d[1] > 0 ? 1 : -1);
}

GroupElement GroupSpec::from_integer(std::int64_t n) const {
  if (!is_integers()) throw Error("group is not Z");
  return generator(0, static_cast<int>(n));
}

std::optional<int> GroupSpec::lattice_dim() const {
  if (impl_->factors.size() == 1 && impl_->factors[0].kind == FactorKind::lattice)
    return impl_->factors[0].rank;
  return std::nullopt;
}

std::vector<std::int64_t> GroupSpec::lattice_coordinates(const GroupElement& g) const {
  if (!lattice_dim()) throw Error("group is not a lattice Z^d");
  return {g.data().begin(), g.data().end()};
}

GroupElement GroupSpec::from_lattice(const std::vector<std::int64_t>& coords) const {
  auto dim = lattice_dim();
  if (!dim || static_cast<int>(coords.size()) != *dim) throw Error("lattice coordinate mismatch");
  std::vector<std::int32_t> d(coords.begin(), coords.end());
  return GroupElement(std::move(d));
}

std::optional<int> GroupSpec::free_rank() const {
  if (impl_->factors.size() == 1 && impl_->factors[0].kind == FactorKind::free)
    return impl_->factors[0].rank;
  return std::nullopt;
}

bool GroupSpec::is_finite() const {
  return std::all_of(impl_->factors.begin(), impl_->factors.end(),
                     [](const Factor& f) { return f.kind == FactorKind::finite; });
}

bool GroupSpec::is_torsion_free_orderable() const {
  return std::none_of(impl_->factors.begin(), impl_->factors.end(),
                      [](const Factor& f) { return f.kind == FactorKind::finite; });
}

GroupElement GroupSpec::parse_element(std::string_view text) const {
  GroupElement g = identity();
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) {
    return Error("cannot parse group element '" + std::string(text) + "': " + why);
  };
  auto read_int = [&]() -> std::int64_t {
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw fail("expected an integer");
    std::string_view num = text.substr(start, pos - start);
    if (num.front() == '+') num.remove_prefix(1);
    return parse_int(num);
  };
  bool has_e = std::find(impl_->names.begin(), impl_->names.end(), "e") != impl_->names.end();
  while (pos < text.size()) {
    char c = text[pos];
    if (c == ' ' || c == '.' || c == '*') {
      ++pos;
      continue;
    }
    if (is_integers() && (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+')) {
      g = multiply(g, from_integer(read_int()));
      continue;
    }
    if (c == '1' || (c == 'e' && !has_e)) {
      ++pos;
      continue;
    }
    if (c == '[') {
      if (impl_->factors.size() != 1 || impl_->factors[0].kind != FactorKind::finite)
        throw fail("element indices are only valid for a finite group");
      ++pos;
      std::int64_t idx = read_int();
      if (pos >= text.size() || text[pos] != ']') throw fail("missing ']'");
      ++pos;
      if (idx < 0 || idx >= static_cast<std::int64_t>(impl_->factors[0].table.size()))
        throw fail("element index out of range");
      g = multiply(g, GroupElement({static_cast<std::int32_t>(idx)}));
      continue;
    }
    // Longest generator name match; an uppercase single letter is the inverse
    // of the lowercase free generator.
    int best = -1;
    std::size_t best_len = 0;
    int sign = 1;
    for (int i = 0; i < generator_count(); ++i) {
      const auto& name = impl_->names[i];
      if (text.substr(pos, name.size()) == name && name.size() > best_len) {
        best = i;
        best_len = name.size();
        sign = 1;
      }
      const auto& f = impl_->factors[impl_->generator_factor[i]];
      if (f.kind == FactorKind::free && name.size() == 1 &&
          c == static_cast<char>(std::toupper(static_cast<unsigned char>(name[0]))) && best_len < 1) {
        best = i;
        best_len = 1;
        sign = -1;
      }
    }
    if (best < 0) throw fail(std::string("unknown generator symbol '") + c + "'");
    pos += best_len;
    std::int64_t exponent = 1;
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      exponent = read_int();
    }
    g = multiply(g, generator(best, static_cast<int>(sign * exponent)));
  }
  return g;
}

std::string GroupSpec::format(const GroupElement& g) const {
  if (is_integers()) return std::to_string(to_integer(g));
  RawWord w = word_of(g);
  if (w.empty()) return "e";
  std::string out;
  for (const auto& l : w) {
    const auto& name = impl_->names[l.generator];
    const auto& f = impl_->factors[impl_->generator_factor[l.generator]];
    if (f.kind == FactorKind::free && name.size() == 1) {
      char ch = l.exponent > 0 ? name[0] : static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
      out.append(static_cast<std::size_t>(std::abs(l.exponent)), ch);
    } else {
      out += name;
      if (l.exponent != 1) out += "^" + std::to_string(l.exponent);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

FiniteWindow::FiniteWindow(GroupSpec spec, std::vector<GroupElement> elements, std::string label)
    : spec_(std::move(spec)), label_(std::move(label)) {
  elements_.reserve(elements.size());
  for (auto& g : elements) {
    if (index_.contains(g)) continue;
    index_.emplace(g, elements_.size());
    elements_.push_back(std::move(g));
  }
  if (elements_.empty()) throw Error("window must be nonempty");
}

std::optional<std::size_t> FiniteWindow::index_of(const GroupElement& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string FiniteWindow::describe() const {
  if (!label_.empty()) return label_;
  std::string out = "{";
  for (std::size_t i = 0; i < elements_.size(); ++i)
    out += (i ? "," : "") + spec_.format(elements_[i]);
  return out + "}";
}

std::vector<std::string> FiniteWindow::words() const {
  std::vector<std::string> out;
  out.reserve(elements_.size());
  for (const auto& g : elements_) out.push_back(spec_.format(g));
  return out;
}

FiniteWindow FiniteWindow::inverse() const {
  std::vector<GroupElement> inv;
  inv.reserve(elements_.size());
  for (const auto& g : elements_) inv.push_back(spec_.inverse(g));
  return FiniteWindow(spec_, std::move(inv), label_.empty() ? "" : label_ + "^-1");
}

FiniteWindow FiniteWindow::union_with(const FiniteWindow& other) const {
  if (!(spec_ == other.spec_)) throw Error("window owners differ");
  std::vector<GroupElement> all = elements_;
  all.insert(all.end(), other.elements_.begin(), other.elements_.end());
  return FiniteWindow(spec_, std::move(all));
}

FiniteWindow FiniteWindow::with_label(std::string label) const {
  FiniteWindow w = *this;
  w.label_ = std::move(label);
  return w;
}

// ---------------------------------------------------------------------------

Enumeration::Enumeration(GroupSpec spec)
    : spec_(std::move(spec)), generators_(spec_.symmetric_generators()) {
  queue_.push_back(spec_.identity());
  seen_.emplace(queue_.front(), 0);
}

std::optional<GroupElement> Enumeration::next() {
  if (head_ >= queue_.size()) return std::nullopt;
  GroupElement g = queue_[head_++];
  for (const auto& s : generators_) {
    GroupElement h = spec_.multiply(g, s);
    if (seen_.contains(h)) continue;
    seen_.emplace(h, queue_.size());
    queue_.push_back(std::move(h));
  }
  return g;
}

std::vector<GroupElement> Enumeration::first(const GroupSpec& spec, std::size_t n) {
  Enumeration e(spec);
  std::vector<GroupElement> out;
  out.reserve(n);
  while (out.size() < n) {
    auto g = e.next();
    if (!g) break;
    out.push_back(std::move(*g));
  }
  return out;
}

FiniteWindow ball(const GroupSpec& spec, int radius) {
  if (radius < 0) throw Error("ball radius must be >= 0");
  auto gens = spec.symmetric_generators();
  std::vector<GroupElement> elements{spec.identity()};
  std::unordered_map<GroupElement, std::size_t, GroupElementHash> seen{{elements[0], 0}};
  std::size_t level_begin = 0;
  for (int r = 0; r < radius; ++r) {
    std::size_t level_end = elements.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (const auto& s : gens) {
        GroupElement h = spec.multiply(elements[i], s);
        if (seen.contains(h)) continue;
        seen.emplace(h, elements.size());
        elements.push_back(std::move(h));
      }
    }
    if (elements.size() == level_end) break;  // finite group saturated
    level_begin = level_end;
  }
  return FiniteWindow(spec, std::move(elements), "ball:" + std::to_string(radius));
}

FiniteWindow interval(const GroupSpec& spec, std::int64_t lo, std::int64_t hi) {
  if (!spec.is_integers()) throw Error("interval windows need the group Z");
  if (hi < lo) throw Error("empty interval");
  std::vector<GroupElement> elements;
  for (std::int64_t n = lo; n <= hi; ++n) elements.push_back(spec.from_integer(n));
  return FiniteWindow(spec, std::move(elements),
                      "interval:" + std::to_string(lo) + ".." + std::to_string(hi));
}

FiniteWindow box(const GroupSpec& spec, std::int64_t n) {
  auto dim = spec.lattice_dim();
  if (!dim) throw Error("box windows need a lattice group Z^d");
  if (n < 1) throw Error("box side must be >= 1");
  std::vector<GroupElement> elements;
  std::vector<std::int64_t> c(*dim, 0);
  while (true) {
    elements.push_back(spec.from_lattice(c));
    int k = *dim - 1;
    while (k >= 0 && ++c[k] == n) c[k--] = 0;
    if (k < 0) break;
  }
  return FiniteWindow(spec, std::move(elements), "box:" + std::to_string(n));
}

FiniteWindow product_window(const FiniteWindow& k, const FiniteWindow& f) {
  if (!(k.spec() == f.spec())) throw Error("mismatched owners in product_window");
  std::vector<GroupElement> out;
  out.reserve(k.size() * f.size());
  for (const auto& a : k)
    for (const auto& b : f) out.push_back(k.spec().multiply(a, b));
  return FiniteWindow(k.spec(), std::move(out));
}

Rational folner_defect(const FiniteWindow& k, const FiniteWindow& f) {
  FiniteWindow kf = product_window(k, f);
  std::size_t outside = 0;
  for (const auto& g : kf)
    if (!f.contains(g)) ++outside;
  return Rational(static_cast<long long>(outside), static_cast<long long>(f.size()));
}

FiniteWindow parse_window(const GroupSpec& spec, std::string_view text) {
  std::string t = trim(text);
  if (t == "identity" || t == "e") return FiniteWindow(spec, {spec.identity()}, "identity");
  auto colon = t.find(':');
  if (colon == std::string::npos) throw Error("window descriptor needs 'kind:args': '" + t + "'");
  std::string kind = t.substr(0, colon);
  std::string arg = t.substr(colon + 1);
  if (kind == "ball") return ball(spec, static_cast<int>(parse_int(trim(arg))));
  if (kind == "interval") {
    auto [lo, hi] = parse_range(arg);
    return interval(spec, lo, hi);
  }
  if (kind == "box") return box(spec, parse_int(trim(arg)));
  if (kind == "list") {
    std::vector<GroupElement> elements;
    for (const auto& w : split(arg, ",")) elements.push_back(spec.parse_element(w));
    return FiniteWindow(spec, std::move(elements));
  }
  throw Error("unknown window kind: '" + kind + "'");
}

WindowFamily::WindowFamily(std::vector<FiniteWindow> windows) : windows_(std::move(windows)) {
  if (windows_.empty()) throw Error("window family must be nonempty");
  for (const auto& w : windows_)
    if (!(w.spec() == windows_.front().spec())) throw Error("window family mixes groups");
}

WindowFamily parse_family(const GroupSpec& spec, std::string_view text) {
  std::string t = trim(text);
  auto colon = t.find(':');
  std::string kind = colon == std::string::npos ? "" : t.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : t.substr(colon + 1);
  std::vector<FiniteWindow> windows;
  if (kind == "balls" || kind == "intervals" || kind == "boxes") {
    auto [lo, hi] = parse_range(arg);
    if (hi < lo) throw Error("empty family range");
    for (std::int64_t n = lo; n <= hi; ++n) {
      if (kind == "balls") windows.push_back(ball(spec, static_cast<int>(n)));
      else if (kind == "intervals") windows.push_back(interval(spec, 0, n - 1));
      else windows.push_back(box(spec, n));
    }
  } else {
    for (const auto& part : split(t, ";")) windows.push_back(parse_window(spec, part));
  }
  return WindowFamily(std::move(windows));
}

}  // namespace meandim
