#include "meandim/sofic.hpp"

#include "meandim/parallel.hpp"

#include <algorithm>
#include <map>

namespace meandim {

Permutation::Permutation(std::vector<std::uint32_t> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (std::uint32_t v : images_) {
    if (v >= images_.size() || seen[v]) throw Error("not a permutation of [" + std::to_string(images_.size()) + "]");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(std::size_t d) {
  std::vector<std::uint32_t> img(d);
  for (std::size_t v = 0; v < d; ++v) img[v] = static_cast<std::uint32_t>(v);
  return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
  std::vector<std::uint32_t> inv(images_.size());
  for (std::size_t v = 0; v < images_.size(); ++v) inv[images_[v]] = static_cast<std::uint32_t>(v);
  Permutation p;
  p.images_ = std::move(inv);
  return p;
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw Error("composing permutations of different degree");
  Permutation p;
  p.images_.resize(a.size());
  for (std::size_t v = 0; v < a.size(); ++v) p.images_[v] = a.images_[b.images_[v]];
  return p;
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw Error("empty range");
  const std::uint64_t limit = engine_.max() - engine_.max() % bound;
  std::uint64_t x;
  do x = engine_();
  while (x >= limit);
  return x % bound;
}

Permutation SeededRng::permutation(std::size_t d) {
  std::vector<std::uint32_t> img(d);
  for (std::size_t v = 0; v < d; ++v) img[v] = static_cast<std::uint32_t>(v);
  for (std::size_t i = d; i > 1; --i) std::swap(img[i - 1], img[below(i)]);
  return Permutation(std::move(img));
}

SoficMap::SoficMap(GroupSpec spec, std::vector<Permutation> generator_images, std::string construction,
                   std::optional<std::uint64_t> seed)
    : spec_(std::move(spec)),
      degree_(0),
      images_(std::move(generator_images)),
      construction_(std::move(construction)),
      seed_(seed) {
  if (static_cast<int>(images_.size()) != spec_.generator_count())
    throw Error("expected " + std::to_string(spec_.generator_count()) + " generator images, got " +
                std::to_string(images_.size()));
  if (images_.empty() || images_.front().size() == 0) throw Error("sofic map needs d >= 1");
  degree_ = images_.front().size();
  for (const auto& p : images_)
    if (p.size() != degree_) throw Error("generator images have different degrees");
  for (const auto& p : images_) inverse_images_.push_back(p.inverse());
}

std::uint32_t SoficMap::apply(const GroupElement& g, std::uint32_t v) const {
  const RawWord word = spec_.word_of(g);
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const Permutation& p = it->exponent > 0 ? images_[it->generator] : inverse_images_[it->generator];
    for (int k = std::abs(it->exponent); k > 0; --k) v = p(v);
  }
  return v;
}

Permutation SoficMap::permutation(const GroupElement& g) const {
  const RawWord word = spec_.word_of(g);
  std::vector<std::uint32_t> img(degree_);
  for (std::size_t v = 0; v < degree_; ++v) img[v] = static_cast<std::uint32_t>(v);
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const Permutation& p = it->exponent > 0 ? images_[it->generator] : inverse_images_[it->generator];
    for (int k = std::abs(it->exponent); k > 0; --k)
      for (auto& x : img) x = p(x);
  }
  return Permutation(std::move(img));
}

SoficMap from_cyclic(const GroupSpec& spec, std::size_t d) {
  if (!spec.is_integers()) throw Error("from_cyclic needs the group Z, got " + spec.descriptor());
  if (d == 0) throw Error("d must be >= 1");
  std::vector<std::uint32_t> img(d);
  for (std::size_t v = 0; v < d; ++v) img[v] = static_cast<std::uint32_t>((v + 1) % d);
  return SoficMap(spec, {Permutation(std::move(img))}, "cyclic");
}

SoficMap from_torus(const GroupSpec& spec, std::size_t n) {
  auto dim = spec.lattice_dim();
  if (!dim) throw Error("from_torus needs a lattice group, got " + spec.descriptor());
  if (n == 0) throw Error("n must be >= 1");
  std::size_t d = 1;
  for (int i = 0; i < *dim; ++i) d *= n;
  std::vector<Permutation> gens;
  std::size_t stride = d;
  for (int i = 0; i < *dim; ++i) {
    stride /= n;  // last coordinate fastest
    std::vector<std::uint32_t> img(d);
    for (std::size_t v = 0; v < d; ++v) {
      std::size_t c = (v / stride) % n;
      std::size_t shifted = v - c * stride + ((c + 1) % n) * stride;
      img[v] = static_cast<std::uint32_t>(shifted);
    }
    gens.emplace_back(std::move(img));
  }
  return SoficMap(spec, std::move(gens), "torus");
}

SoficMap from_homomorphism(const GroupSpec& spec, std::vector<Permutation> images) {
  if (!spec.free_rank()) throw Error("from_homomorphism needs a free group, got " + spec.descriptor());
  return SoficMap(spec, std::move(images), "homomorphism");
}

SoficMap from_random(const GroupSpec& spec, std::size_t d, std::uint64_t seed) {
  if (d == 0) throw Error("d must be >= 1");
  SeededRng rng(seed);
  std::vector<Permutation> gens;
  for (int g = 0; g < spec.generator_count(); ++g) gens.push_back(rng.permutation(d));
  return SoficMap(spec, std::move(gens), "random", seed);
}

namespace {

// Closure of the group generated by `generators` under left multiplication,
// in BFS order from the identity. Returns nullopt once it exceeds max_order.
std::optional<std::vector<Permutation>> closure(const std::vector<Permutation>& generators,
                                                std::size_t max_order,
                                                std::vector<std::vector<std::uint32_t>>* left_action) {
  const std::size_t m = generators.front().size();
  std::vector<Permutation> elements{Permutation::identity(m)};
  std::map<std::vector<std::uint32_t>, std::uint32_t> index{{elements[0].images(), 0}};
  std::vector<std::vector<std::uint32_t>> action(generators.size());
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (std::size_t i = 0; i < generators.size(); ++i) {
      Permutation prod = generators[i] * elements[head];
      auto [it, inserted] = index.try_emplace(prod.images(), static_cast<std::uint32_t>(elements.size()));
      if (inserted) {
        if (elements.size() >= max_order) return std::nullopt;
        elements.push_back(std::move(prod));
      }
      action[i].push_back(it->second);
    }
  }
  if (left_action) *left_action = std::move(action);
  return elements;
}

}  // namespace

SoficMap from_regular_action(const GroupSpec& spec, const std::vector<Permutation>& generators,
                             std::size_t max_order) {
  auto rank = spec.free_rank();
  if (!rank) throw Error("regular-action maps need a free group, got " + spec.descriptor());
  if (static_cast<int>(generators.size()) != *rank) throw Error("need one permutation per free generator");
  for (const auto& g : generators)
    if (g.size() != generators.front().size()) throw Error("generator permutations have different degrees");
  std::vector<std::vector<std::uint32_t>> action;
  if (!closure(generators, max_order, &action))
    throw Error("generated group has order above " + std::to_string(max_order));
  std::vector<Permutation> images;
  for (auto& a : action) images.emplace_back(std::move(a));
  return SoficMap(spec, std::move(images), "regular-action");
}

SoficMap random_finite_quotient(const GroupSpec& spec, std::uint64_t seed, std::size_t d_min,
                                std::size_t d_max, const FiniteWindow& window, int max_attempts) {
  auto rank = spec.free_rank();
  if (!rank) throw Error("finite quotients need a free group, got " + spec.descriptor());
  if (!(window.spec() == spec)) throw Error("window belongs to a different group");
  if (d_min == 0 || d_min > d_max) throw Error("empty degree range");
  const FiniteWindow sym = window.union_with(window.inverse());
  SeededRng rng(seed);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::size_t m = 5 + rng.below(2);
    const std::size_t c = 1 + rng.below(16);
    std::vector<Permutation> gens;
    for (int i = 0; i < *rank; ++i) {
      Permutation pi = rng.permutation(m);
      const std::size_t shift = rng.below(c);
      std::vector<std::uint32_t> img(pi.images());
      for (std::size_t j = 0; j < c; ++j) img.push_back(static_cast<std::uint32_t>(m + (j + shift) % c));
      gens.emplace_back(std::move(img));
    }
    std::vector<std::vector<std::uint32_t>> action;
    auto elements = closure(gens, d_max, &action);
    if (!elements || elements->size() < d_min) continue;
    std::vector<Permutation> images;
    for (auto& a : action) images.emplace_back(std::move(a));
    SoficMap sigma(spec, std::move(images), "regular-action", seed);
    // Regular action: sigma_s(v) = sigma_t(v) for one v iff for all v.
    std::vector<std::uint32_t> at_identity;
    for (const auto& s : sym) at_identity.push_back(sigma.apply(s, 0));
    std::sort(at_identity.begin(), at_identity.end());
    if (std::adjacent_find(at_identity.begin(), at_identity.end()) != at_identity.end()) continue;
    return sigma;
  }
  throw Error("no finite quotient of order in [" + std::to_string(d_min) + ", " + std::to_string(d_max) +
              "] separating " + window.describe() + " after " + std::to_string(max_attempts) + " attempts");
}

namespace {

std::vector<Permutation> permutations_of(const SoficMap& sigma, const FiniteWindow& w) {
  std::vector<Permutation> out;
  out.reserve(w.size());
  for (const auto& s : w) out.push_back(sigma.permutation(s));
  return out;
}

bool good_with(const std::vector<Permutation>& perms, const std::vector<std::size_t>& inverse_slot,
               std::uint32_t v, std::vector<std::uint32_t>& scratch) {
  scratch.clear();
  for (std::size_t i = 0; i < perms.size(); ++i) {
    const std::uint32_t image = perms[i](v);
    if (perms[inverse_slot[i]](image) != v) return false;
    scratch.push_back(image);
  }
  std::sort(scratch.begin(), scratch.end());
  return std::adjacent_find(scratch.begin(), scratch.end()) == scratch.end();
}

std::vector<std::size_t> inverse_slots(const FiniteWindow& sym) {
  const GroupSpec& spec = sym.spec();
  std::vector<std::size_t> slots;
  for (const auto& s : sym) slots.push_back(*sym.index_of(spec.inverse(s)));
  return slots;
}

}  // namespace

GoodnessReport goodness(const SoficMap& sigma, const FiniteWindow& window, const Rational& tau) {
  if (!(window.spec() == sigma.spec())) throw Error("window and sofic map belong to different groups");
  if (tau <= 0 || tau >= 1) throw PreconditionError("tau must lie in (0,1), got " + to_string(tau));
  const GroupSpec& spec = sigma.spec();
  const std::size_t d = sigma.degree();
  const std::size_t n = window.size();

  GoodnessReport r{window, tau, d, 1, 1, {}, 0, false};
  const auto perms = permutations_of(sigma, window);

  std::size_t worst_mult = d;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Permutation st = sigma.permutation(spec.multiply(window[i], window[j]));
      std::size_t agree = 0;
      for (std::uint32_t v = 0; v < d; ++v) agree += perms[i](perms[j](v)) == st(v);
      worst_mult = std::min(worst_mult, agree);
    }
  }
  r.multiplicativity = Rational(static_cast<long long>(worst_mult), static_cast<long long>(d));

  std::size_t worst_sep = d;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t differ = 0;
      for (std::uint32_t v = 0; v < d; ++v) differ += perms[i](v) != perms[j](v);
      worst_sep = std::min(worst_sep, differ);
    }
  r.separation = Rational(static_cast<long long>(worst_sep), static_cast<long long>(d));

  const FiniteWindow sym = window.union_with(window.inverse());
  const auto sym_perms = permutations_of(sigma, sym);
  const auto slots = inverse_slots(sym);
  std::vector<char> good(d, 0);
  parallel_chunks(d, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> scratch;
    for (std::size_t v = begin; v < end; ++v)
      good[v] = good_with(sym_perms, slots, static_cast<std::uint32_t>(v), scratch);
  });
  for (std::uint32_t v = 0; v < d; ++v)
    if (good[v]) r.good_set.push_back(v);

  r.good_set_threshold =
      (1 - tau / (2 * Rational(static_cast<long long>(n + 1)))) * Rational(static_cast<long long>(d));
  r.meets_threshold = Rational(static_cast<long long>(r.good_set.size())) >= r.good_set_threshold;
  return r;
}

bool is_good_point(const SoficMap& sigma, const FiniteWindow& window, std::uint32_t v) {
  const GroupSpec& spec = sigma.spec();
  const FiniteWindow sym = window.union_with(window.inverse());
  std::vector<std::uint32_t> images;
  for (const auto& s : sym) {
    const std::uint32_t image = sigma.apply(s, v);
    // sigma_{s^-1}(v) is the sigma_s-preimage of v
    if (sigma.apply(s, sigma.apply(spec.inverse(s), v)) != v) return false;
    for (std::uint32_t seen : images)
      if (seen == image) return false;
    images.push_back(image);
  }
  return true;
}

}  // namespace meandim
