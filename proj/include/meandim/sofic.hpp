#pragma once

// Maps sigma: Gamma -> Sym(d) given on generators and extended to every
// element along its normal-form word, plus an audit of how close such a map is
// to being multiplicative and separating on a window.
//
// Points of [d] are 0-based throughout.

#include "meandim/group.hpp"
#include "meandim/rational.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace meandim {

class Permutation {
 public:
  Permutation() = default;
  // Throws unless images is a bijection of {0, ..., size-1}.
  explicit Permutation(std::vector<std::uint32_t> images);
  static Permutation identity(std::size_t d);

  std::size_t size() const { return images_.size(); }
  std::uint32_t operator()(std::uint32_t v) const { return images_[v]; }
  const std::vector<std::uint32_t>& images() const { return images_; }
  Permutation inverse() const;
  // (a * b)(v) = a(b(v))
  friend Permutation operator*(const Permutation& a, const Permutation& b);
  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::uint32_t> images_;
};

// Seeded source for every random choice in the library: std::mt19937_64 (its
// output sequence is fixed by the standard) with rejection sampling for
// bounded draws, so results do not depend on the standard library vendor.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound);
  // Uniformly random permutation of [d] by Fisher-Yates.
  Permutation permutation(std::size_t d);

 private:
  std::mt19937_64 engine_;
};

class SoficMap {
 public:
  SoficMap(GroupSpec spec, std::vector<Permutation> generator_images, std::string construction,
           std::optional<std::uint64_t> seed = std::nullopt);

  const GroupSpec& spec() const { return spec_; }
  std::size_t degree() const { return degree_; }
  const Permutation& generator_image(int generator) const { return images_.at(generator); }
  const std::string& construction() const { return construction_; }
  const std::optional<std::uint64_t>& seed() const { return seed_; }

  // sigma_g(v): generator permutations composed along the normal form of g,
  // rightmost letter first. sigma_e is the identity.
  std::uint32_t apply(const GroupElement& g, std::uint32_t v) const;
  Permutation permutation(const GroupElement& g) const;

 private:
  GroupSpec spec_;
  std::size_t degree_;
  std::vector<Permutation> images_;
  std::vector<Permutation> inverse_images_;
  std::string construction_;
  std::optional<std::uint64_t> seed_;
};

// Gamma = Z: the generator acts as v -> v+1 mod d.
SoficMap from_cyclic(const GroupSpec& spec, std::size_t d);
// Gamma = Z^k: coordinatewise cyclic shifts on (Z/n)^k, d = n^k.
SoficMap from_torus(const GroupSpec& spec, std::size_t n);
// Gamma free: one permutation per free generator; an exact homomorphism.
SoficMap from_homomorphism(const GroupSpec& spec, std::vector<Permutation> images);
// One uniformly random permutation per generator.
SoficMap from_random(const GroupSpec& spec, std::size_t d, std::uint64_t seed);

// Left-regular action of the finite permutation group G generated by
// `generators` (permutations of a small set), pulled back along the free
// group: sigma is the coset action of the kernel of F_k -> G, d = |G|.
// Throws if |G| exceeds max_order.
SoficMap from_regular_action(const GroupSpec& spec, const std::vector<Permutation>& generators,
                             std::size_t max_order);

// Searches seeded random quotients F_k -> S_m x Z/c (m in {5, 6}) for a
// regular action with d in [d_min, d_max] that separates every pair of
// distinct elements of `window`. Deterministic in the seed.
SoficMap random_finite_quotient(const GroupSpec& spec, std::uint64_t seed, std::size_t d_min,
                                std::size_t d_max, const FiniteWindow& window,
                                int max_attempts = 5000);

struct GoodnessReport {
  FiniteWindow window;
  Rational tau;
  std::size_t degree = 0;
  // min over s, t in F of |{v : sigma_s sigma_t v = sigma_st v}| / d
  Rational multiplicativity;
  // min over distinct s, t in F of |{v : sigma_s v != sigma_t v}| / d
  Rational separation;
  // v with all sigma_s(v) distinct and sigma_{s^-1}(v) = sigma_s^{-1}(v)
  // for s in F u F^-1, ascending.
  std::vector<std::uint32_t> good_set;
  // (1 - tau / (2(|F|+1))) d, the good-set size tile() requires.
  Rational good_set_threshold;
  bool meets_threshold = false;
};

GoodnessReport goodness(const SoficMap& sigma, const FiniteWindow& window, const Rational& tau);

// Membership of a single point in the good set, computed directly.
bool is_good_point(const SoficMap& sigma, const FiniteWindow& window, std::uint32_t v);

}  // namespace meandim
