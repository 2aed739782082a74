#pragma once

// Finitely generated groups with an exact word problem: free groups, Z^d,
// finite groups given by a multiplication table, and direct products of these.
//
// Elements are stored in normal form (reduced words, integer vectors, table
// indices) and carry no pointer to their group; every operation goes through
// the owning GroupSpec. Windows (nonempty finite subsets) keep insertion order
// so reports are deterministic.

#include "meandim/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace meandim {

// One letter of a raw word: a generator (global index over all factors) raised
// to a nonzero integer power.
struct Letter {
  int generator = 0;
  int exponent = 1;
  friend bool operator==(const Letter&, const Letter&) = default;
};
using RawWord = std::vector<Letter>;

class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::vector<std::int32_t> data) : data_(std::move(data)) {}

  const std::vector<std::int32_t>& data() const { return data_; }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;

 private:
  std::vector<std::int32_t> data_;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept;
};

enum class FactorKind { free, lattice, finite };

class GroupSpec {
 public:
  static GroupSpec free(int rank);
  static GroupSpec lattice(int dim);
  // table[i][j] = index of element i*j. Generators are element indices.
  static GroupSpec finite(std::vector<std::vector<int>> table, std::vector<int> generators);
  static GroupSpec cyclic(int order);
  static GroupSpec product(const std::vector<GroupSpec>& factors);
  // "free:2", "lattice:2", "Z", "Z^3", "F2", "cyclic:5", and products joined
  // by " x " (e.g. "lattice:1 x cyclic:3").
  static GroupSpec parse(std::string_view text);

  // Canonical structural description; equal descriptors mean equal groups.
  const std::string& descriptor() const;

  std::size_t factor_count() const;
  FactorKind factor_kind(std::size_t factor) const;
  int factor_rank(std::size_t factor) const;  // rank, dim, or number of generators

  int generator_count() const;  // abstract generators, inverses not counted
  const std::string& generator_name(int generator) const;
  // Generators followed by their inverses: g1, g1^-1, g2, g2^-1, ...
  std::vector<GroupElement> symmetric_generators() const;

  GroupElement identity() const;
  GroupElement generator(int generator, int exponent = 1) const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  GroupElement normal_form(const RawWord& word) const;
  // Canonical word of an element, following its normal form factor by factor.
  RawWord word_of(const GroupElement& g) const;
  bool is_identity(const GroupElement& g) const { return g == identity(); }

  // Parses words such as "aB", "a.a^-1.b", "x^2y^-1", "g1^7", "e", and for
  // the integers also plain numerals ("-3").
  GroupElement parse_element(std::string_view text) const;
  std::string format(const GroupElement& g) const;

  // Z given as free:1 or lattice:1.
  bool is_integers() const;
  std::int64_t to_integer(const GroupElement& g) const;
  GroupElement from_integer(std::int64_t n) const;
  // Single lattice factor Z^d.
  std::optional<int> lattice_dim() const;
  std::vector<std::int64_t> lattice_coordinates(const GroupElement& g) const;
  GroupElement from_lattice(const std::vector<std::int64_t>& coords) const;
  std::optional<int> free_rank() const;
  bool is_finite() const;
  // Free groups, lattices, and products of them: orderable, so the integral
  // group ring has no zero divisors.
  bool is_torsion_free_orderable() const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.descriptor() == b.descriptor();
  }

  struct Impl;

 private:
  explicit GroupSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Nonempty, duplicate-free, ordered finite subset of a group.
class FiniteWindow {
 public:
  FiniteWindow(GroupSpec spec, std::vector<GroupElement> elements, std::string label = {});

  const GroupSpec& spec() const { return spec_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<GroupElement>& elements() const { return elements_; }
  const GroupElement& operator[](std::size_t i) const { return elements_[i]; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  bool contains(const GroupElement& g) const { return index_.contains(g); }
  std::optional<std::size_t> index_of(const GroupElement& g) const;

  // A short human label such as "ball:2"; empty for ad-hoc windows.
  const std::string& label() const { return label_; }
  std::string describe() const;
  std::vector<std::string> words() const;

  FiniteWindow inverse() const;
  FiniteWindow union_with(const FiniteWindow& other) const;
  FiniteWindow with_label(std::string label) const;

 private:
  GroupSpec spec_;
  std::vector<GroupElement> elements_;
  std::unordered_map<GroupElement, std::size_t, GroupElementHash> index_;
  std::string label_;
};

// Deterministic enumeration s_1 = e, s_2, ... : breadth-first by word length,
// expanding each element by right multiplication with the symmetric generators
// in their fixed order. Within a length this is shortlex order of the words.
class Enumeration {
 public:
  explicit Enumeration(GroupSpec spec);
  // Next element, or nothing once a finite group is exhausted.
  std::optional<GroupElement> next();
  // The first n elements (fewer if the group is finite and smaller).
  static std::vector<GroupElement> first(const GroupSpec& spec, std::size_t n);

 private:
  GroupSpec spec_;
  std::vector<GroupElement> generators_;
  std::vector<GroupElement> queue_;
  std::size_t head_ = 0;
  std::unordered_map<GroupElement, std::size_t, GroupElementHash> seen_;
};

FiniteWindow ball(const GroupSpec& spec, int radius);
// {lo, lo+1, ..., hi} in Z.
FiniteWindow interval(const GroupSpec& spec, std::int64_t lo, std::int64_t hi);
// [0, n)^d in Z^d.
FiniteWindow box(const GroupSpec& spec, std::int64_t n);

FiniteWindow product_window(const FiniteWindow& k, const FiniteWindow& f);
// |KF \ F| / |F|.
Rational folner_defect(const FiniteWindow& k, const FiniteWindow& f);

// "ball:r", "interval:a..b", "box:n", "identity", "list:w1,w2,...".
FiniteWindow parse_window(const GroupSpec& spec, std::string_view text);

// Ordered list of windows over one group; the domain of every window infimum.
class WindowFamily {
 public:
  explicit WindowFamily(std::vector<FiniteWindow> windows);
  const std::vector<FiniteWindow>& windows() const { return windows_; }
  std::size_t size() const { return windows_.size(); }
  const GroupSpec& spec() const { return windows_.front().spec(); }
  auto begin() const { return windows_.begin(); }
  auto end() const { return windows_.end(); }

 private:
  std::vector<FiniteWindow> windows_;
};

// "balls:a..b", "intervals:a..b" (windows {0..n-1}), "boxes:a..b", or a
// ';'-separated list of window specs.
WindowFamily parse_family(const GroupSpec& spec, std::string_view text);

}  // namespace meandim
