#pragma once

// Finitely presented modules over the integral group ring and the ranks of
// their window subgroups A^F = sum_{s in F} s^-1 A. Ranks are computed in a
// truncation: coordinates on a ball B_R, modulo the relator translates whose
// support fits in B_R. Fewer relations can only raise the rank, so every
// truncated rank is an upper bound.

#include "meandim/bracket.hpp"
#include "meandim/group.hpp"
#include "meandim/linalg.hpp"
#include "meandim/sofic.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace meandim {

class GroupRingElement {
 public:
  explicit GroupRingElement(GroupSpec owner) : owner_(std::move(owner)) {}
  static GroupRingElement monomial(const GroupSpec& owner, const GroupElement& g, BigInt coefficient = 1);

  const GroupSpec& owner() const { return owner_; }
  const std::map<GroupElement, BigInt>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  BigInt coefficient(const GroupElement& g) const;
  void add_term(const GroupElement& g, const BigInt& c);

  GroupRingElement operator+(const GroupRingElement& o) const;
  GroupRingElement operator-(const GroupRingElement& o) const;
  GroupRingElement operator*(const GroupRingElement& o) const;
  // g * f
  GroupRingElement translate(const GroupElement& g) const;
  // "2*a - b + 3*e" with words in the group's notation; "0" when empty.
  std::string to_string() const;

  friend bool operator==(const GroupRingElement& a, const GroupRingElement& b) {
    return a.owner_ == b.owner_ && a.terms_ == b.terms_;
  }

 private:
  GroupSpec owner_;
  std::map<GroupElement, BigInt> terms_;  // no zero coefficients
};

// An element of the free module ZG^n.
using ModuleVector = std::vector<GroupRingElement>;

ModuleVector translate(const GroupElement& g, const ModuleVector& v);
bool is_zero(const ModuleVector& v);
// Union of the supports of all components.
std::vector<GroupElement> support(const ModuleVector& v);

class ZGModulePresentation {
 public:
  ZGModulePresentation(GroupSpec group, int rank, std::vector<ModuleVector> relators = {});

  const GroupSpec& group() const { return group_; }
  int rank() const { return rank_; }
  const std::vector<ModuleVector>& relators() const { return relators_; }
  bool is_free() const { return relators_.empty(); }
  std::string describe() const;

 private:
  GroupSpec group_;
  int rank_;
  std::vector<ModuleVector> relators_;  // zero relators dropped, canonical order
};

struct SubgroupSpec {
  std::vector<ModuleVector> generators;  // at least one
  std::string describe() const;
};

// Radii either absolute or as offsets from the least radius that holds all
// generator supports of the window at hand.
struct TruncationSchedule {
  std::vector<int> radii{0, 1};
  bool relative = true;

  // "2,3,4" (absolute) or "+0,+1,+2" (relative).
  static TruncationSchedule parse(std::string_view text);
  std::string describe() const;
};

// Module file:
//   group <descriptor>
//   rank <n>
//   relator <comp> <word> <coef> ; <comp> <word> <coef> ; ...
//   generator <comp> <word> <coef> ; ...
// '#' starts a comment. Components are 0-based.
struct ModuleFile {
  ZGModulePresentation presentation;
  SubgroupSpec subgroup;
};

ModuleFile parse_module_file(std::string_view text);
// "ZGamma-free" (Z, free of rank 1, A = <1>), "Z-trivial" (Z[t^+-1]/(t-1),
// A = <1>), "F2-ball2" (F2, free of rank 1, A spanned by B_2).
ModuleFile module_preset(std::string_view name);
std::vector<std::string> module_preset_names();

// Sparse rows of one truncated rank computation: the rank of the generators
// modulo the relations is rank(relations + generators) - rank(relations).
struct TruncatedSystem {
  int radius = 0;
  std::size_t columns = 0;
  std::vector<SparseRow> relations;
  std::vector<SparseRow> generators;
};

// Least radius R such that every s^-1 a_j is supported in B_R.
int minimal_radius(const ZGModulePresentation& pres, const SubgroupSpec& a, const FiniteWindow& window);

TruncatedSystem truncated_system(const ZGModulePresentation& pres, const SubgroupSpec& a, const FiniteWindow& window,
                                 int radius);
std::size_t rank_modulo(const TruncatedSystem& system);

struct WindowRank {
  std::vector<std::pair<int, std::size_t>> by_radius;  // (R, truncated rank)
  std::size_t rank = 0;  // at the largest radius computed; the best upper bound
  bool stable = false;   // two consecutive radii agreed, or no relators
  std::string describe() const;  // "R=3:1,R=4:1"
};

// Stops at the first pair of consecutive radii that agree. Radii below the
// minimal one are skipped; throws when none is left.
WindowRank window_subgroup_rank(const ZGModulePresentation& pres, const SubgroupSpec& a, const FiniteWindow& window,
                                const TruncationSchedule& schedule = {});

struct MeanRankResult {
  std::optional<Bracket> bracket;  // empty when no window stabilized
  std::vector<Row> rows;
  bool heuristic = true;  // upper bound rests on truncation stability
};

MeanRankResult naive_mean_rank_bracket(const ZGModulePresentation& pres, const SubgroupSpec& a,
                                       const WindowFamily& family, const TruncationSchedule& schedule = {});

struct SurrogateResult {
  Rational value;  // rank of A^d in M^d / M(B, F, sigma), divided by d
  std::size_t rank = 0;
  int radius = 0;
};

// radius < 0 picks the least radius holding every a_j, b and s b.
SurrogateResult sofic_rank_surrogate(const ZGModulePresentation& pres, const SubgroupSpec& a, const SubgroupSpec& b,
                                     const FiniteWindow& window, const SoficMap& sigma, int radius = -1,
                                     std::size_t max_columns = 2'000'000);

}  // namespace meandim
