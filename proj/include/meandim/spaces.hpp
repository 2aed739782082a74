#pragma once

// Model spaces for shift actions: finite metric alphabets and symbolic cubes,
// full shifts and subshifts of finite type, finitely described points, the
// shift action (sx)_t = x_{s^-1 t}, and the metrics built on top of them.

#include "meandim/group.hpp"
#include "meandim/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace meandim {

class AlphabetSpace {
 public:
  // Throws unless the matrix is square, symmetric, zero on the diagonal,
  // positive off it, and satisfies the triangle inequality.
  explicit AlphabetSpace(std::vector<std::vector<Rational>> metric);
  // k letters, all pairwise at distance 1.
  static AlphabetSpace discrete(int k);
  // Points of the real line with |a - b|.
  static AlphabetSpace on_line(const std::vector<Rational>& points);

  int size() const { return static_cast<int>(metric_.size()); }
  const Rational& distance(int a, int b) const { return metric_[a][b]; }
  const std::vector<std::vector<Rational>>& matrix() const { return metric_; }
  Rational diameter() const;
  // Smallest positive distance; nullopt for a one-letter alphabet.
  std::optional<Rational> min_gap() const;

 private:
  std::vector<std::vector<Rational>> metric_;
};

// [0,1]^dim with the sup metric. Only dimension arithmetic is done on it.
struct CubeSpace {
  int dim = 1;
};

// Letters on a finite window, aligned with window order.
struct Pattern {
  FiniteWindow window;
  std::vector<int> letters;

  std::optional<int> at(const GroupElement& g) const;
  std::string describe() const;
};

enum class Admissibility {
  local,   // no forbidden pattern fits inside the window
  global,  // extends to a point of the subshift (one-dimensional only)
};

const char* to_string(Admissibility a);

class ShiftSystem {
 public:
  static ShiftSystem full(GroupSpec group, AlphabetSpace alphabet);
  // Forbidden patterns are excluded at every translate: x contains P at t
  // when x_{t u} = P(u) for all u in the window of P.
  static ShiftSystem subshift(GroupSpec group, AlphabetSpace alphabet, std::vector<Pattern> forbidden);
  static ShiftSystem cube(GroupSpec group, CubeSpace cube);
  // Binary shift over Z without two adjacent ones.
  static ShiftSystem golden_mean();

  const GroupSpec& group() const { return group_; }
  bool is_cube() const { return cube_.has_value(); }
  bool is_full() const { return forbidden_.empty(); }
  // Throws for cube systems.
  const AlphabetSpace& alphabet() const;
  const CubeSpace& cube_space() const;
  const std::vector<Pattern>& forbidden() const { return forbidden_; }
  std::string describe() const;

 private:
  ShiftSystem(GroupSpec group, std::optional<AlphabetSpace> alphabet, std::optional<CubeSpace> cube,
              std::vector<Pattern> forbidden);
  GroupSpec group_;
  std::optional<AlphabetSpace> alphabet_;
  std::optional<CubeSpace> cube_;
  std::vector<Pattern> forbidden_;
};

// A point given by its letters on a finite support and a tail: a constant
// letter everywhere else, or unknown (nullopt) when only the support matters.
class Configuration {
 public:
  Configuration(GroupSpec group, std::map<GroupElement, int> letters, std::optional<int> tail);
  static Configuration constant(GroupSpec group, int letter);
  static Configuration from_pattern(const Pattern& p, std::optional<int> tail);

  const GroupSpec& group() const { return group_; }
  const std::map<GroupElement, int>& letters() const { return letters_; }
  const std::optional<int>& tail() const { return tail_; }
  std::optional<int> at(const GroupElement& g) const;
  std::string describe() const;

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.letters_ == b.letters_ && a.tail_ == b.tail_;
  }

 private:
  GroupSpec group_;
  std::map<GroupElement, int> letters_;  // entries equal to a known tail are dropped
  std::optional<int> tail_;
};

// (sx)_t = x_{s^-1 t}
Configuration act(const GroupElement& s, const Configuration& x);

// True unless some forbidden pattern occurs at a translate whose cells all
// carry known letters (support cells, or the constant tail).
bool admits(const ShiftSystem& sys, const Configuration& x);

struct PseudometricSpec {
  enum class Base {
    induced,  // sum_{n=1}^{depth} 2^-n rho(x_{s_n}, y_{s_n}) over the fixed enumeration
    disc,     // rho(x_e, y_e)
  };
  Base base = Base::disc;
  int depth = 0;
  std::optional<FiniteWindow> window;  // rho_F = max_{s in F} base(sx, sy)

  std::string describe() const;
};

// Certified value: coordinates with an unknown letter contribute [0, diam],
// and the omitted tail of the induced series contributes [0, diam 2^-depth].
Enclosure eval_metric(const ShiftSystem& sys, const PseudometricSpec& rho, const Configuration& x,
                      const Configuration& y);

struct MicrostateDistances {
  Enclosure rho2;
  Enclosure rho_inf;
};

// rho_2 = sqrt(mean of squared distances), rho_inf = max distance.
MicrostateDistances microstate_metrics(const ShiftSystem& sys, const PseudometricSpec& rho,
                                       const std::vector<Configuration>& phi,
                                       const std::vector<Configuration>& psi);

// All admissible patterns on W in lexicographic order of their letter vectors.
// Global admissibility needs the group Z.
std::vector<Pattern> enumerate_patterns(const ShiftSystem& sys, const FiniteWindow& window,
                                        Admissibility mode = Admissibility::local);
BigInt count_patterns(const ShiftSystem& sys, const FiniteWindow& window,
                      Admissibility mode = Admissibility::local);

// A subshift over Z seen as a finite-memory constraint: forbidden words are
// stored by integer offsets and `span` is the longest forbidden extent.
class LineShift {
 public:
  explicit LineShift(const ShiftSystem& sys);  // throws unless the group is Z

  int letters() const { return k_; }
  int span() const { return span_; }

  // Some forbidden word sits on [end - extent + 1, end] given the letters
  // word[0..] on positions [start, end].
  bool violates_at_end(const std::vector<int>& word) const;
  bool locally_admissible(const std::vector<int>& word) const;
  // Extends to a bi-infinite point of the subshift.
  bool globally_admissible(const std::vector<int>& word) const;
  BigInt count(int n, Admissibility mode) const;

 private:
  struct Word {
    std::vector<int> offsets;  // relative to the leftmost cell, ascending
    std::vector<int> letters;
    int extent = 1;
  };
  int k_ = 0;
  int span_ = 1;
  std::vector<Word> words_;
  // Blocks of length span-1 lying on a left-infinite / right-infinite path.
  std::vector<std::vector<int>> left_viable_;
  std::vector<std::vector<int>> right_viable_;
  void compute_viable();
  bool is_left_viable(const std::vector<int>& block) const;
  bool is_right_viable(const std::vector<int>& block) const;
};

}  // namespace meandim
