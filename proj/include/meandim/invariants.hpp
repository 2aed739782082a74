#pragma once

// Window-infimum invariants. Each inf over all windows is reported as an
// upper bound over a declared WindowFamily, paired with a lower bound that is
// valid for the true infimum.

#include "meandim/bracket.hpp"
#include "meandim/group.hpp"
#include "meandim/spaces.hpp"

#include <optional>
#include <string>
#include <vector>

namespace meandim {

using DistanceMatrix = std::vector<std::vector<Rational>>;

struct InvariantResult {
  Bracket bracket;
  std::vector<Row> rows;
};

// ---- separated sets --------------------------------------------------------

// Largest subset with pairwise distance >= eps (a maximum clique in the
// ">= eps" graph, by branch and bound). Throws above `limit` points.
std::size_t separated_exact(const DistanceMatrix& dist, const Rational& eps, std::size_t limit = 20);

// Greedy insertion in input order. The result is maximal, hence eps-spanning,
// so N_{2 eps} <= size <= N_eps.
std::vector<std::size_t> separated_greedy(const DistanceMatrix& dist, const Rational& eps);

DistanceMatrix line_distances(const std::vector<Rational>& points);

// ---- entropy ---------------------------------------------------------------

struct SeparatedCount {
  BigInt count;        // N_eps(X, rho_F) or an upper bound for it
  bool exact = false;  // count equals N_eps(X, rho_F)
  std::string method;
};

// N_eps(X, rho_F) for a finite-alphabet system. rho.window is ignored; F is
// passed separately. Under rho_disc the metric rho_F only reads the
// coordinates F^-1; under the induced metric, points agreeing on
// F^-1 {s_1..s_w} are closer than eps once diam 2^-w < eps.
SeparatedCount separated_count(const ShiftSystem& sys, const PseudometricSpec& rho, const Rational& eps,
                               const FiniteWindow& window);

// Bracket on inf_F log N_eps(X, rho_F) / |F|.
InvariantResult naive_eps_entropy(const ShiftSystem& sys, const PseudometricSpec& rho, const Rational& eps,
                                  const WindowFamily& family);

// ---- mean dimension --------------------------------------------------------

struct WdimOptions {
  // Largest eps for which the linear lower bound is used; defaults to diam/4.
  std::optional<Rational> eps0;
  // Slope m instead of m - 1 for the sup-metric cube (an outside result).
  bool cube_refinement = false;
};

// Wdim_eps(X, rho~_F) for X = ([0,1]^m)^Gamma. Upper: m |F^-1 {s_1..s_w}| with w
// the least depth whose omitted weight 2^-w is below eps. Lower: |F|(m - 1)
// (or |F| m with the refinement) when eps < eps0, else 0.
Bracket wdim_bracket(const ShiftSystem& sys, const Rational& eps, const FiniteWindow& window,
                     const WdimOptions& options = {});

// Coordinates an eps-embedding has to keep: F^-1 {s_1..s_w}.
FiniteWindow embedding_window(const GroupSpec& group, const Rational& eps, const FiniteWindow& window);

struct AlphabetFactor {
  bool cube = false;
  int size = 1;  // letters for a finite factor, dimension for a cube
};

// inf_n dim(K^n)/n for a product of finite sets and cubes.
Rational stabdim(const std::vector<AlphabetFactor>& factors);

InvariantResult naive_mdim_bracket(const ShiftSystem& sys, const Rational& eps, const WindowFamily& family,
                                   const WdimOptions& options = {});

// min over F in the family of |SF| / |F|.
InvariantResult amplification(const FiniteWindow& s, const WindowFamily& family);

// ---- orbit capacity --------------------------------------------------------

// A = union of cylinders [x restricted to P.window = P.letters].
InvariantResult orbit_capacity(const ShiftSystem& sys, const std::vector<Pattern>& cylinders,
                               const WindowFamily& family, Admissibility mode = Admissibility::global);

// sup_x sum_{s in F} 1_A(sx), exact over admissible patterns of the chosen mode.
std::size_t orbit_visits(const ShiftSystem& sys, const std::vector<Pattern>& cylinders, const FiniteWindow& window,
                         Admissibility mode, std::string* method = nullptr);

// ---- decay -----------------------------------------------------------------

struct DecayRow {
  Rational eps;
  double entropy_ratio = 0;   // h_eps upper / |log eps|
  double capacity_ratio = 0;  // log N_eps(X, rho) / |log eps|
  double product = 0;
};

struct DecayResult {
  std::vector<DecayRow> rows;  // eps descending
  bool trends_to_zero = false;
};

// eps must lie in (0, 1).
DecayResult decay_diagnostic(const ShiftSystem& sys, const PseudometricSpec& rho, std::vector<Rational> eps_grid,
                             const WindowFamily& family);

}  // namespace meandim
