#pragma once

#include "meandim/group.hpp"
#include "meandim/rational.hpp"
#include "meandim/sofic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace meandim {

struct Tile {
  FiniteWindow shape;  // F_k, a subset of F
  std::uint32_t center = 0;
};

struct Tiling {
  std::size_t degree = 0;
  std::vector<Tile> tiles;
  std::size_t covered = 0;
  // Set when built with permissive = true; guarantees are then reported only.
  bool permissive = false;

  Rational coverage() const;
  // sigma(F_k) c_k for every k, in tile order.
  std::vector<std::vector<std::uint32_t>> tile_sets(const SoficMap& sigma) const;
};

// Greedy maximal collection of disjoint translates sigma(F_k) c_k with centers
// in B n W. Thresholds |F|, |F|-1, ..., ceil(tau |F| / 2) are tried in turn; in
// each round centers are scanned in ascending order and (F', c) is accepted
// when F' = {s in F : sigma_s(c) uncovered} reaches the threshold.
//
// Throws PreconditionError unless 0 < tau < 1, 0 <= eta < 1,
// |B| >= (1 - tau/(2(|F|+1))) d, |W| >= (1 - eta/(|F|+1)) d, B n W nonempty and
// every point of B is good for F. With permissive = true only the range checks
// on tau, eta and the nonempty intersection are enforced.
Tiling tile(const SoficMap& sigma, const FiniteWindow& window, const Rational& tau, const Rational& eta,
            const std::vector<std::uint32_t>& good, const std::vector<std::uint32_t>& allowed,
            bool permissive = false);

struct TilingVerdict {
  bool pass = true;
  // "", "shape-size", "shape-subset", "center-range", "overlap", "coverage"
  std::string failure;
  std::size_t k = 0;       // 1-based tile index
  std::size_t k2 = 0;      // second tile for overlaps (equal to k for a self-overlap)
  std::uint32_t point = 0;  // colliding point for overlaps
  Rational coverage;
  std::string describe() const;
};

// Rechecks the three guarantees from scratch: |F_k| >= tau |F| / 2 and
// F_k subset of F, pairwise disjoint tiles, coverage >= (1 - tau - eta) d.
TilingVerdict verify_tiling(const Tiling& t, const SoficMap& sigma, const FiniteWindow& window,
                            const Rational& tau, const Rational& eta);

// Every c in B n W has |sigma(F) c n covered| > (1 - tau/2) |F|. Returns the
// first center that fails, if any.
std::optional<std::uint32_t> maximality_violation(const Tiling& t, const SoficMap& sigma,
                                                  const FiniteWindow& window, const Rational& tau,
                                                  const std::vector<std::uint32_t>& good,
                                                  const std::vector<std::uint32_t>& allowed);

}  // namespace meandim
