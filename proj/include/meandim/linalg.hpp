#pragma once

#include "meandim/rational.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace meandim {

using IntMatrix = std::vector<std::vector<BigInt>>;

IntMatrix identity_matrix(std::size_t n);
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);

struct SmithForm {
  IntMatrix u;  // rows x rows, unimodular
  IntMatrix d;  // u * m * v, diagonal with d_1 | d_2 | ... and d_i >= 0
  IntMatrix v;  // cols x cols, unimodular
  std::size_t rank = 0;
  std::vector<BigInt> invariants;  // nonzero diagonal entries
};

// `cols` is needed only when m has no rows.
SmithForm smith_normal_form(const IntMatrix& m, std::size_t cols = 0);

// Fraction-free Gaussian elimination.
std::size_t bareiss_rank(IntMatrix m);
BigInt bareiss_determinant(IntMatrix m);

// Sparse row: (column, nonzero coefficient), columns ascending.
using SparseRow = std::vector<std::pair<std::uint32_t, BigInt>>;

// Incremental rank over Q. Keeps integer rows in echelon form (distinct
// leading columns), each divided by the gcd of its entries.
class SparseEliminator {
 public:
  // Returns true when the row is independent of the rows added so far.
  bool add(SparseRow row);
  std::size_t rank() const { return pivots_.size(); }

 private:
  std::vector<std::pair<std::uint32_t, SparseRow>> pivots_;  // sorted by leading column
  const SparseRow* pivot_for(std::uint32_t col) const;
};

}  // namespace meandim
