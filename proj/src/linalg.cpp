#include "meandim/linalg.hpp"

#include <algorithm>

namespace meandim {

IntMatrix identity_matrix(std::size_t n) {
  IntMatrix m(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t rows = a.size();
  const std::size_t inner = b.size();
  const std::size_t cols = inner ? b[0].size() : 0;
  IntMatrix c(rows, std::vector<BigInt>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i) {
    if (a[i].size() != inner) throw Error("matrix shapes do not match");
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

namespace {

void swap_rows(IntMatrix& m, std::size_t i, std::size_t j) { std::swap(m[i], m[j]); }

void swap_cols(IntMatrix& m, std::size_t i, std::size_t j) {
  for (auto& row : m) std::swap(row[i], row[j]);
}

// row_i -= q * row_j
void sub_row(IntMatrix& m, std::size_t i, std::size_t j, const BigInt& q) {
  for (std::size_t c = 0; c < m[i].size(); ++c) m[i][c] -= q * m[j][c];
}

// col_i -= q * col_j
void sub_col(IntMatrix& m, std::size_t i, std::size_t j, const BigInt& q) {
  for (auto& row : m) row[i] -= q * row[j];
}

// Truncating division: |a - q b| < |b|.
BigInt quotient(const BigInt& a, const BigInt& b) { return a / b; }

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m, std::size_t cols) {
  const std::size_t rows = m.size();
  if (rows) cols = m[0].size();
  for (const auto& r : m)
    if (r.size() != cols) throw Error("ragged matrix");
  SmithForm s{identity_matrix(rows), m, identity_matrix(cols), 0, {}};
  IntMatrix& d = s.d;
  bool exhausted = false;
  for (std::size_t t = 0; t < std::min(rows, cols) && !exhausted; ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (d[i][j] != 0 && (pi == rows || abs(d[i][j]) < abs(d[pi][pj]))) {
            pi = i;
            pj = j;
          }
      if (pi == rows) {
        exhausted = true;
        break;
      }
      swap_rows(d, t, pi);
      swap_rows(s.u, t, pi);
      swap_cols(d, t, pj);
      swap_cols(s.v, t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (d[i][t] == 0) continue;
        BigInt q = quotient(d[i][t], d[t][t]);
        sub_row(d, i, t, q);
        sub_row(s.u, i, t, q);
        clean = clean && d[i][t] == 0;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (d[t][j] == 0) continue;
        BigInt q = quotient(d[t][j], d[t][t]);
        sub_col(d, j, t, q);
        sub_col(s.v, j, t, q);
        clean = clean && d[t][j] == 0;
      }
      if (!clean) continue;
      // The pivot must divide the whole trailing block.
      std::size_t bad = rows;
      for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (d[i][j] % d[t][t] != 0) {
            bad = i;
            break;
          }
      if (bad == rows) break;
      // row_t += row_bad, then reduce again.
      sub_row(d, t, bad, -1);
      sub_row(s.u, t, bad, -1);
    }
    if (!exhausted && d[t][t] < 0) {
      for (auto& x : d[t]) x = -x;
      for (auto& x : s.u[t]) x = -x;
    }
  }
  s.rank = 0;
  for (std::size_t t = 0; t < std::min(rows, cols); ++t)
    if (d[t][t] != 0) {
      ++s.rank;
      s.invariants.push_back(d[t][t]);
    }
  return s;
}

namespace {

// Returns rank; `det` receives the determinant when the matrix is square.
std::size_t bareiss(IntMatrix& m, BigInt* det) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  BigInt prev = 1;
  int sign = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    if (p != r) {
      std::swap(m[p], m[r]);
      sign = -sign;
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) m[i][j] = (m[i][j] * m[r][c] - m[i][c] * m[r][j]) / prev;
      m[i][c] = 0;
    }
    prev = m[r][c];
    ++r;
  }
  if (det) *det = (rows == cols && r == rows) ? BigInt(sign) * prev : BigInt(0);
  return r;
}

}  // namespace

std::size_t bareiss_rank(IntMatrix m) { return bareiss(m, nullptr); }

BigInt bareiss_determinant(IntMatrix m) {
  if (!m.empty() && m[0].size() != m.size()) throw Error("determinant of a non-square matrix");
  if (m.empty()) return 1;
  BigInt det;
  bareiss(m, &det);
  return det;
}

// ---- sparse --------------------------------------------------------------

const SparseRow* SparseEliminator::pivot_for(std::uint32_t col) const {
  auto it = std::lower_bound(pivots_.begin(), pivots_.end(), col,
                             [](const auto& p, std::uint32_t c) { return p.first < c; });
  if (it == pivots_.end() || it->first != col) return nullptr;
  return &it->second;
}

namespace {

// a * x - b * y on sparse rows
SparseRow combine(const BigInt& a, const SparseRow& x, const BigInt& b, const SparseRow& y) {
  SparseRow out;
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      out.emplace_back(x[i].first, a * x[i].second);
      ++i;
    } else if (i == x.size() || y[j].first < x[i].first) {
      out.emplace_back(y[j].first, -b * y[j].second);
      ++j;
    } else {
      BigInt v = a * x[i].second - b * y[j].second;
      if (v != 0) out.emplace_back(x[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

void make_primitive(SparseRow& row) {
  if (row.empty()) return;
  BigInt g = 0;
  for (const auto& [c, v] : row) {
    g = boost::multiprecision::gcd(g, v);
    if (g == 1) return;
  }
  if (row.front().second < 0) g = -g;
  for (auto& [c, v] : row) v /= g;
}

}  // namespace

bool SparseEliminator::add(SparseRow row) {
  row.erase(std::remove_if(row.begin(), row.end(), [](const auto& e) { return e.second == 0; }), row.end());
  std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < row.size(); ++i)
    if (row[i].first == row[i - 1].first) throw Error("sparse row with a repeated column");
  make_primitive(row);
  while (!row.empty()) {
    const SparseRow* p = pivot_for(row.front().first);
    if (!p) {
      const std::uint32_t lead = row.front().first;
      auto it = std::lower_bound(pivots_.begin(), pivots_.end(), lead,
                                 [](const auto& q, std::uint32_t c) { return q.first < c; });
      pivots_.emplace(it, lead, std::move(row));
      return true;
    }
    const BigInt a = p->front().second;
    const BigInt b = row.front().second;
    BigInt g = boost::multiprecision::gcd(a, b);
    row = combine(a / g, row, b / g, *p);
    make_primitive(row);
  }
  return false;
}

}  // namespace meandim
