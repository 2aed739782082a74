#include "meandim/tiling.hpp"

#include <algorithm>

namespace meandim {

namespace {

Rational ratio(std::size_t a, std::size_t b) {
  return Rational(static_cast<long long>(a), static_cast<long long>(b));
}

std::vector<std::uint32_t> intersect(std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<std::uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void check_points(const std::vector<std::uint32_t>& pts, std::size_t d, const char* name) {
  for (auto v : pts)
    if (v >= d) throw PreconditionError(std::string(name) + " contains " + std::to_string(v) + " outside [d]");
}

}  // namespace

Rational Tiling::coverage() const { return degree == 0 ? Rational(0) : ratio(covered, degree); }

std::vector<std::vector<std::uint32_t>> Tiling::tile_sets(const SoficMap& sigma) const {
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& t : tiles) {
    std::vector<std::uint32_t> set;
    for (const auto& s : t.shape) set.push_back(sigma.apply(s, t.center));
    out.push_back(std::move(set));
  }
  return out;
}

Tiling tile(const SoficMap& sigma, const FiniteWindow& window, const Rational& tau, const Rational& eta,
            const std::vector<std::uint32_t>& good, const std::vector<std::uint32_t>& allowed,
            bool permissive) {
  if (!(window.spec() == sigma.spec())) throw Error("window and sofic map belong to different groups");
  if (tau <= 0 || tau >= 1) throw PreconditionError("tau must lie in (0,1)");
  if (eta < 0 || eta >= 1) throw PreconditionError("eta must lie in [0,1)");
  const std::size_t d = sigma.degree();
  const std::size_t n = window.size();
  check_points(good, d, "B");
  check_points(allowed, d, "W");
  const auto centers = intersect(good, allowed);
  if (centers.empty()) throw PreconditionError("B n W is empty");

  if (!permissive) {
    const auto b_size = intersect(good, good).size();
    const auto w_size = intersect(allowed, allowed).size();
    const Rational n1 = ratio(n + 1, 1);
    if (ratio(b_size, 1) < (1 - tau / (2 * n1)) * ratio(d, 1))
      throw PreconditionError("|B| = " + std::to_string(b_size) + " is below (1 - tau/(2(|F|+1))) d");
    if (ratio(w_size, 1) < (1 - eta / n1) * ratio(d, 1))
      throw PreconditionError("|W| = " + std::to_string(w_size) + " is below (1 - eta/(|F|+1)) d");
    for (auto v : good)
      if (!is_good_point(sigma, window, v))
        throw PreconditionError("point " + std::to_string(v) + " of B is not good for " + window.describe());
  }

  std::vector<Permutation> perms;
  for (const auto& s : window) perms.push_back(sigma.permutation(s));

  // Smallest integer k with k >= tau |F| / 2.
  const BigInt min_k = ceil(tau * ratio(n, 2));
  const std::size_t floor_k = std::max<std::size_t>(1, static_cast<std::size_t>(min_k));

  Tiling t;
  t.degree = d;
  t.permissive = permissive;
  std::vector<char> covered(d, 0);
  std::vector<std::size_t> fresh;
  for (std::size_t k = n; k >= floor_k; --k) {
    for (auto c : centers) {
      fresh.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (!covered[perms[i](c)]) fresh.push_back(i);
      // Points of a tile must be distinct; outside B that is not automatic.
      std::vector<std::uint32_t> pts;
      for (auto i : fresh) pts.push_back(perms[i](c));
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      if (pts.size() != fresh.size() || fresh.size() < k) continue;
      std::vector<GroupElement> shape;
      for (auto i : fresh) {
        shape.push_back(window[i]);
        covered[perms[i](c)] = 1;
      }
      t.covered += fresh.size();
      t.tiles.push_back({FiniteWindow(window.spec(), std::move(shape)), c});
    }
    if (k == floor_k) break;
  }
  return t;
}

std::string TilingVerdict::describe() const {
  if (pass) return "pass";
  if (failure == "overlap")
    return "overlap: tiles " + std::to_string(k) + " and " + std::to_string(k2) + " share point " +
           std::to_string(point);
  if (failure == "coverage") return "coverage " + to_string(coverage) + " below bound";
  return failure + ": tile " + std::to_string(k);
}

TilingVerdict verify_tiling(const Tiling& t, const SoficMap& sigma, const FiniteWindow& window,
                            const Rational& tau, const Rational& eta) {
  TilingVerdict out;
  const std::size_t d = sigma.degree();
  const Rational min_shape = tau * ratio(window.size(), 2);
  auto fail = [&](const char* what, std::size_t k, std::size_t k2 = 0, std::uint32_t v = 0) {
    out.pass = false;
    out.failure = what;
    out.k = k;
    out.k2 = k2;
    out.point = v;
    return out;
  };
  // owner[v] = 1-based index of the tile holding v
  std::vector<std::size_t> owner(d, 0);
  std::size_t covered = 0;
  for (std::size_t k = 0; k < t.tiles.size(); ++k) {
    const Tile& tl = t.tiles[k];
    if (ratio(tl.shape.size(), 1) < min_shape) return fail("shape-size", k + 1);
    for (const auto& s : tl.shape)
      if (!window.contains(s)) return fail("shape-subset", k + 1);
    if (tl.center >= d) return fail("center-range", k + 1);
    for (const auto& s : tl.shape) {
      const std::uint32_t v = sigma.apply(s, tl.center);
      if (owner[v] != 0) return fail("overlap", owner[v], k + 1, v);
      owner[v] = k + 1;
      ++covered;
    }
  }
  out.coverage = ratio(covered, d);
  if (out.coverage < 1 - tau - eta) {
    out.pass = false;
    out.failure = "coverage";
  }
  return out;
}

std::optional<std::uint32_t> maximality_violation(const Tiling& t, const SoficMap& sigma,
                                                  const FiniteWindow& window, const Rational& tau,
                                                  const std::vector<std::uint32_t>& good,
                                                  const std::vector<std::uint32_t>& allowed) {
  std::vector<char> covered(sigma.degree(), 0);
  for (const auto& set : t.tile_sets(sigma))
    for (auto v : set) covered[v] = 1;
  const Rational bound = (1 - tau / 2) * ratio(window.size(), 1);
  for (auto c : intersect(good, allowed)) {
    std::size_t hit = 0;
    for (const auto& s : window) hit += covered[sigma.apply(s, c)];
    if (ratio(hit, 1) <= bound) return c;
  }
  return std::nullopt;
}

}  // namespace meandim
