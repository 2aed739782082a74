#pragma once

// Microstate spaces Map(rho, F, delta, sigma): maps phi: [d] -> X with
// rho_2(s phi, phi o sigma_s) <= delta for every s in F.
//
// Points are kept only on the coordinates the checks read. A "model" site is
// an admissible pattern on W = C u F^-1 C, where C holds the coordinates rho
// reads; then s phi(v) and phi(sigma_s v) are both known on C.

#include "meandim/bracket.hpp"
#include "meandim/sofic.hpp"
#include "meandim/spaces.hpp"

#include <string>
#include <vector>

namespace meandim {

struct Microstate {
  std::vector<Configuration> sites;
  std::size_t degree() const { return sites.size(); }
  std::string describe() const;
};

struct MicrostateSpaceSpec {
  ShiftSystem sys;
  PseudometricSpec rho;
  FiniteWindow window;  // F
  Rational delta;       // >= 0; delta = 0 asks for exact equivariance
  SoficMap sigma;

  // Throws on a negative delta, cube systems, or mixed groups.
  void validate() const;
};

enum class Verdict { yes, no, undecided };
const char* to_string(Verdict v);

struct MembershipReport {
  Verdict verdict = Verdict::undecided;
  // Per s in F: enclosure of rho_2(s phi, phi o sigma_s)^2.
  std::vector<Enclosure> mean_square;
};

MembershipReport is_member(const MicrostateSpaceSpec& spec, const Microstate& phi);

// Coordinates read by rho: t^-1 (disc) or t^-1 s_n, n <= depth (induced),
// over t in rho's window.
FiniteWindow metric_coordinates(const ShiftSystem& sys, const PseudometricSpec& rho);
FiniteWindow model_window(const MicrostateSpaceSpec& spec);

// phi(v)_g = omega(sigma_{g^-1}(v)) for g in the support; tails unknown.
Microstate pullback(const ShiftSystem& sys, const std::vector<int>& omega, const SoficMap& sigma,
                    const FiniteWindow& support);

struct LowerBoundReport {
  bool pass = true;
  std::vector<std::size_t> counts;  // per s: #{v : rho(s phi(v), phi(sigma_s v)) <= sqrt(delta)}, certified
  Rational required;                // (1 - delta) d
};

// Throws PreconditionError unless phi is a certified member.
LowerBoundReport map_lowerbound_check(const MicrostateSpaceSpec& spec, const Microstate& phi);

// Model members by backtracking over sites in order 0..d-1, pruning on the
// certified lower part of each partial sum.
struct MemberEnumeration {
  FiniteWindow support;
  std::vector<Pattern> patterns;          // admissible site patterns on the support
  std::vector<std::vector<int>> members;  // pattern index per site
  std::size_t undecided = 0;              // leaves whose enclosure straddles delta
  bool complete = true;                   // false once a budget stopped the search

  Microstate microstate(std::size_t i) const;
};

MemberEnumeration enumerate_members(const MicrostateSpaceSpec& spec, std::size_t max_members,
                                    std::size_t max_nodes = 50'000'000);

struct SeparatedMicrostates {
  std::size_t count = 0;
  std::size_t candidates = 0;
  bool partial = false;  // a budget was hit, the count is a lower bound of the search space
  std::string method;
  Value per_site;  // log(count)/d, -inf when count = 0

  std::string describe() const;
};

// Certified lower bound on N_eps(Map, rho_inf). Full shifts: pullbacks of all
// labelings [d] -> A (members only), then greedy separation. Subshifts: greedy
// separation over enumerated model members.
SeparatedMicrostates count_separated_microstates(const MicrostateSpaceSpec& spec, const Rational& eps,
                                                 std::size_t budget);

// Largest rho_inf-separated family among all model members (exact maximum
// clique). Throws if the members do not fit the budget or 512 classes.
SeparatedMicrostates max_separated_microstates(const MicrostateSpaceSpec& spec, const Rational& eps,
                                               std::size_t budget);

}  // namespace meandim
