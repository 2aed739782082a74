#include "meandim/bracket.hpp"

#include <limits>

namespace meandim {

double Value::approx() const {
  switch (kind_) {
    case Kind::rational:
      return to_double(q_);
    case Kind::log:
      return l_.value();
    case Kind::pos_inf:
      return std::numeric_limits<double>::infinity();
    case Kind::neg_inf:
      break;
  }
  return -std::numeric_limits<double>::infinity();
}

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::rational:
      return meandim::to_string(q_);
    case Kind::log:
      return l_.count() == 1 ? "0" : l_.to_string();
    case Kind::pos_inf:
      return "inf";
    case Kind::neg_inf:
      break;
  }
  return "-inf";
}

namespace {

int rank(Value::Kind k) {
  return k == Value::Kind::neg_inf ? 0 : k == Value::Kind::pos_inf ? 2 : 1;
}

// Sign of log(N)/m, which is 0 iff N = 1.
int sign_of(const LogRatio& l) { return l.count() == 1 ? 0 : 1; }

}  // namespace

std::partial_ordering operator<=>(const Value& a, const Value& b) {
  using K = Value::Kind;
  if (rank(a.kind_) != rank(b.kind_)) return rank(a.kind_) <=> rank(b.kind_);
  if (rank(a.kind_) != 1) return std::partial_ordering::equivalent;
  if (a.kind_ == K::rational && b.kind_ == K::rational)
    return a.q_ < b.q_ ? std::partial_ordering::less
           : b.q_ < a.q_ ? std::partial_ordering::greater
                         : std::partial_ordering::equivalent;
  if (a.kind_ == K::log && b.kind_ == K::log) return a.l_ <=> b.l_;
  // Mixed: settle against zero exactly, otherwise in doubles.
  const bool a_rat = a.kind_ == K::rational;
  const Rational& q = a_rat ? a.q_ : b.q_;
  const LogRatio& l = a_rat ? b.l_ : a.l_;
  std::partial_ordering r = std::partial_ordering::equivalent;
  if (q == 0 || sign_of(l) == 0) {
    const int sq = q == 0 ? 0 : (q > 0 ? 1 : -1);
    r = sq <=> sign_of(l);
  } else {
    r = to_double(q) <=> l.value();
  }
  if (a_rat) return r;
  return r == std::partial_ordering::less ? std::partial_ordering::greater
         : r == std::partial_ordering::greater ? std::partial_ordering::less
                                               : r;
}

}  // namespace meandim
