#pragma once

#include "meandim/rational.hpp"

#include <string>
#include <vector>

namespace meandim {

// An extended real that is either an exact rational, an exact log-ratio
// log(N)/m, or +-infinity.
class Value {
 public:
  enum class Kind { rational, log, pos_inf, neg_inf };

  Value() : Value(Rational(0)) {}
  Value(Rational q) : kind_(Kind::rational), q_(std::move(q)) {}  // NOLINT(implicit)
  Value(LogRatio l) : kind_(Kind::log), l_(std::move(l)) {}       // NOLINT(implicit)
  static Value infinity() { return Value(Kind::pos_inf); }
  static Value minus_infinity() { return Value(Kind::neg_inf); }

  Kind kind() const { return kind_; }
  const Rational& rational() const { return q_; }
  const LogRatio& log() const { return l_; }
  bool is_finite() const { return kind_ == Kind::rational || kind_ == Kind::log; }
  double approx() const;
  // "1/2", "log(8)/3", "inf", "-inf"
  std::string to_string() const;

  // Exact within a kind and against zero; rationals and logs are otherwise
  // compared in double precision.
  friend std::partial_ordering operator<=>(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

 private:
  explicit Value(Kind k) : kind_(k) {}
  Kind kind_;
  Rational q_;
  LogRatio l_;
};

struct Bracket {
  Value lower;
  Value upper;
  std::string lower_witness;
  std::string upper_witness;

  bool valid() const { return lower <= upper; }
  bool contains(const Value& v) const { return lower <= v && v <= upper; }
};

// One line of a per-window table: invariant, window, lower, upper, witness, status.
struct Row {
  std::string invariant;
  std::string window;
  Value lower;
  Value upper;
  std::string witness;
  std::string status;
};

}  // namespace meandim
