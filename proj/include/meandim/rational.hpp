#pragma once

// Exact arithmetic helpers shared by every module: big rationals, certified
// enclosures, and exact log-ratios log(N)/m for entropy-style quantities.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace meandim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Parses "3", "-1/3", "0.25", "1e-2", "2.5E3" into an exact rational.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const BigInt& n);
double to_double(const Rational& q);

Rational pow2(int exponent);  // 2^exponent, exponent may be negative
BigInt ceil(const Rational& q);
BigInt floor(const Rational& q);

// Closed interval [lo, hi] of rationals; a certified enclosure of a value.
struct Enclosure {
  Rational lo;
  Rational hi;

  static Enclosure exact(Rational v) { return {v, v}; }
  bool is_exact() const { return lo == hi; }
  Enclosure& operator+=(const Enclosure& other) {
    lo += other.lo;
    hi += other.hi;
    return *this;
  }
};

Enclosure max(const Enclosure& a, const Enclosure& b);

// Rational enclosure of sqrt(q) for q >= 0. Exact whenever q is the square of a
// rational; otherwise the width is at most 2^-bits.
Enclosure sqrt_enclosure(const Rational& q, int bits = 64);

// The real number log(count) / size with count >= 1 and size >= 1, kept
// symbolically so that comparisons are exact: log(a)/m <= log(b)/n iff
// a^n <= b^m.
class LogRatio {
 public:
  LogRatio() = default;
  LogRatio(BigInt count, std::int64_t size);

  static LogRatio zero() { return LogRatio(1, 1); }

  const BigInt& count() const { return count_; }
  std::int64_t size() const { return size_; }
  double value() const;
  std::string to_string() const;  // e.g. "log(8)/3"

  friend bool operator==(const LogRatio& a, const LogRatio& b);
  friend std::strong_ordering operator<=>(const LogRatio& a,
                                          const LogRatio& b);

 private:
  BigInt count_ = 1;
  std::int64_t size_ = 1;
};

// Natural log of a big positive integer in double precision.
double log_big(const BigInt& n);

}  // namespace meandim
