#include "meandim/rational.hpp"

#include <cctype>
#include <cmath>

namespace meandim {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

BigInt parse_digits(std::string_view s) {
  BigInt r = 0;
  for (char c : s) r = r * 10 + (c - '0');
  return r;
}

BigInt pow10(int e) {
  BigInt r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    return Error("not a rational number: '" + std::string(text) + "'");
  };
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) throw fail();

  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw fail();
    BigInt d = parse_digits(den);
    if (d == 0) throw fail();
    value = Rational(parse_digits(num), d);
  } else {
    int exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      auto exp_text = s.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (!all_digits(exp_text) || exp_text.size() > 6) throw fail();
      exponent = std::stoi(std::string(exp_text));
      if (exp_negative) exponent = -exponent;
      s = s.substr(0, e);
    }
    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      int_part = s.substr(0, dot);
      frac_part = s.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) throw fail();
    if (!int_part.empty() && !all_digits(int_part)) throw fail();
    if (!frac_part.empty() && !all_digits(frac_part)) throw fail();
    BigInt mantissa = parse_digits(int_part) * pow10(static_cast<int>(frac_part.size())) +
                      parse_digits(frac_part);
    int scale = exponent - static_cast<int>(frac_part.size());
    value = scale >= 0 ? Rational(mantissa * pow10(scale))
                       : Rational(mantissa, pow10(-scale));
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

std::string to_string(const BigInt& n) { return n.str(); }

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational pow2(int exponent) {
  BigInt p = 1;
  p <<= (exponent < 0 ? -exponent : exponent);
  return exponent >= 0 ? Rational(p) : Rational(BigInt(1), p);
}

BigInt floor(const Rational& q) {
  BigInt n = numerator(q);
  BigInt d = denominator(q);
  BigInt r = n / d;  // truncates toward zero
  if (n < 0 && r * d != n) r -= 1;
  return r;
}

BigInt ceil(const Rational& q) {
  BigInt f = floor(q);
  return f == q ? f : BigInt(f + 1);
}

Enclosure max(const Enclosure& a, const Enclosure& b) {
  return {a.lo < b.lo ? b.lo : a.lo, a.hi < b.hi ? b.hi : a.hi};
}

Enclosure sqrt_enclosure(const Rational& q, int bits) {
  if (q < 0) throw PreconditionError("sqrt of a negative rational");
  BigInt n = numerator(q);
  BigInt d = denominator(q);
  BigInt rn = boost::multiprecision::sqrt(n);
  BigInt rd = boost::multiprecision::sqrt(d);
  if (rn * rn == n && rd * rd == d) return Enclosure::exact(Rational(rn, rd));
  // sqrt(n/d) = sqrt(n*d)/d; scale by 2^bits for the integer square root.
  BigInt scaled = n * d;
  scaled <<= (2 * bits);
  BigInt root = boost::multiprecision::sqrt(scaled);
  BigInt denom = d;
  denom <<= bits;
  Rational lo(root, denom);
  Rational hi(BigInt(root + 1), denom);
  return {lo, hi};
}

double log_big(const BigInt& n) {
  if (n <= 0) throw PreconditionError("log of a nonpositive integer");
  unsigned bits = boost::multiprecision::msb(n);
  if (bits < 60) return std::log(n.convert_to<double>());
  unsigned shift = bits - 60;
  BigInt top = n >> shift;
  return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

LogRatio::LogRatio(BigInt count, std::int64_t size)
    : count_(std::move(count)), size_(size) {
  if (count_ < 1) throw PreconditionError("LogRatio needs count >= 1");
  if (size_ < 1) throw PreconditionError("LogRatio needs size >= 1");
}

double LogRatio::value() const { return log_big(count_) / static_cast<double>(size_); }

std::string LogRatio::to_string() const {
  return "log(" + count_.str() + ")/" + std::to_string(size_);
}

bool operator==(const LogRatio& a, const LogRatio& b) {
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const LogRatio& a, const LogRatio& b) {
  double da = a.value();
  double db = b.value();
  double scale = std::max({1.0, std::abs(da), std::abs(db)});
  if (da < db - 1e-9 * scale) return std::strong_ordering::less;
  if (da > db + 1e-9 * scale) return std::strong_ordering::greater;
  // Close in floating point: decide exactly via a^n versus b^m.
  BigInt lhs = boost::multiprecision::pow(a.count_, static_cast<unsigned>(b.size_));
  BigInt rhs = boost::multiprecision::pow(b.count_, static_cast<unsigned>(a.size_));
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace meandim
