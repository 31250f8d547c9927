#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcfl {

/// Exact rational; every probability in the library is one of these.
using Rational = mpq_class;

inline Rational rational(long num, unsigned long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline const Rational& zero() {
  static const Rational z(0);
  return z;
}

inline const Rational& one() {
  static const Rational o(1);
  return o;
}

inline const Rational& half() {
  static const Rational h(1, 2);
  return h;
}

/// "num/den", or just "num" when the denominator is 1.
inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Parses "n", "n/d" or "-n/d". Throws std::invalid_argument on garbage.
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  std::size_t start = text[0] == '-' ? 1 : 0;
  bool slash = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (c == '/') {
      if (slash || i == start || i + 1 == text.size())
        throw std::invalid_argument("malformed rational: " + std::string(text));
      slash = true;
    } else if (c < '0' || c > '9') {
      throw std::invalid_argument("malformed rational: " + std::string(text));
    }
  }
  Rational q;
  if (q.set_str(std::string(text), 10) != 0)
    throw std::invalid_argument("malformed rational: " + std::string(text));
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
  q.canonicalize();
  return q;
}

/// True iff the (canonical) denominator is a power of two.
inline bool is_dyadic(const Rational& q) {
  mpz_class d = q.get_den();
  return mpz_popcount(d.get_mpz_t()) == 1;
}

/// Closed interval of probabilities, lo <= hi.
struct Interval {
  Rational lo;
  Rational hi;

  static Interval exact(const Rational& q) { return {q, q}; }
  bool is_exact() const { return lo == hi; }
  bool disjoint(const Interval& other) const { return hi < other.lo || other.hi < lo; }
  bool overlaps(const Interval& other) const { return !disjoint(other); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline std::string to_string(const Interval& iv) {
  if (iv.is_exact()) return to_string(iv.lo);
  return "[" + to_string(iv.lo) + "," + to_string(iv.hi) + "]";
}

}  // namespace pcfl
