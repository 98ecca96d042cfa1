#pragma once
//
// Exact rational arithmetic used throughout the library.
//
// Rat is a thin value wrapper around GMP's mpq_class: always-canonical
// reduced fractions with unbounded integer numerator and denominator.
// Every solver quantity -- prices, buying probabilities, influence
// weights, revenues -- is a Rat, so no floating-point value ever enters
// a comparison, a pivot decision, or a reported result. Doubles appear
// only in diagnostics (to_double) and in test oracles.

#include <gmpxx.h>

#include <cctype>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace netprice {

class Rat {
 public:
  Rat() : v_(0) {}
  Rat(int n) : v_(n) {}                     // NOLINT(runtime/explicit)
  Rat(long n) : v_(n) {}                    // NOLINT(runtime/explicit)
  Rat(unsigned long n) : v_(n) {}           // NOLINT(runtime/explicit)
  Rat(long num, long den) : Rat(mpz_class(num), mpz_class(den)) {}
  explicit Rat(const mpz_class& z) : v_(z) {}
  explicit Rat(const mpq_class& q) : v_(q) {}
  Rat(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    v_ = mpq_class(num) / mpq_class(den);  // canonical, positive denominator
  }

  // Accepted spellings: "3", "-7/2", "+4", "0.125", ".5". Decimal forms
  // are exact (d.ddd -> scaled integer over a power of ten). Anything
  // else throws std::invalid_argument.
  static Rat parse(const std::string& text);

  const mpq_class& raw() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  double to_double() const { return v_.get_d(); }
  // Canonical form: plain integer when the denominator is 1, else "n/d".
  std::string to_string() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  Rat operator-() const { return Rat(mpq_class(-v_)); }

  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rat operator+(Rat x, const Rat& y) { return x += y; }
  friend Rat operator-(Rat x, const Rat& y) { return x -= y; }
  friend Rat operator*(Rat x, const Rat& y) { return x *= y; }
  friend Rat operator/(Rat x, const Rat& y) { return x /= y; }

  friend bool operator==(const Rat& x, const Rat& y) { return x.v_ == y.v_; }
  friend bool operator!=(const Rat& x, const Rat& y) { return x.v_ != y.v_; }
  friend bool operator<(const Rat& x, const Rat& y) { return x.v_ < y.v_; }
  friend bool operator<=(const Rat& x, const Rat& y) { return x.v_ <= y.v_; }
  friend bool operator>(const Rat& x, const Rat& y) { return x.v_ > y.v_; }
  friend bool operator>=(const Rat& x, const Rat& y) { return x.v_ >= y.v_; }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) {
    return os << r.to_string();
  }

 private:
  mpq_class v_;
};

using RatVec = std::vector<Rat>;
using RatMat = std::vector<std::vector<Rat>>;

inline Rat Rat::parse(const std::string& text) {
  auto fail = [&text]() -> void {
    throw std::invalid_argument("not a rational: '" + text + "'");
  };
  const std::string& s = text;
  std::size_t pos = 0;
  bool neg = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    neg = (s[pos] == '-');
    ++pos;
  }
  auto digits = [&s](std::size_t& p) {
    std::size_t start = p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    return s.substr(start, p - start);
  };
  std::string ipart = digits(pos);
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::string fpart = digits(pos);
    if (pos != s.size() || (ipart.empty() && fpart.empty())) fail();
    mpz_class num(ipart.empty() ? std::string("0") : ipart);
    mpz_class scale(1);
    for (char c : fpart) {
      num = num * 10 + (c - '0');
      scale *= 10;
    }
    if (neg) num = -num;
    return Rat(num, scale);
  }
  if (ipart.empty()) fail();
  if (pos == s.size()) {
    mpz_class num(ipart);
    if (neg) num = -num;
    return Rat(num, mpz_class(1));
  }
  if (s[pos] != '/') fail();
  ++pos;
  std::string dpart = digits(pos);
  if (dpart.empty() || pos != s.size()) fail();
  mpz_class num(ipart), den(dpart);
  if (den == 0) throw std::domain_error("zero denominator: '" + text + "'");
  if (neg) num = -num;
  return Rat(num, den);
}

inline Rat rat_abs(const Rat& r) { return r.sign() < 0 ? -r : r; }
inline const Rat& rat_min(const Rat& x, const Rat& y) { return y < x ? y : x; }
inline const Rat& rat_max(const Rat& x, const Rat& y) { return x < y ? y : x; }

// Largest integer <= r.
inline mpz_class rat_floor(const Rat& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.num().get_mpz_t(), r.den().get_mpz_t());
  return q;
}

// Smallest integer >= r.
inline mpz_class rat_ceil(const Rat& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.num().get_mpz_t(), r.den().get_mpz_t());
  return q;
}

// base^e for small nonnegative exponents (grid construction, generators).
inline Rat rat_pow(const Rat& base, unsigned long e) {
  Rat acc(1), b = base;
  while (e > 0) {
    if (e & 1UL) acc *= b;
    e >>= 1UL;
    if (e > 0) b *= b;
  }
  return acc;
}

inline namespace literals {
// Test and example convenience: "22/21"_q, "0.125"_q.
inline Rat operator""_q(const char* s, std::size_t) { return Rat::parse(s); }
}  // namespace literals

}  // namespace netprice
