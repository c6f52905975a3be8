// Exact rational arithmetic on 64-bit numerator/denominator.
//
// Counter fine-graining must reproduce its input probabilities with zero
// error, so the relevant bookkeeping is done over the rationals rather than
// in floating point.  Overflow throws instead of wrapping.

#ifndef QUASIM_RATIONAL_HPP_
#define QUASIM_RATIONAL_HPP_

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace quasim {

class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const auto n = checked(static_cast<__int128>(a.num_) * b.den_ +
                           static_cast<__int128>(b.num_) * a.den_);
    const auto d = checked(static_cast<__int128>(a.den_) * b.den_);
    return Rational(n, d);
  }

  friend Rational operator*(const Rational& a, const Rational& b) {
    const auto n = checked(static_cast<__int128>(a.num_) * b.num_);
    const auto d = checked(static_cast<__int128>(a.den_) * b.den_);
    return Rational(n, d);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN)
      throw std::overflow_error("rational: 64-bit overflow");
    return static_cast<std::int64_t>(v);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Least common multiple with overflow check.
inline std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  const std::int64_t g = std::gcd(a, b);
  const __int128 l = static_cast<__int128>(a / g) * b;
  if (l > INT64_MAX) throw std::overflow_error("lcm: 64-bit overflow");
  return static_cast<std::int64_t>(l);
}

}  // namespace quasim

#endif  // QUASIM_RATIONAL_HPP_
