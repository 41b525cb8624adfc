#ifndef PERMA_RATIONAL_HPP
#define PERMA_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace perma {

/// Exact rational arithmetic on 128-bit integers, overflow-checked.
/// Used only by the exact evaluation path of small alpha-permanents,
/// where it removes floating tolerances from closed-form checks.
class Rational {
public:
    using Int = __int128;

    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rational(long long n, long long d) : num_(n), den_(d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        normalize();
    }

    Rational operator+(const Rational& r) const {
        return Rational(checked_add(checked_mul(num_, r.den_), checked_mul(r.num_, den_)),
                        checked_mul(den_, r.den_), raw_tag{});
    }
    Rational operator-(const Rational& r) const {
        return Rational(checked_add(checked_mul(num_, r.den_), -checked_mul(r.num_, den_)),
                        checked_mul(den_, r.den_), raw_tag{});
    }
    Rational operator*(const Rational& r) const {
        return Rational(checked_mul(num_, r.num_), checked_mul(den_, r.den_), raw_tag{});
    }
    Rational operator-() const { return Rational(-num_, den_, raw_tag{}); }

    Rational& operator+=(const Rational& r) { return *this = *this + r; }
    Rational& operator*=(const Rational& r) { return *this = *this * r; }

    bool operator==(const Rational& r) const { return num_ == r.num_ && den_ == r.den_; }
    bool operator!=(const Rational& r) const { return !(*this == r); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string to_string() const;

private:
    struct raw_tag {};
    Rational(Int n, Int d, raw_tag) : num_(n), den_(d) { normalize(); }

    static Int checked_mul(Int a, Int b);
    static Int checked_add(Int a, Int b);

    void normalize();

    Int num_;
    Int den_;  // > 0 after normalization
};

}  // namespace perma

#endif
