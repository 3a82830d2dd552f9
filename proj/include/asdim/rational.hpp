#ifndef ASDIM_RATIONAL_HPP
#define ASDIM_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace asdim {

// Arithmetic on certificate values is exact; any overflow must surface as an
// error rather than a silently wrong certificate.
struct OverflowError : std::runtime_error {
    OverflowError() : std::runtime_error("rational overflow") {}
};

using i64 = std::int64_t;
using i128 = __int128;

inline i64 checked_cast(i128 v) {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN)) throw OverflowError();
    return static_cast<i64>(v);
}

// Reduced fraction num/den with den > 0.  Intermediate products are computed
// in 128 bits and checked when narrowed back to 64.
class Rat {
  public:
    Rat() : num_(0), den_(1) {}
    Rat(i64 n) : num_(n), den_(1) {}
    Rat(i64 n, i64 d) : num_(n), den_(d) { normalize(); }

    i64 num() const { return num_; }
    i64 den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }

    Rat operator-() const { return Rat(-num_, den_, raw_tag{}); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        i128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
        i128 d = i128(a.den_) * b.den_;
        return from128(n, d);
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::domain_error("division by zero rational");
        return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }

    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

    Rat squared() const { return *this * *this; }

    double to_double() const { return double(num_) / double(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Parses "a" or "a/b".
    static Rat parse(const std::string& s);

  private:
    struct raw_tag {};
    Rat(i64 n, i64 d, raw_tag) : num_(n), den_(d) {}

    static Rat from128(i128 n, i128 d) {
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        return Rat(checked_cast(n), checked_cast(d), raw_tag{});
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        if (den_ == 0) throw std::domain_error("zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        i64 g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    i64 num_;
    i64 den_;
};

inline Rat Rat::parse(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(std::stoll(s));
        return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::logic_error&) {
        throw std::domain_error("bad rational literal: " + s);
    }
}

inline Rat abs(const Rat& r) { return r.num() < 0 ? -r : r; }
inline Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// A rational extended with +infinity, the value of a distance to an empty
// set.  Lebesgue numbers and depth computations live here.
class ExtRat {
  public:
    ExtRat() : inf_(false), v_() {}
    ExtRat(Rat v) : inf_(false), v_(v) {}
    ExtRat(i64 v) : inf_(false), v_(v) {}
    static ExtRat infinity() { ExtRat e; e.inf_ = true; return e; }

    bool is_infinite() const { return inf_; }
    const Rat& finite() const {
        if (inf_) throw std::domain_error("infinite value");
        return v_;
    }

    friend bool operator==(const ExtRat& a, const ExtRat& b) {
        if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
        return a.v_ == b.v_;
    }
    friend bool operator<(const ExtRat& a, const ExtRat& b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.v_ < b.v_;
    }
    friend bool operator>(const ExtRat& a, const ExtRat& b) { return b < a; }
    friend bool operator<=(const ExtRat& a, const ExtRat& b) { return !(b < a); }
    friend bool operator>=(const ExtRat& a, const ExtRat& b) { return !(a < b); }
    friend bool operator>(const ExtRat& a, const Rat& b) { return a > ExtRat(b); }
    friend bool operator>=(const ExtRat& a, const Rat& b) { return a >= ExtRat(b); }

    std::string str() const { return inf_ ? "inf" : v_.str(); }

  private:
    bool inf_;
    Rat v_;
};

inline ExtRat min(const ExtRat& a, const ExtRat& b) { return a < b ? a : b; }
inline ExtRat max(const ExtRat& a, const ExtRat& b) { return a < b ? b : a; }

} // namespace asdim

#endif
