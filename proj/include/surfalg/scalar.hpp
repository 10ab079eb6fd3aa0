#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace surfalg {

// Element of Q (p == 0) or of F_p. Both operands of a binary operation must
// live in the same field; a default-constructed scalar is the rational 0 and
// adopts the field of the other operand.
class Scalar {
public:
    Scalar() = default;
    Scalar(long v, std::int64_t p = 0) : p_(p) {
        if (p_ == 0) q_ = v;
        else r_ = reduce(v);
    }
    static Scalar rational(const mpq_class& q) {
        Scalar s;
        s.q_ = q;
        s.q_.canonicalize();
        return s;
    }
    static Scalar fromString(const std::string& text, std::int64_t p) {
        if (p == 0) {
            mpq_class q;
            if (q.set_str(text, 10) != 0) throw std::invalid_argument("bad rational: " + text);
            q.canonicalize();
            if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
            return rational(q);
        }
        auto slash = text.find('/');
        mpz_class num(text.substr(0, slash), 10);
        mpz_class den = 1;
        if (slash != std::string::npos) den = mpz_class(text.substr(slash + 1), 10);
        mpz_class pz(static_cast<long>(p));
        mpz_class n = num % pz, d = den % pz;
        if (n < 0) n += pz;
        if (d < 0) d += pz;
        if (d == 0) throw std::invalid_argument("denominator vanishes mod p: " + text);
        Scalar a(n.get_si(), p), b(d.get_si(), p);
        return a / b;
    }

    std::int64_t prime() const { return p_; }
    bool isZero() const { return p_ == 0 ? q_ == 0 : r_ == 0; }
    bool isOne() const { return p_ == 0 ? q_ == 1 : r_ == 1; }

    Scalar zero() const { return Scalar(0, p_); }
    Scalar one() const { return Scalar(1, p_); }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        std::int64_t p = unify(a, b);
        Scalar s;
        s.p_ = p;
        if (p == 0) s.q_ = a.q_ + b.q_;
        else s.r_ = (a.fp(p) + b.fp(p)) % p;
        return s;
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }
    Scalar operator-() const {
        Scalar s = *this;
        if (p_ == 0) s.q_ = -q_;
        else s.r_ = (p_ - r_) % p_;
        return s;
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        std::int64_t p = unify(a, b);
        Scalar s;
        s.p_ = p;
        if (p == 0) s.q_ = a.q_ * b.q_;
        else s.r_ = static_cast<std::int64_t>((static_cast<__int128>(a.fp(p)) * b.fp(p)) % p);
        return s;
    }
    Scalar inverse() const {
        if (isZero()) throw std::domain_error("inverse of zero");
        Scalar s = *this;
        if (p_ == 0) s.q_ = 1 / q_;
        else s.r_ = powmod(r_, p_ - 2, p_);
        return s;
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

    Scalar pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        Scalar r = one(), b = *this;
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    friend bool operator==(const Scalar& a, const Scalar& b) { return (a - b).isZero(); }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    // Total order used only for canonical output; not a field order over F_p.
    friend bool operator<(const Scalar& a, const Scalar& b) {
        if (a.p_ == 0 && b.p_ == 0) return a.q_ < b.q_;
        return a.fp(unify(a, b)) < b.fp(unify(a, b));
    }

    std::string str() const {
        if (p_ == 0) return q_.get_str();
        return std::to_string(r_);
    }
    const mpq_class& rationalValue() const { return q_; }
    std::int64_t residue() const { return r_; }

private:
    std::int64_t p_ = 0;
    mpq_class q_ = 0;
    std::int64_t r_ = 0;

    std::int64_t reduce(long v) const {
        std::int64_t x = v % p_;
        return x < 0 ? x + p_ : x;
    }
    // A rational default-zero operand is promoted into F_p.
    std::int64_t fp(std::int64_t p) const {
        if (p_ == p) return r_;
        if (q_ == 0) return 0;
        throw std::logic_error("mixed-field scalar");
    }
    static std::int64_t unify(const Scalar& a, const Scalar& b) {
        if (a.p_ == b.p_) return a.p_;
        if (a.p_ == 0 && a.q_ == 0) return b.p_;
        if (b.p_ == 0 && b.q_ == 0) return a.p_;
        throw std::logic_error("mixed-field scalar");
    }
    static std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m) {
        __int128 r = 1, x = b % m;
        while (e > 0) {
            if (e & 1) r = r * x % m;
            x = x * x % m;
            e >>= 1;
        }
        return static_cast<std::int64_t>(r);
    }
};

inline bool isPrime(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

}  // namespace surfalg
