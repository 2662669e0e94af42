#pragma once

#include <cstdint>
#include <string>

#include "errors.hpp"

namespace valrig {

// Residue modulo a prime p, normalized to [0, p).  The modulus rides along
// in every element because p is a runtime choice; mixed-modulus arithmetic
// is a hard error.  p is capped below 2^31 so products fit in uint64.
class Fp {
public:
    Fp() : v_(0), p_(0) {}
    Fp(uint64_t v, uint64_t p) : v_(v % p), p_(p) {}

    uint64_t value() const { return v_; }
    uint64_t modulus() const { return p_; }

    bool is_zero() const { return v_ == 0; }
    bool is_one() const { return v_ == 1; }

    Fp operator-() const { return Fp(v_ == 0 ? 0 : p_ - v_, p_); }
    Fp operator+(const Fp& o) const { check(o); return Fp(v_ + o.v_, p_); }
    Fp operator-(const Fp& o) const { check(o); return Fp(v_ + p_ - o.v_, p_); }
    Fp operator*(const Fp& o) const { check(o); return Fp(v_ * o.v_, p_); }
    Fp operator/(const Fp& o) const { return *this * o.inv(); }
    Fp& operator+=(const Fp& o) { *this = *this + o; return *this; }
    Fp& operator-=(const Fp& o) { *this = *this - o; return *this; }
    Fp& operator*=(const Fp& o) { *this = *this * o; return *this; }

    bool operator==(const Fp& o) const { return v_ == o.v_ && p_ == o.p_; }
    bool operator!=(const Fp& o) const { return !(*this == o); }

    Fp inv() const {
        if (v_ == 0) throw validation_error("inverse of zero residue");
        // extended Euclid on (v, p); p prime so the gcd is 1
        int64_t t = 0, newt = 1;
        int64_t r = static_cast<int64_t>(p_), newr = static_cast<int64_t>(v_);
        while (newr != 0) {
            int64_t q = r / newr;
            int64_t tmp = t - q * newt; t = newt; newt = tmp;
            tmp = r - q * newr; r = newr; newr = tmp;
        }
        if (r != 1) throw validation_error("modulus is not prime");
        if (t < 0) t += static_cast<int64_t>(p_);
        return Fp(static_cast<uint64_t>(t), p_);
    }

private:
    void check(const Fp& o) const {
        if (p_ != o.p_) throw validation_error("mixed moduli in residue arithmetic");
    }

    uint64_t v_;
    uint64_t p_;
};

inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

struct FpField {
    using Elem = Fp;

    uint64_t p = 0;

    explicit FpField(uint64_t prime) : p(prime) {
        if (!is_prime_u64(p)) throw validation_error("modulus " + std::to_string(p) + " is not prime");
        if (p > (uint64_t(1) << 31)) throw validation_error("modulus too large (must fit 31 bits)");
    }

    Fp zero() const { return Fp(0, p); }
    Fp one() const { return Fp(1, p); }
    Fp from_int(long n) const {
        long r = n % static_cast<long>(p);
        if (r < 0) r += static_cast<long>(p);
        return Fp(static_cast<uint64_t>(r), p);
    }

    bool operator==(const FpField& o) const { return p == o.p; }

    std::string name() const { return "Fp:" + std::to_string(p); }
};

} // namespace valrig
