#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "errors.hpp"

namespace valrig {

// Exact rational, always in lowest terms with positive denominator.
// Thin value wrapper over GMP's mpq_class; GMP keeps arithmetic results
// canonical, construction from raw num/den canonicalizes explicitly.
class Rat {
public:
    Rat() : v_(0) {}
    Rat(long n) : v_(n) {}
    Rat(long n, long d) : v_(n, d) {
        if (d == 0) throw validation_error("rational with zero denominator");
        v_.canonicalize();
    }
    explicit Rat(const mpq_class& q) : v_(q) {}
    explicit Rat(const mpz_class& n) : v_(n) {}
    Rat(const mpz_class& n, const mpz_class& d) : v_(n, d) {
        if (d == 0) throw validation_error("rational with zero denominator");
        v_.canonicalize();
    }

    static Rat parse(const std::string& s);

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat operator+(const Rat& o) const { return Rat(mpq_class(v_ + o.v_)); }
    Rat operator-(const Rat& o) const { return Rat(mpq_class(v_ - o.v_)); }
    Rat operator*(const Rat& o) const { return Rat(mpq_class(v_ * o.v_)); }
    Rat operator/(const Rat& o) const {
        if (o.is_zero()) throw validation_error("rational division by zero");
        return Rat(mpq_class(v_ / o.v_));
    }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }

    bool operator==(const Rat& o) const { return v_ == o.v_; }
    bool operator!=(const Rat& o) const { return v_ != o.v_; }
    bool operator<(const Rat& o) const { return v_ < o.v_; }

    Rat inv() const {
        if (is_zero()) throw validation_error("inverse of zero");
        return Rat(mpq_class(1 / v_));
    }

    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    // Canonical form "num/den", denominator always explicit and positive.
    std::string str() const { return v_.get_num().get_str() + "/" + v_.get_den().get_str(); }

private:
    mpq_class v_;
};

inline Rat Rat::parse(const std::string& s) {
    if (s.empty()) throw validation_error("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(mpz_class(s));
        mpz_class n(s.substr(0, slash));
        mpz_class d(s.substr(slash + 1));
        if (d == 0) throw validation_error("rational literal with zero denominator: " + s);
        return Rat(n, d);
    } catch (const std::invalid_argument&) {
        throw validation_error("malformed rational literal: " + s);
    }
}

// Field descriptor for Q; carries the element factory the generic
// linear algebra needs when it must materialize 0/1 from nothing.
struct QField {
    using Elem = Rat;

    Rat zero() const { return Rat(0); }
    Rat one() const { return Rat(1); }
    Rat from_int(long n) const { return Rat(n); }

    bool operator==(const QField&) const { return true; }

    std::string name() const { return "Q"; }
};

} // namespace valrig
