#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace nrals {

// Arbitrary-precision rational in canonical form (gcd(num, den) = 1,
// den >= 1). GMP's mpq_class maintains the canonical form for us as long
// as values are built through arithmetic or canonicalize().
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(long num, long den = 1) {
    return make_rational(Integer(num), Integer(den));
}

inline const Integer numerator(const Rational& r) { return r.get_num(); }
inline const Integer denominator(const Rational& r) { return r.get_den(); }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline int sign(const Rational& r) { return sgn(r); }

inline Integer floor_int(const Rational& r) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

inline Integer ceil_int(const Rational& r) {
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

inline Rational abs_rational(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational pow_rational(const Rational& base, unsigned exp) {
    Rational acc(1);
    Rational b = base;
    while (exp) {
        if (exp & 1) acc *= b;
        b *= b;
        exp >>= 1;
    }
    return acc;
}

// Parses "123", "-4", "3.14" (decimal), "1/3". Used by the SMT-LIB reader
// and by tests.
inline Rational parse_rational(const std::string& s) {
    // Explicit base 10: the GMP string constructor would otherwise treat
    // a leading zero (as in "025" from "0.25") as octal.
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Integer n(s.substr(0, slash), 10);
        Integer d(s.substr(slash + 1), 10);
        return make_rational(n, d);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        Rational r{Integer(s, 10)};
        return r;
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    Integer n(digits, 10);
    Integer d(1);
    for (std::size_t i = 0; i < frac_len; ++i) d *= 10;
    return make_rational(n, d);
}

inline std::string to_string(const Rational& r) {
    if (is_integer(r)) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// Decimal approximation with the given number of fractional digits
// (truncated toward zero). For human-readable output only.
inline std::string to_decimal_string(const Rational& r, unsigned digits = 6) {
    Integer scale(1);
    for (unsigned i = 0; i < digits; ++i) scale *= 10;
    Integer scaled;
    mpz_tdiv_q(scaled.get_mpz_t(), Integer(r.get_num() * scale).get_mpz_t(),
               r.get_den().get_mpz_t());
    bool neg = scaled < 0;
    Integer a = abs(scaled);
    Integer whole = a / scale;
    Integer frac = a % scale;
    std::string fs = frac.get_str();
    fs.insert(fs.begin(), digits - fs.size(), '0');
    return (neg ? "-" : "") + whole.get_str() + "." + fs;
}

} // namespace nrals
