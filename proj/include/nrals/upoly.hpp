#pragma once

#include <cassert>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nrals/rational.hpp"

namespace nrals {

// Dense univariate polynomial over the rationals, coefficients indexed by
// degree. The zero polynomial has an empty coefficient vector; otherwise
// the leading coefficient is nonzero.
class QPoly {
public:
    QPoly() = default;
    explicit QPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    static QPoly constant(const Rational& v) {
        return v == 0 ? QPoly() : QPoly({v});
    }
    // c1 * x + c0
    static QPoly linear(const Rational& c1, const Rational& c0) {
        return QPoly({c0, c1});
    }

    bool is_zero() const { return c_.empty(); }
    // Degree of the zero polynomial is reported as -1.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const Rational& coeff(std::size_t i) const {
        static const Rational zero(0);
        return i < c_.size() ? c_[i] : zero;
    }
    const Rational& lead() const { return c_.back(); }
    const std::vector<Rational>& coeffs() const { return c_; }

    Rational eval(const Rational& x) const {
        Rational acc(0);
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }

    QPoly operator-() const {
        std::vector<Rational> r(c_);
        for (auto& v : r) v = -v;
        return QPoly(std::move(r));
    }

    friend QPoly operator+(const QPoly& a, const QPoly& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
        return QPoly(std::move(r));
    }
    friend QPoly operator-(const QPoly& a, const QPoly& b) { return a + (-b); }
    friend QPoly operator*(const QPoly& a, const QPoly& b) {
        if (a.is_zero() || b.is_zero()) return QPoly();
        std::vector<Rational> r(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return QPoly(std::move(r));
    }
    friend QPoly operator*(const QPoly& a, const Rational& s) {
        if (s == 0) return QPoly();
        std::vector<Rational> r(a.c_);
        for (auto& v : r) v *= s;
        return QPoly(std::move(r));
    }

    friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

    QPoly derivative() const {
        if (c_.size() <= 1) return QPoly();
        std::vector<Rational> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i)
            r[i - 1] = c_[i] * Rational(static_cast<long>(i));
        return QPoly(std::move(r));
    }

    // Euclidean division; b must be nonzero.
    static std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
        if (b.is_zero()) throw std::invalid_argument("division by zero polynomial");
        std::vector<Rational> rem(a.c_);
        std::vector<Rational> quot;
        int db = b.degree();
        if (static_cast<int>(rem.size()) - 1 >= db)
            quot.assign(rem.size() - db, Rational(0));
        while (static_cast<int>(rem.size()) - 1 >= db) {
            if (rem.back() == 0) { rem.pop_back(); continue; }
            std::size_t shift = rem.size() - 1 - db;
            Rational q = rem.back() / b.lead();
            quot[shift] = q;
            for (int i = 0; i <= db; ++i) rem[shift + i] -= q * b.c_[i];
            rem.pop_back();
        }
        return {QPoly(std::move(quot)), QPoly(std::move(rem))};
    }

    // Exact division; throws if the remainder is nonzero.
    static QPoly divexact(const QPoly& a, const QPoly& b) {
        auto [q, r] = divmod(a, b);
        if (!r.is_zero()) throw std::logic_error("inexact polynomial division");
        return q;
    }

    // Monic gcd.
    static QPoly gcd(QPoly a, QPoly b) {
        while (!b.is_zero()) {
            QPoly r = divmod(a, b).second;
            a = std::move(b);
            b = std::move(r);
        }
        if (a.is_zero()) return a;
        return a * (Rational(1) / a.lead());
    }

    // Square-free part: p / gcd(p, p').
    QPoly squarefree() const {
        if (is_zero() || degree() == 0) return *this;
        QPoly g = gcd(*this, derivative());
        if (g.degree() == 0) return *this;
        return divexact(*this, g);
    }

    // Scale to integer coefficients with content 1 and positive leading
    // coefficient. Used for defining polynomials of algebraic numbers.
    QPoly primitive_integer() const {
        if (is_zero()) return *this;
        Integer den_lcm(1);
        for (const auto& v : c_) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), v.get_den().get_mpz_t());
        Integer num_gcd(0);
        for (const auto& v : c_) {
            Integer scaled = v.get_num() * (den_lcm / v.get_den());
            mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_mpz_t());
        }
        Rational factor = make_rational(den_lcm, num_gcd);
        QPoly r = *this * factor;
        if (r.lead() < 0) r = -r;
        return r;
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::string out;
        for (std::size_t i = c_.size(); i-- > 0;) {
            if (c_[i] == 0) continue;
            if (!out.empty()) out += " + ";
            out += to_string(c_[i]);
            if (i >= 1) out += "*x";
            if (i >= 2) out += "^" + std::to_string(i);
        }
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Rational> c_;
};

// Sturm sequence of p: p, p', then negated remainders.
inline std::vector<QPoly> sturm_sequence(const QPoly& p) {
    std::vector<QPoly> seq;
    if (p.is_zero()) return seq;
    seq.push_back(p);
    QPoly d = p.derivative();
    if (d.is_zero()) return seq;
    seq.push_back(d);
    while (true) {
        QPoly r = QPoly::divmod(seq[seq.size() - 2], seq.back()).second;
        if (r.is_zero()) break;
        seq.push_back(-r);
    }
    return seq;
}

// Number of sign variations of the sequence evaluated at x.
inline int sign_variations_at(const std::vector<QPoly>& seq, const Rational& x) {
    int vars = 0;
    int prev = 0;
    for (const auto& q : seq) {
        int s = sign(q.eval(x));
        if (s != 0) {
            if (prev != 0 && s != prev) ++vars;
            prev = s;
        }
    }
    return vars;
}

// Sign variations at +inf (dir = +1) or -inf (dir = -1), read off the
// leading coefficients.
inline int sign_variations_at_inf(const std::vector<QPoly>& seq, int dir) {
    int vars = 0;
    int prev = 0;
    for (const auto& q : seq) {
        int s = sign(q.lead());
        if (dir < 0 && q.degree() % 2 == 1) s = -s;
        if (s != 0) {
            if (prev != 0 && s != prev) ++vars;
            prev = s;
        }
    }
    return vars;
}

// Distinct real roots of q in the open interval (lo, hi). Endpoints must
// not be roots of q.
inline int sturm_count(const QPoly& q, const Rational& lo, const Rational& hi) {
    if (q.is_zero()) throw std::invalid_argument("sturm_count on zero polynomial");
    if (!(lo < hi)) throw std::invalid_argument("sturm_count requires lo < hi");
    if (q.eval(lo) == 0 || q.eval(hi) == 0)
        throw std::invalid_argument("sturm_count endpoint is a root");
    QPoly sf = q.squarefree();
    auto seq = sturm_sequence(sf);
    return sign_variations_at(seq, lo) - sign_variations_at(seq, hi);
}

inline int sturm_count(const std::vector<QPoly>& seq_of_squarefree,
                       const Rational& lo, const Rational& hi) {
    return sign_variations_at(seq_of_squarefree, lo) -
           sign_variations_at(seq_of_squarefree, hi);
}

// Cauchy bound: all real roots of q lie in (-B, B).
inline Rational cauchy_bound(const QPoly& q) {
    assert(!q.is_zero());
    Rational maxr(0);
    for (int i = 0; i < q.degree(); ++i) {
        Rational a = abs_rational(q.coeff(i) / q.lead());
        if (a > maxr) maxr = a;
    }
    return maxr + 1;
}

} // namespace nrals
