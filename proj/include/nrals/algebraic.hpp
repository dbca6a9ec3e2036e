#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "nrals/rational.hpp"
#include "nrals/upoly.hpp"

namespace nrals {

enum class Ordering { LT, EQ, GT };
enum class Complexity { PREC, SUCC, SIM };

// Real algebraic number: the unique root of `minpoly` inside the open
// interval (lo, hi). Invariants:
//   - minpoly is square-free with integer coefficients, positive lead
//   - minpoly(lo) != 0, minpoly(hi) != 0, exactly one root in (lo, hi)
//   - the root is irrational (rational roots are normalized to Rational
//     at construction, see make_value_root)
class AlgebraicNumber {
public:
    AlgebraicNumber(QPoly minpoly, Rational lo, Rational hi)
        : p_(std::move(minpoly)), lo_(std::move(lo)), hi_(std::move(hi)) {
        sign_lo_ = sign(p_.eval(lo_));
        sign_hi_ = sign(p_.eval(hi_));
        if (sign_lo_ == 0 || sign_hi_ == 0 || sign_lo_ == sign_hi_)
            throw std::invalid_argument("interval does not bracket a simple root");
    }

    const QPoly& minpoly() const { return p_; }
    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }

    // One bisection step; keeps the root bracketed. The midpoint is never
    // a root: the only root in the interval is irrational.
    AlgebraicNumber bisect() const {
        Rational mid = (lo_ + hi_) / 2;
        int sm = sign(p_.eval(mid));
        if (sm == 0) throw std::logic_error("algebraic number turned out rational");
        if (sm == sign_lo_) return AlgebraicNumber(p_, mid, hi_);
        return AlgebraicNumber(p_, lo_, mid);
    }

    AlgebraicNumber refined(const Rational& width) const {
        AlgebraicNumber a = *this;
        while (a.hi_ - a.lo_ > width) a = a.bisect();
        return a;
    }

    // Interval for the root shrunk until it excludes the rational r
    // (r must not be the root; guaranteed by irrationality).
    AlgebraicNumber refined_away_from(const Rational& r) const {
        AlgebraicNumber a = *this;
        while (a.lo_ < r && r < a.hi_) a = a.bisect();
        return a;
    }

    Integer floor() const {
        AlgebraicNumber a = *this;
        while (floor_int(a.lo_) != floor_int(a.hi_)) a = a.bisect();
        return floor_int(a.lo_);
    }

    // The algebraic number shifted by -n (root of minpoly(x + n)).
    AlgebraicNumber minus_integer(const Integer& n) const {
        // Taylor shift by n: q(x) = p(x + n).
        std::vector<Rational> c(p_.coeffs());
        std::size_t d = c.size();
        Rational rn{n};
        for (std::size_t i = 0; i + 1 < d; ++i)
            for (std::size_t j = d - 1; j >= 1 && j > i; --j)
                c[j - 1] += rn * c[j];
        // The loop above is Horner-style synthetic shift applied d-1 times.
        QPoly q = QPoly(std::move(c)).primitive_integer();
        return AlgebraicNumber(q, lo_ - Rational(n), hi_ - Rational(n));
    }

    // Reciprocal; the value must be nonzero (always true: irrational).
    AlgebraicNumber reciprocal() const {
        AlgebraicNumber a = *this;
        while (a.lo_ <= 0 && 0 <= a.hi_) a = a.bisect();
        std::vector<Rational> rev(a.p_.coeffs().rbegin(), a.p_.coeffs().rend());
        QPoly q = QPoly(std::move(rev)).primitive_integer();
        Rational nl = 1 / a.hi_;
        Rational nh = 1 / a.lo_;
        if (nl > nh) std::swap(nl, nh);
        return AlgebraicNumber(q, nl, nh);
    }

    double approx_double() const {
        AlgebraicNumber a = refined(make_rational(1, 1000000));
        return Rational((a.lo_ + a.hi_) / 2).get_d();
    }

private:
    QPoly p_;
    Rational lo_, hi_;
    int sign_lo_, sign_hi_;
};

using Value = std::variant<Rational, AlgebraicNumber>;

inline bool is_rational(const Value& v) { return std::holds_alternative<Rational>(v); }
inline const Rational& as_rational(const Value& v) { return std::get<Rational>(v); }
inline const AlgebraicNumber& as_algebraic(const Value& v) {
    return std::get<AlgebraicNumber>(v);
}

inline Ordering cmp_rational(const Rational& a, const Rational& b) {
    if (a < b) return Ordering::LT;
    if (a > b) return Ordering::GT;
    return Ordering::EQ;
}

inline Ordering cmp_algebraic_rational(const AlgebraicNumber& a, const Rational& r) {
    AlgebraicNumber x = a.refined_away_from(r);
    return r <= x.lo() ? Ordering::GT : Ordering::LT;
}

inline Ordering reverse(Ordering o) {
    if (o == Ordering::LT) return Ordering::GT;
    if (o == Ordering::GT) return Ordering::LT;
    return Ordering::EQ;
}

namespace detail {

// Root count of g in (lo, hi); bisects `witness` when an interval
// endpoint happens to be a root of g.
inline bool poly_has_unique_root_in(const QPoly& g, const AlgebraicNumber& witness) {
    AlgebraicNumber a = witness;
    while (g.eval(a.lo()) == 0 || g.eval(a.hi()) == 0) a = a.bisect();
    return sturm_count(g, a.lo(), a.hi()) == 1;
}

} // namespace detail

inline Ordering cmp_algebraic(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    // Equality test through the common factor of the defining polynomials.
    QPoly g = QPoly::gcd(a.minpoly(), b.minpoly());
    if (g.degree() >= 1 && detail::poly_has_unique_root_in(g, a) &&
        detail::poly_has_unique_root_in(g, b)) {
        AlgebraicNumber x = a, y = b;
        while (true) {
            Rational lo = std::max(x.lo(), y.lo());
            Rational hi = std::min(x.hi(), y.hi());
            if (!(lo < hi)) break; // disjoint or touching: fall through to order
            bool endpoint_root = g.eval(lo) == 0 || g.eval(hi) == 0;
            if (!endpoint_root && sturm_count(g, lo, hi) == 1) return Ordering::EQ;
            x = x.bisect();
            y = y.bisect();
        }
    }
    // Distinct roots: refine until the intervals separate.
    AlgebraicNumber x = a, y = b;
    while (x.lo() < y.hi() && y.lo() < x.hi()) {
        x = x.bisect();
        y = y.bisect();
    }
    return x.hi() <= y.lo() ? Ordering::LT : Ordering::GT;
}

// Total order on values, consistent with the order on the reals.
inline Ordering cmp_value(const Value& a, const Value& b) {
    if (is_rational(a) && is_rational(b)) return cmp_rational(as_rational(a), as_rational(b));
    if (!is_rational(a) && is_rational(b))
        return cmp_algebraic_rational(as_algebraic(a), as_rational(b));
    if (is_rational(a) && !is_rational(b))
        return reverse(cmp_algebraic_rational(as_algebraic(b), as_rational(a)));
    return cmp_algebraic(as_algebraic(a), as_algebraic(b));
}

inline bool value_lt(const Value& a, const Value& b) { return cmp_value(a, b) == Ordering::LT; }
inline bool value_eq(const Value& a, const Value& b) { return cmp_value(a, b) == Ordering::EQ; }

// Complexity preorder: rationals precede irrationals; among rationals,
// smaller denominator precedes larger.
inline Complexity cmp_complexity(const Value& a, const Value& b) {
    bool ra = is_rational(a), rb = is_rational(b);
    if (ra && !rb) return Complexity::PREC;
    if (!ra && rb) return Complexity::SUCC;
    if (!ra && !rb) return Complexity::SIM;
    const Integer da = denominator(as_rational(a));
    const Integer db = denominator(as_rational(b));
    if (da < db) return Complexity::PREC;
    if (da > db) return Complexity::SUCC;
    return Complexity::SIM;
}

inline Value refine(const Value& v, const Rational& width) {
    if (width <= 0) throw std::invalid_argument("refine width must be positive");
    if (is_rational(v)) return v;
    return as_algebraic(v).refined(width);
}

inline Integer value_floor(const Value& v) {
    return is_rational(v) ? floor_int(as_rational(v)) : as_algebraic(v).floor();
}

inline Value value_sub_integer(const Value& v, const Integer& n) {
    if (is_rational(v)) return Rational(as_rational(v) - Rational(n));
    return as_algebraic(v).minus_integer(n);
}

inline Value value_reciprocal(const Value& v) {
    if (is_rational(v)) {
        if (as_rational(v) == 0) throw std::invalid_argument("reciprocal of zero");
        return Rational(1 / as_rational(v));
    }
    return as_algebraic(v).reciprocal();
}

inline Value value_negate(const Value& v) {
    if (is_rational(v)) return Rational(-as_rational(v));
    const AlgebraicNumber& a = as_algebraic(v);
    std::vector<Rational> c(a.minpoly().coeffs());
    for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
    QPoly q = QPoly(std::move(c)).primitive_integer();
    return AlgebraicNumber(q, -a.hi(), -a.lo());
}

inline double value_approx(const Value& v) {
    return is_rational(v) ? as_rational(v).get_d() : as_algebraic(v).approx_double();
}

inline std::string value_str(const Value& v) {
    if (is_rational(v)) return to_string(as_rational(v));
    const AlgebraicNumber& a = as_algebraic(v);
    return "root(" + a.minpoly().str() + ", (" + to_string(a.lo()) + ", " +
           to_string(a.hi()) + "))";
}

// One endpoint of an interval over the extended reals.
struct Bound {
    enum Kind { NegInf, Finite, PosInf } kind = Finite;
    std::optional<Value> value; // set iff kind == Finite
    bool open = true;           // infinite endpoints are always open

    static Bound neg_inf() { return {NegInf, std::nullopt, true}; }
    static Bound pos_inf() { return {PosInf, std::nullopt, true}; }
    static Bound finite(Value v, bool open_) { return {Finite, std::move(v), open_}; }
    bool is_finite() const { return kind == Finite; }
};

namespace detail {

inline bool bound_allows_geq(const Bound& lo, const Rational& r) {
    // r admissible w.r.t. the lower bound?
    if (lo.kind == Bound::NegInf) return true;
    if (lo.kind == Bound::PosInf) return false;
    Ordering o = cmp_value(*lo.value, Value(r));
    return o == Ordering::LT || (o == Ordering::EQ && !lo.open);
}

inline bool bound_allows_leq(const Bound& hi, const Rational& r) {
    if (hi.kind == Bound::PosInf) return true;
    if (hi.kind == Bound::NegInf) return false;
    Ordering o = cmp_value(Value(r), *hi.value);
    return o == Ordering::LT || (o == Ordering::EQ && !hi.open);
}

inline bool interval_contains(const Bound& lo, const Bound& hi, const Rational& r) {
    return bound_allows_geq(lo, r) && bound_allows_leq(hi, r);
}

Rational simplest_rational_impl(const Bound& lo, const Bound& hi, int depth);

// Smallest-|n| integer in the interval, if any.
inline std::optional<Integer> smallest_abs_integer_in(const Bound& lo, const Bound& hi) {
    if (interval_contains(lo, hi, Rational(0))) return Integer(0);
    if (lo.kind == Bound::NegInf) {
        // (-inf, hi) with hi <= 0 (0 not inside): pick largest integer <= hi.
        Integer n = hi.is_finite() ? value_floor(*hi.value) : Integer(0);
        while (!interval_contains(lo, hi, Rational(n))) n -= 1;
        return n;
    }
    if (hi.kind == Bound::PosInf) {
        Integer n = value_floor(*lo.value) + 1;
        if (interval_contains(lo, hi, Rational(n - 1))) n -= 1;
        return n;
    }
    // Bounded interval not containing zero.
    if (bound_allows_geq(lo, Rational(0)) == false) {
        // strictly positive side: smallest integer >= lo
        Integer n = value_floor(*lo.value);
        for (int k = 0; k <= 2; ++k) {
            if (interval_contains(lo, hi, Rational(n + k))) return Integer(n + k);
        }
        return std::nullopt;
    }
    // strictly negative side: largest integer <= hi
    Integer n = value_floor(*hi.value) + 1;
    for (int k = 0; k <= 2; ++k) {
        if (interval_contains(lo, hi, Rational(n - k))) return Integer(n - k);
    }
    return std::nullopt;
}

inline Rational simplest_rational_impl(const Bound& lo, const Bound& hi, int depth) {
    if (depth > 10000) throw std::logic_error("simplest_rational_in: no rational found");
    if (auto n = smallest_abs_integer_in(lo, hi)) return Rational(*n);
    // One-point interval.
    if (lo.is_finite() && hi.is_finite() && !lo.open && !hi.open &&
        value_eq(*lo.value, *hi.value)) {
        if (is_rational(*lo.value)) return as_rational(*lo.value);
        throw std::invalid_argument("interval contains no rational");
    }
    // No integer: both bounds finite, within (n, n+1).
    if (!lo.is_finite() || !hi.is_finite())
        throw std::logic_error("unbounded interval must contain an integer");
    // Mirror negative intervals (no integers inside, so ties are moot).
    {
        Ordering ohi = hi.is_finite() ? cmp_value(*hi.value, Value(Rational(0)))
                                      : Ordering::GT;
        if (ohi == Ordering::LT || (ohi == Ordering::EQ && hi.open)) {
            Bound nlo = Bound::finite(value_negate(*hi.value), hi.open);
            Bound nhi = Bound::finite(value_negate(*lo.value), lo.open);
            return -simplest_rational_impl(nlo, nhi, depth + 1);
        }
    }
    Integer n = value_floor(*lo.value);
    // lo may be exactly n (then it must be open, as n is not inside).
    bool lo_is_n = is_rational(*lo.value) && as_rational(*lo.value) == Rational(n);
    Bound rlo, rhi;
    // Recurse on (1/(hi - n), 1/(lo - n)).
    rlo = Bound::finite(value_reciprocal(value_sub_integer(*hi.value, n)), hi.open);
    if (lo_is_n)
        rhi = Bound::pos_inf();
    else
        rhi = Bound::finite(value_reciprocal(value_sub_integer(*lo.value, n)), lo.open);
    Rational r = simplest_rational_impl(rlo, rhi, depth + 1);
    return Rational(n) + 1 / r;
}

} // namespace detail

// The rational with minimal denominator in the interval (ties among
// integers broken by smallest absolute value). Throws if the interval is
// empty or contains no rational.
inline Rational simplest_rational_in(const Bound& lo, const Bound& hi) {
    if (lo.is_finite() && hi.is_finite()) {
        Ordering o = cmp_value(*lo.value, *hi.value);
        if (o == Ordering::GT || (o == Ordering::EQ && (lo.open || hi.open)))
            throw std::invalid_argument("empty interval");
    }
    return detail::simplest_rational_impl(lo, hi, 0);
}

inline Rational simplest_rational_in(const Value& lo, const Value& hi, bool lo_open,
                                     bool hi_open) {
    return simplest_rational_in(Bound::finite(lo, lo_open), Bound::finite(hi, hi_open));
}

} // namespace nrals
