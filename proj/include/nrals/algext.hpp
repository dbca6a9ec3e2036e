#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "nrals/algebraic.hpp"
#include "nrals/upoly.hpp"

namespace nrals {

// Rational interval arithmetic used to bound polynomial values at alpha.
struct QInterval {
    Rational lo, hi;

    QInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {}
    explicit QInterval(const Rational& v) : lo(v), hi(v) {}

    QInterval operator+(const QInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    QInterval operator*(const QInterval& o) const {
        Rational a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        Rational mn = std::min(std::min(a, b), std::min(c, d));
        Rational mx = std::max(std::max(a, b), std::max(c, d));
        return {mn, mx};
    }
    int definite_sign() const {
        if (lo > 0) return 1;
        if (hi < 0) return -1;
        return 0; // straddles or touches zero: indefinite
    }
};

inline QInterval eval_over_interval(const QPoly& p, const QInterval& x) {
    QInterval acc(Rational(0));
    for (std::size_t i = p.coeffs().size(); i-- > 0;)
        acc = acc * x + QInterval(p.coeff(i));
    return acc;
}

// Computation context for the simple extension Q(alpha). Elements are
// represented by polynomials in alpha reduced modulo the defining
// polynomial m. m is square-free but not necessarily irreducible; when a
// gcd computation exposes a factor, the context shrinks m to the factor
// that still has alpha as a root. Representatives held by callers stay
// valid (they denote the same value at alpha) and are re-reduced lazily.
class AlgExtCtx {
public:
    explicit AlgExtCtx(const AlgebraicNumber& a)
        : m_(a.minpoly()), lo_(a.lo()), hi_(a.hi()) {}

    const QPoly& minpoly() const { return m_; }
    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }

    AlgebraicNumber alpha() const { return AlgebraicNumber(m_, lo_, hi_); }

    QPoly reduce(const QPoly& r) const { return QPoly::divmod(r, m_).second; }

    void refine_step() {
        Rational mid = (lo_ + hi_) / 2;
        int sm = sign(m_.eval(mid));
        if (sm == 0) throw std::logic_error("defining polynomial has rational root at midpoint");
        if (sm == sign(m_.eval(lo_)))
            lo_ = mid;
        else
            hi_ = mid;
    }

    // Exact zero test for the value rep(alpha). May shrink m.
    bool is_zero(const QPoly& rep) {
        QPoly r = reduce(rep);
        if (r.is_zero()) return true;
        if (r.degree() == 0) return false;
        QPoly g = QPoly::gcd(r, m_);
        if (g.degree() < 1) return false;
        if (alpha_is_root_of(g)) {
            m_ = g.primitive_integer();
            return true;
        }
        m_ = QPoly::divexact(m_, g).primitive_integer();
        return false;
    }

    // Exact sign of rep(alpha).
    int sign_at_alpha(const QPoly& rep) {
        if (is_zero(rep)) return 0;
        QPoly r = reduce(rep);
        while (true) {
            int s = eval_over_interval(r, QInterval(lo_, hi_)).definite_sign();
            if (s != 0) return s;
            refine_step();
        }
    }

    // Inverse of rep(alpha); rep must be nonzero at alpha.
    QPoly inv(const QPoly& rep) {
        while (true) {
            QPoly r = reduce(rep);
            if (r.is_zero()) throw std::domain_error("inverse of zero in Q(alpha)");
            // extended Euclid on (r, m)
            QPoly r0 = m_, r1 = r;
            QPoly s0 = QPoly(), s1 = QPoly::constant(Rational(1)); // coeffs of r
            while (!r1.is_zero() && r1.degree() >= 1) {
                auto [q, rem] = QPoly::divmod(r0, r1);
                QPoly s2 = s0 - q * s1;
                r0 = std::move(r1);
                r1 = std::move(rem);
                s0 = std::move(s1);
                s1 = std::move(s2);
            }
            if (!r1.is_zero()) {
                // gcd is the constant r1: inverse = s1 / r1
                return reduce(s1 * (Rational(1) / r1.coeff(0)));
            }
            // Nontrivial common factor r0: split m and retry.
            QPoly g = r0 * (Rational(1) / r0.lead());
            if (alpha_is_root_of(g)) throw std::domain_error("inverse of zero in Q(alpha)");
            m_ = QPoly::divexact(m_, g).primitive_integer();
        }
    }

    // Removes from m every factor it shares with g, keeping alpha's
    // factor. Returns true if alpha is a root of g.
    bool factor_out(const QPoly& g) {
        QPoly common = QPoly::gcd(g, m_);
        if (common.degree() < 1) return false;
        if (alpha_is_root_of(common)) {
            m_ = common.primitive_integer();
            return true;
        }
        m_ = QPoly::divexact(m_, common).primitive_integer();
        return false;
    }

    // Rational bounds |rep(alpha)| <= U.
    Rational upper_abs_bound(const QPoly& rep) {
        QInterval e = eval_over_interval(reduce(rep), QInterval(lo_, hi_));
        return std::max(abs_rational(e.lo), abs_rational(e.hi));
    }

    // Rational lower bound 0 < L <= |rep(alpha)|; rep must be nonzero.
    Rational lower_abs_bound(const QPoly& rep) {
        QPoly r = reduce(rep);
        while (true) {
            QInterval e = eval_over_interval(r, QInterval(lo_, hi_));
            if (e.definite_sign() != 0)
                return std::min(abs_rational(e.lo), abs_rational(e.hi));
            refine_step();
        }
    }

private:
    bool alpha_is_root_of(const QPoly& g) {
        // Roots of g that lie in the isolating interval coincide with
        // alpha whenever g divides m. Nudge endpoints off roots of g.
        while (g.eval(lo_) == 0 || g.eval(hi_) == 0) refine_step();
        return sturm_count(g, lo_, hi_) >= 1;
    }

    QPoly m_;
    Rational lo_, hi_;
};

// Univariate polynomial in x with coefficients in Q(alpha), each stored
// as a representative polynomial in alpha.
using XPoly = std::vector<QPoly>;

inline XPoly xpoly_from_qpoly(const QPoly& p) {
    XPoly r;
    r.reserve(p.coeffs().size());
    for (const auto& c : p.coeffs()) r.push_back(QPoly::constant(c));
    return r;
}

// Reduce every coefficient, replace those that vanish at alpha by true
// zeros, and trim the leading zeros.
inline void xpoly_normalize(AlgExtCtx& ctx, XPoly& p) {
    for (auto& c : p) {
        if (ctx.is_zero(c))
            c = QPoly();
        else
            c = ctx.reduce(c);
    }
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline int xpoly_degree(const XPoly& p) { return static_cast<int>(p.size()) - 1; }

inline XPoly xpoly_neg(const XPoly& p) {
    XPoly r = p;
    for (auto& c : r) c = -c;
    return r;
}

inline XPoly xpoly_sub(AlgExtCtx& ctx, const XPoly& a, const XPoly& b) {
    XPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i < a.size()) r[i] = r[i] + a[i];
        if (i < b.size()) r[i] = r[i] - b[i];
    }
    xpoly_normalize(ctx, r);
    return r;
}

inline XPoly xpoly_derivative(AlgExtCtx& ctx, const XPoly& p) {
    XPoly r;
    for (std::size_t i = 1; i < p.size(); ++i)
        r.push_back(p[i] * Rational(static_cast<long>(i)));
    xpoly_normalize(ctx, r);
    return r;
}

// Euclidean remainder of a by b over Q(alpha); b must be normalized and
// nonzero.
inline XPoly xpoly_rem(AlgExtCtx& ctx, XPoly a, const XPoly& b) {
    xpoly_normalize(ctx, a);
    if (b.empty()) throw std::invalid_argument("xpoly_rem by zero");
    QPoly lead_inv = ctx.inv(b.back());
    while (xpoly_degree(a) >= xpoly_degree(b)) {
        std::size_t shift = a.size() - b.size();
        QPoly q = ctx.reduce(a.back() * lead_inv);
        for (std::size_t i = 0; i < b.size(); ++i)
            a[shift + i] = a[shift + i] - q * b[i];
        a.pop_back();
        xpoly_normalize(ctx, a);
    }
    return a;
}

inline QPoly xpoly_eval(AlgExtCtx& ctx, const XPoly& p, const Rational& x) {
    QPoly acc;
    for (std::size_t i = p.size(); i-- > 0;) acc = ctx.reduce(acc * x + p[i]);
    return acc;
}

inline int xpoly_sign_at(AlgExtCtx& ctx, const XPoly& p, const Rational& x) {
    return ctx.sign_at_alpha(xpoly_eval(ctx, p, x));
}

// Square-free part over Q(alpha) via repeated remainders.
inline XPoly xpoly_squarefree(AlgExtCtx& ctx, XPoly p) {
    xpoly_normalize(ctx, p);
    if (xpoly_degree(p) <= 1) return p;
    // gcd(p, p')
    XPoly a = p, b = xpoly_derivative(ctx, p);
    while (!b.empty()) {
        XPoly r = xpoly_rem(ctx, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (xpoly_degree(a) < 1) return p;
    // exact division p / a
    QPoly lead_inv = ctx.inv(a.back());
    XPoly rem = p;
    XPoly quot(p.size() - a.size() + 1);
    while (xpoly_degree(rem) >= xpoly_degree(a)) {
        std::size_t shift = rem.size() - a.size();
        QPoly q = ctx.reduce(rem.back() * lead_inv);
        quot[shift] = q;
        for (std::size_t i = 0; i < a.size(); ++i)
            rem[shift + i] = rem[shift + i] - q * a[i];
        rem.pop_back();
        xpoly_normalize(ctx, rem);
    }
    xpoly_normalize(ctx, quot);
    return quot;
}

// Sturm sequence over Q(alpha).
inline std::vector<XPoly> xpoly_sturm_sequence(AlgExtCtx& ctx, const XPoly& p) {
    std::vector<XPoly> seq;
    XPoly a = p;
    xpoly_normalize(ctx, a);
    if (a.empty()) return seq;
    seq.push_back(a);
    XPoly d = xpoly_derivative(ctx, a);
    if (d.empty()) return seq;
    seq.push_back(d);
    while (true) {
        XPoly r = xpoly_rem(ctx, seq[seq.size() - 2], seq.back());
        if (r.empty()) break;
        seq.push_back(xpoly_neg(r));
    }
    return seq;
}

inline int xpoly_variations_at(AlgExtCtx& ctx, const std::vector<XPoly>& seq,
                               const Rational& x) {
    int vars = 0, prev = 0;
    for (const auto& q : seq) {
        int s = xpoly_sign_at(ctx, q, x);
        if (s != 0) {
            if (prev != 0 && s != prev) ++vars;
            prev = s;
        }
    }
    return vars;
}

inline int xpoly_variations_at_inf(AlgExtCtx& ctx, const std::vector<XPoly>& seq,
                                   int dir) {
    int vars = 0, prev = 0;
    for (const auto& q : seq) {
        if (q.empty()) continue;
        int s = ctx.sign_at_alpha(q.back());
        if (dir < 0 && xpoly_degree(q) % 2 == 1) s = -s;
        if (s != 0) {
            if (prev != 0 && s != prev) ++vars;
            prev = s;
        }
    }
    return vars;
}

// All real roots of the square-free p lie in (-B, B).
inline Rational xpoly_cauchy_bound(AlgExtCtx& ctx, const XPoly& p) {
    Rational denom = ctx.lower_abs_bound(p.back());
    Rational maxr(0);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        Rational u = ctx.upper_abs_bound(p[i]) / denom;
        if (u > maxr) maxr = u;
    }
    return maxr + 1;
}

// Resultant with respect to alpha of the defining polynomial m(y) and the
// bivariate polynomial sum_i rep_i(y) * x^i. The result is a polynomial
// in x that vanishes on every root of p over Q(alpha). Common factors of
// m with all coefficients must have been removed beforehand (see
// xpoly_defining_poly below), otherwise the resultant is identically zero.
namespace detail {

// Bareiss fraction-free determinant over Q[x].
inline QPoly poly_matrix_det(std::vector<std::vector<QPoly>> a) {
    std::size_t n = a.size();
    if (n == 0) return QPoly::constant(Rational(1));
    QPoly denom = QPoly::constant(Rational(1));
    int sign_flip = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k].is_zero()) {
            std::size_t piv = k + 1;
            while (piv < n && a[piv][k].is_zero()) ++piv;
            if (piv == n) return QPoly();
            std::swap(a[k], a[piv]);
            sign_flip = -sign_flip;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                QPoly num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                a[i][j] = QPoly::divexact(num, denom);
            }
            a[i][k] = QPoly();
        }
        denom = a[k][k];
    }
    QPoly det = a[n - 1][n - 1];
    return sign_flip < 0 ? -det : det;
}

} // namespace detail

inline QPoly xpoly_resultant_with_minpoly(const QPoly& m, const XPoly& p) {
    // Coefficient of y^j of the bivariate polynomial, as a QPoly in x.
    int dy = 0;
    for (const auto& rep : p) dy = std::max(dy, rep.degree());
    int dm = m.degree();
    if (dy == 0) {
        // p already has rational coefficients: Res = m's lead ^ 0 * prod ...
        // The caller should not need the resultant in this case; return
        // the polynomial itself scaled to integer coefficients.
        std::vector<Rational> c;
        for (const auto& rep : p) c.push_back(rep.coeff(0));
        return QPoly(std::move(c));
    }
    std::vector<QPoly> cy(dy + 1); // coefficient of y^j as poly in x
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (int j = 0; j <= p[i].degree(); ++j) {
            std::vector<Rational> mono(i + 1, Rational(0));
            mono[i] = p[i].coeff(j);
            cy[j] = cy[j] + QPoly(std::move(mono));
        }
    }
    // Sylvester matrix of m (degree dm, constant in x) and the bivariate
    // poly (degree dy in y), entries in Q[x].
    std::size_t n = static_cast<std::size_t>(dm + dy);
    std::vector<std::vector<QPoly>> mat(n, std::vector<QPoly>(n));
    for (int row = 0; row < dy; ++row)
        for (int j = 0; j <= dm; ++j)
            mat[row][row + j] = QPoly::constant(m.coeff(dm - j));
    for (int row = 0; row < dm; ++row)
        for (int j = 0; j <= dy; ++j)
            mat[dy + row][row + j] = cy[dy - j];
    return detail::poly_matrix_det(std::move(mat));
}

// A nonzero integer polynomial in x whose real roots include every root
// of p over Q(alpha). Shrinks the context's defining polynomial if it
// shares factors with all coefficients of p.
inline QPoly xpoly_defining_poly(AlgExtCtx& ctx, XPoly p) {
    xpoly_normalize(ctx, p);
    if (p.empty()) throw std::invalid_argument("defining poly of zero polynomial");
    while (true) {
        QPoly g(QPoly::constant(Rational(0)));
        bool first = true;
        for (const auto& rep : p) {
            if (rep.is_zero()) continue;
            g = first ? rep : QPoly::gcd(g, rep);
            first = false;
        }
        g = QPoly::gcd(g, ctx.minpoly());
        if (g.degree() < 1) break;
        // alpha cannot be a root of g: p is normalized, so some
        // coefficient is nonzero at alpha and g divides all of them.
        ctx.factor_out(g);
        xpoly_normalize(ctx, p);
        if (p.empty()) throw std::logic_error("polynomial vanished during normalization");
    }
    QPoly res = xpoly_resultant_with_minpoly(ctx.minpoly(), p);
    if (res.is_zero()) throw std::logic_error("resultant unexpectedly zero");
    return res.squarefree().primitive_integer();
}

} // namespace nrals
