#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrals/algebraic.hpp"
#include "nrals/algext.hpp"
#include "nrals/rational.hpp"
#include "nrals/upoly.hpp"

namespace nrals {

using VarId = int;

// Monomial: sorted (variable, exponent) pairs with exponents >= 1.
// The empty monomial is the constant term.
using Monomial = std::vector<std::pair<VarId, int>>;

// Signalled when a move would require substituting two or more distinct
// algebraic values at once; the caller treats the move as unavailable.
struct MoveUnavailable : std::runtime_error {
    MoveUnavailable() : std::runtime_error("move unavailable: multiple algebraic assignments") {}
};

// Real-variable part of an assignment: maps VarId to exact values.
// Complete assignments additionally carry booleans (see formula.hpp).
using RealAssignment = std::vector<Value>; // indexed by VarId

// Sparse multivariate polynomial over the rationals.
class Polynomial {
public:
    Polynomial() = default;

    static Polynomial constant(const Rational& c) {
        Polynomial p;
        if (c != 0) p.terms_[Monomial{}] = c;
        return p;
    }
    static Polynomial variable(VarId x) {
        Polynomial p;
        p.terms_[Monomial{{x, 1}}] = Rational(1);
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        auto it = terms_.find(Monomial{});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    const std::map<Monomial, Rational>& terms() const { return terms_; }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        Polynomial r = a;
        for (const auto& [m, c] : b.terms_) r.add_term(m, c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        Polynomial r = a;
        for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
        return r;
    }
    Polynomial operator-() const {
        Polynomial r;
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(mul_monomial(ma, mb), ca * cb);
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Rational& s) {
        Polynomial r;
        if (s == 0) return r;
        for (const auto& [m, c] : a.terms_) r.terms_[m] = c * s;
        return r;
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.terms_ == b.terms_;
    }

    std::vector<VarId> variables() const {
        std::vector<VarId> vs;
        for (const auto& [m, c] : terms_)
            for (const auto& [v, e] : m) vs.push_back(v);
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        return vs;
    }

    int degree_in(VarId x) const {
        int d = 0;
        for (const auto& [m, c] : terms_)
            for (const auto& [v, e] : m)
                if (v == x) d = std::max(d, e);
        return d;
    }

    bool is_linear_in(VarId x) const { return degree_in(x) <= 1; }

    int total_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) {
            int td = 0;
            for (const auto& [v, e] : m) td += e;
            d = std::max(d, td);
        }
        return d;
    }

    // Substitute variable x by the polynomial q.
    Polynomial substitute_var(VarId x, const Polynomial& q) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            Monomial rest;
            int e = 0;
            for (const auto& [v, ex] : m) {
                if (v == x)
                    e = ex;
                else
                    rest.push_back({v, ex});
            }
            Polynomial term;
            term.add_term(rest, c);
            Polynomial qe = Polynomial::constant(Rational(1));
            for (int i = 0; i < e; ++i) qe = qe * q;
            r = r + term * qe;
        }
        return r;
    }

    std::string str(const std::vector<std::string>* names = nullptr) const;

private:
    static Monomial mul_monomial(const Monomial& a, const Monomial& b) {
        Monomial r;
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i].first < b[j].first)
                r.push_back(a[i++]);
            else if (a[i].first > b[j].first)
                r.push_back(b[j++]);
            else {
                r.push_back({a[i].first, a[i].second + b[j].second});
                ++i;
                ++j;
            }
        }
        while (i < a.size()) r.push_back(a[i++]);
        while (j < b.size()) r.push_back(b[j++]);
        return r;
    }

    std::map<Monomial, Rational> terms_;
};

inline std::string Polynomial::str(const std::vector<std::string>* names) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
        if (!out.empty()) out += " + ";
        out += to_string(c);
        for (const auto& [v, e] : m) {
            out += "*";
            out += names && v < static_cast<int>(names->size()) ? (*names)[v]
                                                                : "x" + std::to_string(v);
            if (e > 1) out += "^" + std::to_string(e);
        }
    }
    return out;
}

// Result of substituting all variables but one: either a rational
// univariate polynomial, or one over Q(alpha) when exactly one
// substituted variable carries an algebraic value.
struct SubstitutedPoly {
    QPoly rational;                   // used when ctx is empty
    std::optional<AlgExtCtx> ctx;     // set for the algebraic case
    XPoly extended;                   // coefficients over Q(alpha)

    bool has_algebraic() const { return ctx.has_value(); }
};

namespace detail {

// Which substituted variables are algebraic? Throws MoveUnavailable when
// two or more are.
inline std::optional<VarId> single_algebraic_var(const Polynomial& p,
                                                 const RealAssignment& asg,
                                                 std::optional<VarId> skip) {
    std::optional<VarId> found;
    for (VarId v : p.variables()) {
        if (skip && v == *skip) continue;
        if (v < 0 || v >= static_cast<int>(asg.size()))
            throw std::out_of_range("unassigned variable in polynomial");
        if (!is_rational(asg[v])) {
            if (found && *found != v) throw MoveUnavailable();
            found = v;
        }
    }
    return found;
}

} // namespace detail

// Univariate polynomial in x obtained by substituting the assignment into
// every other variable of p.
inline SubstitutedPoly substitute_except(const Polynomial& p, const RealAssignment& asg,
                                         VarId x) {
    SubstitutedPoly out;
    std::optional<VarId> alg = detail::single_algebraic_var(p, asg, x);
    if (!alg) {
        std::vector<Rational> coeffs;
        for (const auto& [m, c] : p.terms()) {
            Rational val = c;
            int xdeg = 0;
            for (const auto& [v, e] : m) {
                if (v == x) {
                    xdeg = e;
                } else {
                    val *= pow_rational(as_rational(asg[v]), static_cast<unsigned>(e));
                }
            }
            if (static_cast<int>(coeffs.size()) <= xdeg)
                coeffs.resize(xdeg + 1, Rational(0));
            coeffs[xdeg] += val;
        }
        out.rational = QPoly(std::move(coeffs));
        return out;
    }
    out.ctx.emplace(as_algebraic(asg[*alg]));
    AlgExtCtx& ctx = *out.ctx;
    XPoly coeffs;
    for (const auto& [m, c] : p.terms()) {
        Rational val = c;
        int xdeg = 0, adeg = 0;
        for (const auto& [v, e] : m) {
            if (v == x)
                xdeg = e;
            else if (v == *alg)
                adeg = e;
            else
                val *= pow_rational(as_rational(asg[v]), static_cast<unsigned>(e));
        }
        if (static_cast<int>(coeffs.size()) <= xdeg) coeffs.resize(xdeg + 1);
        std::vector<Rational> mono(adeg + 1, Rational(0));
        mono[adeg] = val;
        coeffs[xdeg] = ctx.reduce(coeffs[xdeg] + QPoly(std::move(mono)));
    }
    xpoly_normalize(ctx, coeffs);
    out.extended = std::move(coeffs);
    return out;
}

// Exact sign of p under the assignment. Throws MoveUnavailable when two
// or more assigned variables are algebraic.
inline int evaluate_sign(const Polynomial& p, const RealAssignment& asg) {
    std::optional<VarId> alg = detail::single_algebraic_var(p, asg, std::nullopt);
    if (!alg) {
        Rational acc(0);
        for (const auto& [m, c] : p.terms()) {
            Rational val = c;
            for (const auto& [v, e] : m)
                val *= pow_rational(as_rational(asg[v]), static_cast<unsigned>(e));
            acc += val;
        }
        return sign(acc);
    }
    AlgExtCtx ctx(as_algebraic(asg[*alg]));
    QPoly rep;
    for (const auto& [m, c] : p.terms()) {
        Rational val = c;
        int adeg = 0;
        for (const auto& [v, e] : m) {
            if (v == *alg)
                adeg = e;
            else
                val *= pow_rational(as_rational(asg[v]), static_cast<unsigned>(e));
        }
        std::vector<Rational> mono(adeg + 1, Rational(0));
        mono[adeg] = val;
        rep = ctx.reduce(rep + QPoly(std::move(mono)));
    }
    return ctx.sign_at_alpha(rep);
}

// Exact value of p under the assignment (rational fast path; a single
// algebraic assignment is folded through its defining polynomial).
Value evaluate(const Polynomial& p, const RealAssignment& asg); // defined in roots.hpp

} // namespace nrals
