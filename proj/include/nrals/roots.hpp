#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nrals/algebraic.hpp"
#include "nrals/algext.hpp"
#include "nrals/clause.hpp"
#include "nrals/interval.hpp"
#include "nrals/polynomial.hpp"
#include "nrals/upoly.hpp"

namespace nrals {

// Root isolation result. region_signs[i] is the sign of the input between
// roots[i-1] and roots[i] (with i=0 the region left of the first root and
// i=roots.size() the region right of the last one); for the zero
// polynomial only zero_poly is set. brackets[i] is a rational interval
// containing roots[i] and no other root (a point for rational roots).
struct RootInfo {
    bool zero_poly = false;
    std::vector<Value> roots;
    std::vector<std::pair<Rational, Rational>> brackets;
    std::vector<int> region_signs;
};

namespace detail {

// Turn an isolating interval of `defining` into a Value. `defining` is
// square-free with integer coefficients and has exactly one root in the
// open interval (lo, hi), which is also the unique zero there of the
// target function whose sign `sgn` computes (endpoints have nonzero
// sign). Any rational root of defining is k / lead for an integer k, so
// once the interval is narrow enough a single candidate decides
// rationality.
template <class SignFn>
Value make_root_value(const QPoly& defining, Rational lo, Rational hi, SignFn&& sgn) {
    const int slo = sgn(lo);
    const Rational lc(defining.lead());
    while (true) {
        if ((hi - lo) * lc < 1) {
            Rational cand = Rational(floor_int(lo * lc) + 1) / lc;
            if (lo < cand && cand < hi && sgn(cand) == 0) return Value(cand);
            return Value(AlgebraicNumber(defining, lo, hi));
        }
        Rational mid = (lo + hi) / 2;
        int sm = sgn(mid);
        if (sm == 0) return Value(std::move(mid));
        (sm == slo ? lo : hi) = mid;
    }
}

inline void push_root(RootInfo& out, Value v) {
    if (is_rational(v)) {
        out.brackets.emplace_back(as_rational(v), as_rational(v));
    } else {
        const AlgebraicNumber& a = as_algebraic(v);
        out.brackets.emplace_back(a.lo(), a.hi());
    }
    out.roots.push_back(std::move(v));
}

// Sample points between consecutive brackets (never a root) and read off
// the region signs from `sgn`.
template <class SignFn>
void fill_region_signs(RootInfo& out, const Rational& bound, SignFn&& sgn) {
    out.region_signs.reserve(out.roots.size() + 1);
    for (std::size_t i = 0; i <= out.roots.size(); ++i) {
        Rational sample;
        if (i == 0)
            sample = -bound;
        else if (i == out.roots.size())
            sample = bound;
        else {
            const Rational& a = out.brackets[i - 1].second;
            const Rational& b = out.brackets[i].first;
            sample = a < b ? Rational((a + b) / 2) : a;
        }
        out.region_signs.push_back(sgn(sample));
    }
}

} // namespace detail

// All distinct real roots of q in increasing order, plus the sign of q in
// each maximal root-free region.
inline RootInfo isolate_roots(const QPoly& q) {
    RootInfo out;
    if (q.is_zero()) {
        out.zero_poly = true;
        return out;
    }
    if (q.degree() == 0) {
        out.region_signs = {sign(q.coeff(0))};
        return out;
    }
    QPoly s = q.squarefree().primitive_integer();
    Rational bound = cauchy_bound(s);
    if (s.degree() == 1) {
        detail::push_root(out, Value(Rational(-s.coeff(0) / s.coeff(1))));
    } else {
        auto seq = sturm_sequence(s);
        auto count = [&](const Rational& a, const Rational& b) {
            return sturm_count(seq, a, b);
        };
        auto ssign = [&](const Rational& x) { return sign(s.eval(x)); };
        auto isolate = [&](auto&& self, const Rational& lo, const Rational& hi,
                           int cnt) -> void {
            if (cnt == 0) return;
            if (cnt == 1) {
                detail::push_root(out, detail::make_root_value(s, lo, hi, ssign));
                return;
            }
            Rational mid = (lo + hi) / 2;
            if (s.eval(mid) != 0) {
                self(self, lo, mid, count(lo, mid));
                self(self, mid, hi, count(mid, hi));
                return;
            }
            // The midpoint is itself a root: carve out a gap around it
            // that isolates it, then recurse on both sides.
            Rational delta = (hi - lo) / 4;
            while (s.eval(mid - delta) == 0 || s.eval(mid + delta) == 0 ||
                   count(mid - delta, mid + delta) != 1)
                delta /= 2;
            self(self, lo, mid - delta, count(lo, mid - delta));
            detail::push_root(out, Value(mid));
            self(self, mid + delta, hi, count(mid + delta, hi));
        };
        isolate(isolate, -bound, bound, count(-bound, bound));
    }
    detail::fill_region_signs(out, bound, [&](const Rational& x) { return sign(q.eval(x)); });
    return out;
}

// Root isolation for a polynomial with coefficients in Q(alpha). Roots are
// reported as Values over an integer defining polynomial obtained by a
// resultant with the context's defining polynomial.
inline RootInfo isolate_roots(AlgExtCtx& ctx, XPoly p) {
    RootInfo out;
    xpoly_normalize(ctx, p);
    if (p.empty()) {
        out.zero_poly = true;
        return out;
    }
    if (xpoly_degree(p) == 0) {
        out.region_signs = {ctx.sign_at_alpha(p[0])};
        return out;
    }
    XPoly s = xpoly_squarefree(ctx, p);
    QPoly res = xpoly_defining_poly(ctx, s);
    auto res_seq = sturm_sequence(res); // res is square-free
    Rational bound = xpoly_cauchy_bound(ctx, s);
    auto ssign = [&](const Rational& x) { return xpoly_sign_at(ctx, s, x); };
    auto seq = xpoly_sturm_sequence(ctx, s);
    auto count = [&](const Rational& a, const Rational& b) {
        return xpoly_variations_at(ctx, seq, a) - xpoly_variations_at(ctx, seq, b);
    };

    // Shrinks (lo, hi) around the unique root of s it contains until the
    // interval also isolates that root among the roots of res, then
    // converts it to a Value. Endpoints keep nonzero s-sign throughout.
    auto refine_cell = [&](Rational lo, Rational hi) -> Value {
        const int slo = ssign(lo);
        auto nudge = [&](bool low_end) -> std::optional<Value> {
            // Move an endpoint off a root of res without losing the
            // bracketed root of s.
            while (res.eval(low_end ? lo : hi) == 0) {
                Rational t = low_end ? Rational(lo + (hi - lo) / 4)
                                     : Rational(hi - (hi - lo) / 4);
                int st = ssign(t);
                if (st == 0) return Value(std::move(t));
                (st == slo ? lo : hi) = t;
            }
            return std::nullopt;
        };
        while (true) {
            if (auto v = nudge(true)) return *v;
            if (auto v = nudge(false)) return *v;
            if (sturm_count(res_seq, lo, hi) == 1)
                return detail::make_root_value(res, lo, hi, ssign);
            Rational mid = (lo + hi) / 2;
            int sm = ssign(mid);
            if (sm == 0) return Value(std::move(mid));
            (sm == slo ? lo : hi) = mid;
        }
    };

    auto isolate = [&](auto&& self, const Rational& lo, const Rational& hi,
                       int cnt) -> void {
        if (cnt == 0) return;
        if (cnt == 1) {
            detail::push_root(out, refine_cell(lo, hi));
            return;
        }
        Rational mid = (lo + hi) / 2;
        if (ssign(mid) != 0) {
            self(self, lo, mid, count(lo, mid));
            self(self, mid, hi, count(mid, hi));
            return;
        }
        Rational delta = (hi - lo) / 4;
        while (ssign(mid - delta) == 0 || ssign(mid + delta) == 0 ||
               count(mid - delta, mid + delta) != 1)
            delta /= 2;
        self(self, lo, mid - delta, count(lo, mid - delta));
        detail::push_root(out, Value(mid));
        self(self, mid + delta, hi, count(mid + delta, hi));
    };
    isolate(isolate, -bound, bound, count(-bound, bound));

    detail::fill_region_signs(out, bound,
                              [&](const Rational& x) { return xpoly_sign_at(ctx, p, x); });
    return out;
}

inline RootInfo isolate_roots(const SubstitutedPoly& sub) {
    if (sub.has_algebraic()) {
        AlgExtCtx ctx = *sub.ctx; // sign tests may refine a private copy
        return isolate_roots(ctx, sub.extended);
    }
    return isolate_roots(sub.rational);
}

// The unique root of a degree-1 polynomial.
inline Rational solve_linear(const QPoly& q) {
    if (q.degree() != 1) throw std::invalid_argument("solve_linear requires degree 1");
    return -q.coeff(0) / q.coeff(1);
}

// The value rep(alpha) as a Value: rational when it reduces to one,
// otherwise an algebraic number over a resultant-derived defining
// polynomial.
inline Value element_to_value(AlgExtCtx& ctx, const QPoly& rep_in) {
    if (ctx.is_zero(rep_in)) return Value(Rational(0));
    QPoly rep = ctx.reduce(rep_in);
    if (rep.degree() == 0) return Value(rep.coeff(0));
    QPoly res = xpoly_defining_poly(ctx, XPoly{-rep, QPoly::constant(Rational(1))});
    auto res_seq = sturm_sequence(res);
    auto gsign = [&](const Rational& x) {
        // sign of x - rep(alpha)
        return ctx.sign_at_alpha(QPoly::constant(x) - rep);
    };
    while (true) {
        QInterval e = eval_over_interval(rep, QInterval(ctx.lo(), ctx.hi()));
        Rational lo = e.lo, hi = e.hi, pad = (hi - lo) / 8;
        // Widen endpoints off roots of res; the value stays inside.
        while (res.eval(lo) == 0) {
            lo -= pad;
            pad /= 2;
        }
        pad = (hi - lo) / 8;
        while (res.eval(hi) == 0) {
            hi += pad;
            pad /= 2;
        }
        if (sturm_count(res_seq, lo, hi) == 1)
            return detail::make_root_value(res, lo, hi, gsign);
        ctx.refine_step();
    }
}

// Exact value of a multivariate polynomial under the assignment (declared
// in polynomial.hpp).
inline Value evaluate(const Polynomial& p, const RealAssignment& asg) {
    std::optional<VarId> alg = detail::single_algebraic_var(p, asg, std::nullopt);
    if (!alg) {
        Rational acc(0);
        for (const auto& [m, c] : p.terms()) {
            Rational val = c;
            for (const auto& [v, e] : m)
                val *= pow_rational(as_rational(asg[v]), static_cast<unsigned>(e));
            acc += val;
        }
        return Value(std::move(acc));
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
    return element_to_value(ctx, rep);
}

// ---------------------------------------------------------------------
// Feasible sets (Definition-style semantics over sign conditions).

struct AllowedSigns {
    bool neg = false, zero = false, pos = false;

    bool allows(int s) const { return s < 0 ? neg : (s > 0 ? pos : zero); }
};

// Conjunctive sign conditions "poly + shift <sign> 0" equivalent to a
// (possibly relaxed) literal. Relaxation widens non-strict atoms by
// eps_p: p>=0 becomes p > -eps_p, p<=0 becomes p < eps_p, p=0 their
// conjunction.
struct SignCondition {
    Rational shift;
    AllowedSigns ok;
};

inline std::vector<SignCondition> literal_sign_conditions(CmpKind kind, bool negated,
                                                          bool relaxed,
                                                          const Rational& eps_p) {
    if (relaxed) {
        if (negated) throw std::logic_error("relaxed literal must not be negated");
        switch (kind) {
        case CmpKind::GE: return {{eps_p, {false, false, true}}};
        case CmpKind::LE: return {{-eps_p, {true, false, false}}};
        case CmpKind::EQ:
            return {{eps_p, {false, false, true}}, {-eps_p, {true, false, false}}};
        }
    }
    switch (kind) {
    case CmpKind::GE:
        return {{Rational(0), negated ? AllowedSigns{true, false, false}
                                      : AllowedSigns{false, true, true}}};
    case CmpKind::LE:
        return {{Rational(0), negated ? AllowedSigns{false, false, true}
                                      : AllowedSigns{true, true, false}}};
    case CmpKind::EQ:
        return {{Rational(0), negated ? AllowedSigns{true, false, true}
                                      : AllowedSigns{false, true, false}}};
    }
    throw std::logic_error("unreachable");
}

// Set of x-values where a univariate sign condition holds, assembled from
// root regions.
inline IntervalSet interval_set_from_roots(const RootInfo& ri, AllowedSigns ok) {
    if (ri.zero_poly) return ok.zero ? IntervalSet::full() : IntervalSet::empty_set();
    std::vector<Interval> ivs;
    for (std::size_t i = 0; i <= ri.roots.size(); ++i) {
        if (ok.allows(ri.region_signs[i])) {
            Bound lo = i == 0 ? Bound::neg_inf() : Bound::finite(ri.roots[i - 1], true);
            Bound hi = i == ri.roots.size() ? Bound::pos_inf()
                                            : Bound::finite(ri.roots[i], true);
            ivs.emplace_back(std::move(lo), std::move(hi));
        }
        if (i < ri.roots.size() && ok.zero) ivs.push_back(Interval::point(ri.roots[i]));
    }
    return IntervalSet(std::move(ivs));
}

// Values of x under which the arithmetic literal holds, all other
// variables fixed by the assignment.
inline IntervalSet feasible_set(const Literal& lit, const RealAssignment& asg, VarId x,
                                const Rational& eps_p) {
    if (lit.is_bool())
        throw std::invalid_argument("feasible_set requires an arithmetic literal");
    IntervalSet result = IntervalSet::full();
    for (const SignCondition& cond :
         literal_sign_conditions(lit.atom.cmp, lit.negated, lit.relaxed, eps_p)) {
        Polynomial q = lit.atom.poly + Polynomial::constant(cond.shift);
        RootInfo ri = isolate_roots(substitute_except(q, asg, x));
        result = result.intersect(interval_set_from_roots(ri, cond.ok));
        if (result.empty()) break;
    }
    return result;
}

// Truth of a literal under a complete assignment (relaxed literals use
// their relaxed interpretation).
inline bool literal_holds(const Literal& lit, const Assignment& asg,
                          const Rational& eps_p) {
    if (lit.is_bool()) return asg.bools[lit.atom.bool_var] != lit.negated;
    for (const SignCondition& cond :
         literal_sign_conditions(lit.atom.cmp, lit.negated, lit.relaxed, eps_p)) {
        Polynomial q = lit.atom.poly + Polynomial::constant(cond.shift);
        if (!cond.ok.allows(evaluate_sign(q, asg.reals))) return false;
    }
    return true;
}

inline bool clause_holds(const Clause& cls, const Assignment& asg, const Rational& eps_p) {
    for (const Literal& lit : cls.literals)
        if (literal_holds(lit, asg, eps_p)) return true;
    return false;
}

// Values of x under which the clause holds: the whole line when some
// literal not mentioning x is already satisfied, otherwise the union over
// the literals that mention x.
inline IntervalSet clause_feasible_set(const Clause& cls, const Assignment& asg, VarId x,
                                       const Rational& eps_p) {
    std::vector<const Literal*> with_x;
    for (const Literal& lit : cls.literals) {
        bool mentions = !lit.is_bool() && lit.atom.poly.degree_in(x) > 0;
        if (mentions)
            with_x.push_back(&lit);
        else if (literal_holds(lit, asg, eps_p))
            return IntervalSet::full();
    }
    IntervalSet r = IntervalSet::empty_set();
    for (const Literal* lit : with_x) r = r.unite(feasible_set(*lit, asg.reals, x, eps_p));
    return r;
}

// For a clause over exactly one arithmetic variable (and no booleans):
// the values of that variable falsifying the clause.
inline std::pair<VarId, IntervalSet> unit_infeasible_set(const Clause& cls,
                                                         const Rational& eps_p) {
    std::optional<VarId> var;
    for (const Literal& lit : cls.literals) {
        if (lit.is_bool()) throw std::invalid_argument("unit_infeasible_set: boolean literal");
        for (VarId v : lit.atom.poly.variables()) {
            if (var && *var != v)
                throw std::invalid_argument("unit_infeasible_set: several variables");
            var = v;
        }
    }
    if (!var) throw std::invalid_argument("unit_infeasible_set: no variable");
    RealAssignment dummy; // literals are univariate; nothing to substitute
    IntervalSet feas = IntervalSet::empty_set();
    for (const Literal& lit : cls.literals)
        feas = feas.unite(feasible_set(lit, dummy, *var, eps_p));
    return {*var, feas.complement()};
}

} // namespace nrals
