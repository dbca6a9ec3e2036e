#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nrals/algebraic.hpp"

namespace nrals {

namespace detail {

// Lower-bound order: -inf first; at equal values, closed before open.
inline int cmp_lower(const Bound& a, const Bound& b) {
    if (a.kind != Bound::Finite || b.kind != Bound::Finite) {
        int ka = a.kind == Bound::NegInf ? -1 : (a.kind == Bound::Finite ? 0 : 1);
        int kb = b.kind == Bound::NegInf ? -1 : (b.kind == Bound::Finite ? 0 : 1);
        return ka < kb ? -1 : (ka > kb ? 1 : 0);
    }
    Ordering o = cmp_value(*a.value, *b.value);
    if (o == Ordering::LT) return -1;
    if (o == Ordering::GT) return 1;
    if (a.open == b.open) return 0;
    return a.open ? 1 : -1;
}

// Upper-bound order: +inf last; at equal values, open before closed.
inline int cmp_upper(const Bound& a, const Bound& b) {
    if (a.kind != Bound::Finite || b.kind != Bound::Finite) {
        int ka = a.kind == Bound::NegInf ? -1 : (a.kind == Bound::Finite ? 0 : 1);
        int kb = b.kind == Bound::NegInf ? -1 : (b.kind == Bound::Finite ? 0 : 1);
        return ka < kb ? -1 : (ka > kb ? 1 : 0);
    }
    Ordering o = cmp_value(*a.value, *b.value);
    if (o == Ordering::LT) return -1;
    if (o == Ordering::GT) return 1;
    if (a.open == b.open) return 0;
    return a.open ? -1 : 1;
}

} // namespace detail

// Interval over the extended reals; infinite endpoints are open.
struct Interval {
    Bound lo, hi;

    Interval(Bound l, Bound h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo.kind == Bound::PosInf || hi.kind == Bound::NegInf)
            throw std::invalid_argument("malformed interval");
        if (lo.is_finite() && hi.is_finite()) {
            Ordering o = cmp_value(*lo.value, *hi.value);
            if (o == Ordering::GT || (o == Ordering::EQ && (lo.open || hi.open)))
                throw std::invalid_argument("empty interval");
        }
    }

    static Interval full() { return {Bound::neg_inf(), Bound::pos_inf()}; }
    static Interval point(Value v) {
        return {Bound::finite(v, false), Bound::finite(v, false)};
    }

    bool is_point() const {
        return lo.is_finite() && hi.is_finite() && !lo.open && !hi.open &&
               value_eq(*lo.value, *hi.value);
    }

    bool contains(const Value& v) const {
        if (lo.is_finite()) {
            Ordering o = cmp_value(*lo.value, v);
            if (o == Ordering::GT || (o == Ordering::EQ && lo.open)) return false;
        }
        if (hi.is_finite()) {
            Ordering o = cmp_value(v, *hi.value);
            if (o == Ordering::GT || (o == Ordering::EQ && hi.open)) return false;
        }
        return true;
    }

    std::string str() const {
        std::string s = lo.is_finite() ? (lo.open ? "(" : "[") + value_str(*lo.value)
                                       : std::string("(-inf");
        s += ", ";
        s += hi.is_finite() ? value_str(*hi.value) + (hi.open ? ")" : "]")
                            : std::string("inf)");
        return s;
    }
};

// Ordered, pairwise-disjoint, maximally-merged collection of intervals.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> ivs) : ivs_(std::move(ivs)) { normalize(); }

    static IntervalSet empty_set() { return IntervalSet(); }
    static IntervalSet full() { return IntervalSet({Interval::full()}); }

    bool empty() const { return ivs_.empty(); }
    bool is_full() const {
        return ivs_.size() == 1 && ivs_[0].lo.kind == Bound::NegInf &&
               ivs_[0].hi.kind == Bound::PosInf;
    }
    const std::vector<Interval>& intervals() const { return ivs_; }

    bool contains(const Value& v) const {
        for (const auto& iv : ivs_)
            if (iv.contains(v)) return true;
        return false;
    }

    IntervalSet unite(const IntervalSet& o) const {
        std::vector<Interval> all = ivs_;
        all.insert(all.end(), o.ivs_.begin(), o.ivs_.end());
        return IntervalSet(std::move(all));
    }

    IntervalSet complement() const {
        std::vector<Interval> out;
        Bound cursor = Bound::neg_inf();
        for (const auto& iv : ivs_) {
            if (iv.lo.kind != Bound::NegInf) {
                Bound hi = Bound::finite(*iv.lo.value, !iv.lo.open);
                bool nonempty = true;
                if (cursor.is_finite()) {
                    Ordering o = cmp_value(*cursor.value, *hi.value);
                    nonempty = o == Ordering::LT ||
                               (o == Ordering::EQ && !cursor.open && !hi.open);
                }
                if (nonempty) out.emplace_back(cursor, hi);
            }
            if (iv.hi.kind == Bound::PosInf) return IntervalSet(std::move(out));
            cursor = Bound::finite(*iv.hi.value, !iv.hi.open);
        }
        out.emplace_back(cursor, Bound::pos_inf());
        return IntervalSet(std::move(out));
    }

    IntervalSet intersect(const IntervalSet& o) const {
        std::vector<Interval> out;
        for (const auto& a : ivs_)
            for (const auto& b : o.ivs_) {
                const Bound& lo = detail::cmp_lower(a.lo, b.lo) >= 0 ? a.lo : b.lo;
                const Bound& hi = detail::cmp_upper(a.hi, b.hi) <= 0 ? a.hi : b.hi;
                if (lo.is_finite() && hi.is_finite()) {
                    Ordering c = cmp_value(*lo.value, *hi.value);
                    if (c == Ordering::GT || (c == Ordering::EQ && (lo.open || hi.open)))
                        continue;
                }
                out.emplace_back(lo, hi);
            }
        return IntervalSet(std::move(out));
    }

    bool same_as(const IntervalSet& o) const {
        if (ivs_.size() != o.ivs_.size()) return false;
        for (std::size_t i = 0; i < ivs_.size(); ++i) {
            if (detail::cmp_lower(ivs_[i].lo, o.ivs_[i].lo) != 0) return false;
            if (detail::cmp_upper(ivs_[i].hi, o.ivs_[i].hi) != 0) return false;
        }
        return true;
    }

    std::string str() const {
        if (ivs_.empty()) return "{}";
        std::string s;
        for (const auto& iv : ivs_) {
            if (!s.empty()) s += " u ";
            s += iv.str();
        }
        return s;
    }

private:
    void normalize() {
        if (ivs_.empty()) return;
        std::sort(ivs_.begin(), ivs_.end(), [](const Interval& a, const Interval& b) {
            int c = detail::cmp_lower(a.lo, b.lo);
            if (c != 0) return c < 0;
            return detail::cmp_upper(a.hi, b.hi) < 0;
        });
        std::vector<Interval> out;
        out.push_back(ivs_[0]);
        for (std::size_t i = 1; i < ivs_.size(); ++i) {
            Interval& prev = out.back();
            const Interval& cur = ivs_[i];
            if (mergeable(prev, cur)) {
                if (detail::cmp_upper(cur.hi, prev.hi) > 0) prev.hi = cur.hi;
            } else {
                out.push_back(cur);
            }
        }
        ivs_ = std::move(out);
    }

    // prev.lo <= cur.lo; merge when they overlap or touch without a gap.
    static bool mergeable(const Interval& prev, const Interval& cur) {
        if (prev.hi.kind == Bound::PosInf) return true;
        if (cur.lo.kind == Bound::NegInf) return true;
        Ordering o = cmp_value(*prev.hi.value, *cur.lo.value);
        if (o == Ordering::GT) return true;
        if (o == Ordering::LT) return false;
        // Touching endpoints: contiguous unless both are open.
        return !(prev.hi.open && cur.lo.open);
    }

    std::vector<Interval> ivs_;
};

} // namespace nrals
