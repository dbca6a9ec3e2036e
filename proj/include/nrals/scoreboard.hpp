#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nrals/clause.hpp"
#include "nrals/interval.hpp"
#include "nrals/rng.hpp"
#include "nrals/roots.hpp"

namespace nrals {

// Marks a value of one variable where the make-break contribution of one
// clause changes. is_open says whether the change takes effect strictly
// above val (true) or at val itself (false); is_make says whether the
// clause becomes satisfied (+weight) or unsatisfied (-weight) there.
struct Boundary {
    Value val;
    bool is_open = false;
    bool is_make = false;
    int cid = -1;
};

// Canonical order: val, then is_open (false < true); cid and is_make as
// deterministic tie-breakers so both container strategies agree exactly.
inline bool boundary_less(const Boundary& a, const Boundary& b) {
    Ordering o = cmp_value(a.val, b.val);
    if (o != Ordering::EQ) return o == Ordering::LT;
    if (a.is_open != b.is_open) return !a.is_open;
    if (a.cid != b.cid) return a.cid < b.cid;
    return a.is_make < b.is_make;
}

// Ordered boundary collection; two interchangeable strategies (kept
// behind one interface so tests can cross-check them).
class BoundaryContainer {
public:
    enum class Strategy { SortedVector, OrderedMultiset };

    explicit BoundaryContainer(Strategy s = Strategy::SortedVector) : strat_(s) {
        if (strat_ == Strategy::OrderedMultiset) set_.emplace(&boundary_less);
    }

    void add(Boundary b) {
        if (strat_ == Strategy::SortedVector)
            vec_.push_back(std::move(b));
        else
            set_->insert(std::move(b));
    }

    std::vector<Boundary> ordered() const {
        if (strat_ == Strategy::SortedVector) {
            std::vector<Boundary> out = vec_;
            std::stable_sort(out.begin(), out.end(), boundary_less);
            return out;
        }
        return std::vector<Boundary>(set_->begin(), set_->end());
    }

private:
    Strategy strat_;
    std::vector<Boundary> vec_;
    std::optional<std::multiset<Boundary, bool (*)(const Boundary&, const Boundary&)>> set_;
};

// Per-(variable, clause) score information. The weighted starting score
// is weight * (minus_inf_feasible - sat), with sat read live from the
// clause cache at traversal time.
struct VarClauseScore {
    bool minus_inf_feasible = false;
    bool unavailable = false; // substitution failed: frozen, contributes 0
    std::vector<Boundary> boundaries;
    bool dirty = true;
};

// Combined (per-variable) score information.
struct VarScore {
    long start = 0;
    std::vector<Boundary> merged;
};

// One maximal interval of constant make-break score for some variable.
struct Segment {
    Bound lo, hi;
    long score = 0;
    bool one_point = false;
    std::vector<int> cids; // clauses with a boundary delimiting this segment
};

class Scoreboard {
public:
    Scoreboard(std::vector<Clause> clauses, std::size_t num_reals, std::size_t num_bools,
               Rational eps_p,
               BoundaryContainer::Strategy strategy = BoundaryContainer::Strategy::SortedVector,
               bool naive = false)
        : clauses_(std::move(clauses)), eps_p_(std::move(eps_p)), strategy_(strategy),
          naive_(naive) {
        weights_.assign(clauses_.size(), 1);
        real_occ_.assign(num_reals, {});
        bool_occ_.assign(num_bools, {});
        for (std::size_t i = 0; i < clauses_.size(); ++i) {
            cid_to_idx_[clauses_[i].cid] = static_cast<int>(i);
            for (VarId v : clause_real_vars(clauses_[i])) real_occ_[v].push_back(i);
            for (const Literal& l : clauses_[i].literals)
                if (l.is_bool()) {
                    auto& occ = bool_occ_[l.atom.bool_var];
                    if (occ.empty() || occ.back() != static_cast<int>(i)) occ.push_back(i);
                }
        }
        sat_.assign(clauses_.size(), false);
        lit_truth_.resize(clauses_.size());
        Assignment a;
        a.reals.assign(num_reals, Value(Rational(0)));
        a.bools.assign(num_bools, true);
        reset_assignment(std::move(a));
    }

    const Assignment& assignment() const { return asg_; }
    const std::vector<Clause>& clauses() const { return clauses_; }
    const Rational& eps_p() const { return eps_p_; }
    std::size_t num_reals() const { return real_occ_.size(); }
    std::size_t num_bools() const { return bool_occ_.size(); }

    void reset_assignment(Assignment a) {
        asg_ = std::move(a);
        unsat_weight_ = 0;
        for (std::size_t i = 0; i < clauses_.size(); ++i) {
            recompute_clause(i);
            if (!sat_[i]) unsat_weight_ += weights_[i];
        }
        dirty_all();
    }

    // ---- clause status ------------------------------------------------
    bool sat(int idx) const { return sat_[idx]; }
    long unsat_weight() const { return unsat_weight_; }
    bool all_sat() const { return unsat_weight_ == 0; }

    std::vector<int> unsat_clauses() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < clauses_.size(); ++i)
            if (!sat_[i]) out.push_back(static_cast<int>(i));
        return out;
    }

    long weight(int idx) const { return weights_[idx]; }
    void set_weight(int idx, long w) {
        if (w < 1) throw std::invalid_argument("clause weight must be >= 1");
        if (!sat_[idx]) unsat_weight_ += w - weights_[idx];
        weights_[idx] = w;
        ++version_;
    }
    void reset_weights() {
        for (std::size_t i = 0; i < clauses_.size(); ++i)
            if (weights_[i] != 1) set_weight(static_cast<int>(i), 1);
    }

    // One Bernoulli(sp) draw decides the branch: with probability 1-sp
    // every unsatisfied clause gets +1 weight, otherwise every satisfied
    // clause with weight > 1 gets -1.
    void paws_update(Rng& rng, const Rational& sp) {
        bool smooth = rng.bernoulli(sp);
        for (std::size_t i = 0; i < clauses_.size(); ++i) {
            if (!smooth && !sat_[i])
                set_weight(static_cast<int>(i), weights_[i] + 1);
            else if (smooth && sat_[i] && weights_[i] > 1)
                set_weight(static_cast<int>(i), weights_[i] - 1);
        }
    }

    // ---- mutations -----------------------------------------------------
    void apply_real_move(VarId x, Value v) {
        asg_.reals[x] = std::move(v);
        touch_clauses_of(real_occ_[x]);
    }

    void apply_bool_flip(BoolVarId b) {
        asg_.bools[b] = !asg_.bools[b];
        touch_clauses_of(bool_occ_[b]);
    }

    void set_relaxed(int idx, std::size_t lit_index, bool relaxed) {
        Literal& l = clauses_[idx].literals[lit_index];
        if (relaxed && (l.is_bool() || l.negated))
            throw std::logic_error("only non-negated arithmetic literals can be relaxed");
        if (l.relaxed == relaxed) return;
        l.relaxed = relaxed;
        touch_clauses_of({idx});
    }

    // ---- score queries ---------------------------------------------------
    const VarClauseScore& vcs(VarId x, int idx) {
        VarClauseScore& s = vcs_slot(x, idx);
        if (s.dirty) recompute_vcs(x, idx, s);
        return s;
    }

    bool vcs_dirty(VarId x, int idx) const {
        auto it = vcs_.find(key(x, idx));
        return it == vcs_.end() || it->second.dirty;
    }

    long start_score(VarId x, int idx) {
        const VarClauseScore& s = vcs(x, idx);
        return weights_[idx] * (long(s.minus_inf_feasible) - long(sat_[idx]));
    }

    VarScore combine(VarId x) {
        auto it = var_cache_.find(x);
        if (it != var_cache_.end() && it->second.first == version_) return it->second.second;
        VarScore out;
        BoundaryContainer bc(strategy_);
        for (int idx : real_occ_[x]) {
            const VarClauseScore& s = vcs(x, idx);
            out.start += weights_[idx] * (long(s.minus_inf_feasible) - long(sat_[idx]));
            for (const Boundary& b : s.boundaries) bc.add(b);
        }
        out.merged = bc.ordered();
        var_cache_[x] = {version_, out};
        return out;
    }

    // Maximal constant-score intervals for x, adjacent equal-score
    // segments merged. The score is the make-break score of moving x
    // there.
    std::vector<Segment> segments(VarId x) {
        VarScore vs = combine(x);
        std::vector<Segment> segs;
        long score = vs.start;
        Bound cursor = Bound::neg_inf();
        std::size_t i = 0;
        while (i < vs.merged.size()) {
            const Value& v = vs.merged[i].val;
            long at_delta = 0, after_delta = 0;
            std::vector<int> cids;
            std::size_t j = i;
            for (; j < vs.merged.size() && cmp_value(vs.merged[j].val, v) == Ordering::EQ; ++j) {
                const Boundary& b = vs.merged[j];
                long w = weights_[cid_to_idx_.at(b.cid)];
                (b.is_open ? after_delta : at_delta) += b.is_make ? w : -w;
                cids.push_back(b.cid);
            }
            push_segment(segs, {cursor, Bound::finite(v, true), score, false, {}});
            Segment point{Bound::finite(v, false), Bound::finite(v, false), score + at_delta,
                          true, std::move(cids)};
            push_segment(segs, std::move(point));
            score += at_delta + after_delta;
            cursor = Bound::finite(v, true);
            i = j;
        }
        push_segment(segs, {cursor, Bound::pos_inf(), score, false, {}});
        return segs;
    }

    // Make-break score of moving x to v (0 when v is the current value).
    long eval_move_score(VarId x, const Value& v) {
        VarScore vs = combine(x);
        long score = vs.start;
        for (const Boundary& b : vs.merged) {
            Ordering o = cmp_value(b.val, v);
            if (o == Ordering::GT) break;
            if (o == Ordering::EQ && b.is_open) continue;
            long w = weights_[cid_to_idx_.at(b.cid)];
            score += b.is_make ? w : -w;
        }
        return score;
    }

    // Total weight of clauses made satisfied minus made unsatisfied by
    // flipping b.
    long bool_flip_score(BoolVarId b) {
        long score = 0;
        for (int idx : bool_occ_[b]) {
            bool now = sat_[idx];
            bool after = false;
            const Clause& c = clauses_[idx];
            for (std::size_t k = 0; k < c.literals.size() && !after; ++k) {
                const Literal& l = c.literals[k];
                if (l.is_bool() && l.atom.bool_var == b)
                    after = !lit_truth_[idx][k];
                else
                    after = lit_truth_[idx][k];
            }
            if (after && !now) score += weights_[idx];
            if (!after && now) score -= weights_[idx];
        }
        return score;
    }

    int idx_of_cid(int cid) const { return cid_to_idx_.at(cid); }

private:
    static std::vector<VarId> clause_real_vars(const Clause& c) {
        std::vector<VarId> vs;
        for (const Literal& l : c.literals)
            if (!l.is_bool())
                for (VarId v : l.atom.poly.variables()) vs.push_back(v);
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        return vs;
    }

    static long long key(VarId x, int idx) {
        return (static_cast<long long>(x) << 32) | static_cast<unsigned>(idx);
    }

    VarClauseScore& vcs_slot(VarId x, int idx) { return vcs_[key(x, idx)]; }

    void recompute_vcs(VarId x, int idx, VarClauseScore& s) {
        s.boundaries.clear();
        s.unavailable = false;
        try {
            IntervalSet fs = clause_feasible_set(clauses_[idx], asg_, x, eps_p_);
            s.minus_inf_feasible =
                !fs.empty() && fs.intervals().front().lo.kind == Bound::NegInf;
            int cid = clauses_[idx].cid;
            for (const Interval& iv : fs.intervals()) {
                if (iv.lo.kind == Bound::Finite)
                    s.boundaries.push_back({*iv.lo.value, iv.lo.open, true, cid});
                if (iv.hi.kind == Bound::Finite)
                    s.boundaries.push_back({*iv.hi.value, !iv.hi.open, false, cid});
            }
        } catch (const MoveUnavailable&) {
            // Frozen: status cannot be changed through x; flat zero.
            s.unavailable = true;
            s.minus_inf_feasible = sat_[idx];
        }
        s.dirty = false;
    }

    void recompute_clause(std::size_t idx) {
        const Clause& c = clauses_[idx];
        auto& truth = lit_truth_[idx];
        truth.assign(c.literals.size(), false);
        bool any = false;
        for (std::size_t k = 0; k < c.literals.size(); ++k) {
            try {
                truth[k] = literal_holds(c.literals[k], asg_, eps_p_);
            } catch (const MoveUnavailable&) {
                // Undecidable literal (several algebraic values in one
                // polynomial): conservatively treated as false, so the
                // clause can never be wrongly reported satisfied.
                truth[k] = false;
            }
            any = any || truth[k];
        }
        sat_[idx] = any;
    }

    void touch_clauses_of(const std::vector<int>& idxs) {
        for (int idx : idxs) {
            bool was = sat_[idx];
            recompute_clause(idx);
            if (was != sat_[idx]) unsat_weight_ += sat_[idx] ? -weights_[idx] : weights_[idx];
            for (VarId v : clause_real_vars(clauses_[idx])) vcs_slot(v, idx).dirty = true;
        }
        if (naive_) dirty_all();
        ++version_;
    }

    void dirty_all() {
        for (auto& [k, s] : vcs_) s.dirty = true;
        var_cache_.clear();
        ++version_;
    }

    static void push_segment(std::vector<Segment>& segs, Segment s) {
        if (!segs.empty() && segs.back().score == s.score) {
            // merge with the previous segment (they always touch)
            segs.back().hi = s.hi;
            segs.back().one_point = false;
            segs.back().cids.clear();
            return;
        }
        segs.push_back(std::move(s));
    }

    std::vector<Clause> clauses_;
    Rational eps_p_;
    BoundaryContainer::Strategy strategy_;
    bool naive_;
    Assignment asg_;
    std::vector<long> weights_;
    std::vector<bool> sat_;
    std::vector<std::vector<bool>> lit_truth_;
    std::vector<std::vector<int>> real_occ_, bool_occ_;
    std::map<int, int> cid_to_idx_;
    std::unordered_map<long long, VarClauseScore> vcs_;
    std::map<VarId, std::pair<unsigned long, VarScore>> var_cache_;
    long unsat_weight_ = 0;
    unsigned long version_ = 0;
};

} // namespace nrals
