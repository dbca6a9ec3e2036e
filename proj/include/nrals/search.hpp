#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "nrals/scoreboard.hpp"

namespace nrals {

// How values beyond the complexity threshold are handled:
//   Relax     - relax the forcing constraints instead of assigning them
//               (only while use_slack is on)
//   Threshold - never assign them; no relaxation
//   FullOrder - no relaxation; moves ranked by value complexity first
enum class RelaxMode { Relax, Threshold, FullOrder };

struct SearchParams {
    Rational sp = make_rational(3, 500); // 0.006
    int T1 = 100;
    int T2 = 100;
    Rational eps_v = make_rational(1, 10000);
    Rational eps_p = make_rational(1, 10000);
    std::uint64_t max_steps = std::numeric_limits<std::uint64_t>::max();
    double time_limit_s = -1.0; // negative: no wall-clock limit
    std::uint64_t seed = 0;
    RelaxMode relax_mode = RelaxMode::Relax;
    bool incremental = true;
    BoundaryContainer::Strategy strategy = BoundaryContainer::Strategy::SortedVector;
};

struct SearchStats {
    std::uint64_t steps = 0;
    long minor_restarts = 0;
    long major_restarts = 0;
    long relaxations = 0;
};

enum class Answer { Sat, Unknown };

struct SearchResult {
    Answer answer = Answer::Unknown;
    Assignment model;
    SearchStats stats;
};

// A candidate single-variable move: either a real assignment or a boolean
// flip, annotated with its make-break score.
struct Move {
    bool is_flip = false;
    VarId x = -1;
    BoolVarId b = -1;
    Value value{Rational(0)};
    long score = 0;
    bool one_point = false;
    std::vector<int> cids; // clauses delimiting a one-point interval
};

class Searcher {
public:
    Searcher(std::vector<Clause> clauses, std::size_t num_reals, std::size_t num_bools,
             SearchParams params, std::ostream* trace = nullptr)
        : params_(std::move(params)),
          sb_(std::move(clauses), num_reals, num_bools, params_.eps_p, params_.strategy,
              !params_.incremental),
          rng_(params_.seed), trace_(trace) {
        covars_.assign(num_reals, {});
        for (const Clause& c : sb_.clauses())
            for (const Literal& l : c.literals) {
                if (l.is_bool()) continue;
                std::vector<VarId> vs = l.atom.poly.variables();
                for (VarId a : vs)
                    for (VarId b : vs)
                        if (a != b) covars_[a].push_back(b);
            }
        for (auto& cv : covars_) {
            std::sort(cv.begin(), cv.end());
            cv.erase(std::unique(cv.begin(), cv.end()), cv.end());
        }
        infeasible_.assign(num_reals, IntervalSet::empty_set());
        for (const Clause& c : sb_.clauses()) {
            try {
                auto [v, inf] = unit_infeasible_set(c, params_.eps_p);
                infeasible_[v] = infeasible_[v].unite(inf);
            } catch (const std::invalid_argument&) {
                // not a single-variable arithmetic clause
            } catch (const std::logic_error&) {
            }
        }
    }

    // Observer invoked after every performed move (used by tests to check
    // per-move invariants such as value complexity under use_slack).
    std::function<void(const Move&, bool use_slack)> move_observer;

    const Scoreboard& scoreboard() const { return sb_; }
    bool use_slack() const { return use_slack_; }

    SearchResult run() {
        auto t0 = std::chrono::steady_clock::now();
        SearchResult res;
        for (;;) {
            if (stats_.steps >= params_.max_steps) break;
            if (params_.time_limit_s >= 0 && stats_.steps % 256 == 0) {
                double el = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                          t0)
                                .count();
                if (el > params_.time_limit_s) break;
            }
            if (sb_.all_sat()) {
                if (use_slack_) {
                    restore();
                    continue;
                }
                res.answer = Answer::Sat;
                res.model = sb_.assignment();
                break;
            }
            if (non_improving_ >= params_.T1) {
                if (!use_slack_) {
                    use_slack_ = true;
                    trace_line("slack on");
                }
                if (minor_count_ >= params_.T2)
                    major_restart();
                else
                    minor_restart();
                continue;
            }
            ++stats_.steps;
            step();
            long w = sb_.unsat_weight();
            if (w < best_unsat_) {
                best_unsat_ = w;
                non_improving_ = 0;
            } else {
                ++non_improving_;
            }
        }
        res.stats = stats_;
        return res;
    }

private:
    // ---- value admissibility -------------------------------------------

    bool beyond_threshold(const Value& v) const {
        if (!is_rational(v)) return true;
        return Rational(denominator(as_rational(v))) * params_.eps_v > 1;
    }

    // Assigning an algebraic value to x must not create a polynomial with
    // two algebraic-valued variables (which would make evaluation
    // undecidable for this solver).
    bool algebraic_safe(VarId x) const {
        for (VarId y : covars_[x])
            if (!is_rational(sb_.assignment().reals[y])) return false;
        return true;
    }

    bool value_allowed(VarId x, const Value& v, bool one_point = false) const {
        if (params_.relax_mode == RelaxMode::Threshold && beyond_threshold(v)) return false;
        // In slack mode complex values are only reachable through the
        // relaxation rule, which applies to one-point intervals.
        if (use_slack_ && params_.relax_mode == RelaxMode::Relax && !one_point &&
            beyond_threshold(v))
            return false;
        if (!is_rational(v) && !algebraic_safe(x)) return false;
        if (exclude_infeasible_ && infeasible_[x].contains(v)) return false;
        return true;
    }

    // ---- move ranking -----------------------------------------------------

    // Complexity key for ranking: boolean flips count as integers.
    static Value rank_value(const Move& m) {
        return m.is_flip ? Value(Rational(1)) : m.value;
    }

    // Returns >0 when a is strictly better than b, <0 when worse, 0 on tie.
    int better(const Move& a, const Move& b) const {
        Complexity c = cmp_complexity(rank_value(a), rank_value(b));
        if (params_.relax_mode == RelaxMode::FullOrder) {
            if (c == Complexity::PREC) return 1;
            if (c == Complexity::SUCC) return -1;
            return a.score > b.score ? 1 : (a.score < b.score ? -1 : 0);
        }
        if (a.score != b.score) return a.score > b.score ? 1 : -1;
        if (c == Complexity::PREC) return 1;
        if (c == Complexity::SUCC) return -1;
        return 0;
    }

    void consider(std::vector<Move>& best, Move m) const {
        if (best.empty()) {
            best.push_back(std::move(m));
            return;
        }
        int c = better(m, best.front());
        if (c > 0) {
            best.clear();
            best.push_back(std::move(m));
        } else if (c == 0) {
            best.push_back(std::move(m));
        }
    }

    std::optional<Move> pick(std::vector<Move>& best) {
        if (best.empty()) return std::nullopt;
        if (best.size() == 1) return std::move(best.front());
        return std::move(best[rng_.below(best.size())]);
    }

    // Best move over all variables occurring in unsatisfied clauses.
    std::optional<Move> best_move() {
        std::vector<char> real_mark(sb_.num_reals(), 0), bool_mark(sb_.num_bools(), 0);
        for (int idx : sb_.unsat_clauses())
            for (const Literal& l : sb_.clauses()[idx].literals) {
                if (l.is_bool())
                    bool_mark[l.atom.bool_var] = 1;
                else
                    for (VarId v : l.atom.poly.variables()) real_mark[v] = 1;
            }
        std::vector<Move> best;
        for (VarId x = 0; x < static_cast<VarId>(real_mark.size()); ++x) {
            if (!real_mark[x]) continue;
            for (Segment& s : sb_.segments(x)) {
                Move m;
                m.x = x;
                m.score = s.score;
                m.one_point = s.one_point;
                if (s.one_point) {
                    m.value = *s.lo.value;
                    m.cids = std::move(s.cids);
                } else {
                    m.value = Value(simplest_rational_in(s.lo, s.hi));
                }
                if (!value_allowed(x, m.value, m.one_point)) continue;
                consider(best, std::move(m));
            }
        }
        for (BoolVarId b = 0; b < static_cast<BoolVarId>(bool_mark.size()); ++b) {
            if (!bool_mark[b]) continue;
            Move m;
            m.is_flip = true;
            m.b = b;
            m.score = sb_.bool_flip_score(b);
            consider(best, std::move(m));
        }
        return pick(best);
    }

    // Best single-variable move that satisfies the given clause; the score
    // may be negative.
    std::optional<Move> critical_move(int idx) {
        const Clause& c = sb_.clauses()[idx];
        std::vector<Move> best;
        std::vector<VarId> vars;
        for (const Literal& l : c.literals)
            if (!l.is_bool())
                for (VarId v : l.atom.poly.variables()) vars.push_back(v);
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        for (VarId x : vars) {
            IntervalSet fs;
            try {
                fs = clause_feasible_set(c, sb_.assignment(), x, params_.eps_p);
            } catch (const MoveUnavailable&) {
                continue;
            }
            for (const Interval& iv : fs.intervals()) {
                Move m;
                m.x = x;
                m.one_point = iv.is_point();
                m.value = m.one_point ? *iv.lo.value : Value(simplest_rational_in(iv.lo, iv.hi));
                if (m.one_point) m.cids = {c.cid};
                if (!value_allowed(x, m.value, m.one_point)) continue;
                m.score = sb_.eval_move_score(x, m.value);
                consider(best, std::move(m));
            }
        }
        for (const Literal& l : c.literals) {
            if (!l.is_bool()) continue;
            if (sb_.assignment().bools[l.atom.bool_var] != l.negated) continue; // already true
            Move m;
            m.is_flip = true;
            m.b = l.atom.bool_var;
            m.score = sb_.bool_flip_score(l.atom.bool_var);
            consider(best, std::move(m));
        }
        return pick(best);
    }

    // ---- relaxation -----------------------------------------------------

    // More complex than eps_v AND strictly more complex than the value of
    // every other variable.
    bool relaxation_condition(const Move& m) const {
        if (!beyond_threshold(m.value)) return false;
        const RealAssignment& reals = sb_.assignment().reals;
        for (VarId v = 0; v < static_cast<VarId>(reals.size()); ++v) {
            if (v == m.x) continue;
            if (cmp_complexity(m.value, reals[v]) != Complexity::SUCC) return false;
        }
        return true;
    }

    // Relaxes the non-strict non-negated atoms of the given clauses;
    // returns how many atoms were newly relaxed.
    int relax_clauses(const std::vector<int>& cids) {
        int count = 0;
        std::string cs;
        for (int cid : cids) {
            int idx = sb_.idx_of_cid(cid);
            const Clause& c = sb_.clauses()[idx];
            for (std::size_t k = 0; k < c.literals.size(); ++k) {
                const Literal& l = c.literals[k];
                if (l.is_bool() || l.negated || l.relaxed) continue;
                sb_.set_relaxed(idx, k, true);
                relaxed_atoms_.emplace_back(idx, k);
                ++count;
            }
            if (!cs.empty()) cs += ",";
            cs += std::to_string(cid);
        }
        if (count > 0) {
            ++stats_.relaxations;
            trace_line("relax cids " + cs);
        }
        return count;
    }

    void restore() {
        for (auto [idx, k] : relaxed_atoms_) sb_.set_relaxed(idx, k, false);
        relaxed_atoms_.clear();
        use_slack_ = false;
        trace_line("restore");
    }

    // ---- performing moves -------------------------------------------------

    void perform(const Move& m) {
        if (m.is_flip) {
            sb_.apply_bool_flip(m.b);
            trace_line("flip b" + std::to_string(m.b) + " score " + std::to_string(m.score));
        } else {
            sb_.apply_real_move(m.x, m.value);
            trace_line("move r" + std::to_string(m.x) + " := " + value_str(m.value) +
                       " score " + std::to_string(m.score));
        }
        if (move_observer) move_observer(m, use_slack_);
    }

    // Relaxes instead of moving when the relaxation rule fires; returns
    // true when the move was actually performed.
    bool relax_or_perform(const Move& m) {
        if (!m.is_flip && m.one_point && !m.cids.empty() && use_slack_ &&
            params_.relax_mode == RelaxMode::Relax && relaxation_condition(m)) {
            // When nothing new was relaxed the move stays rejected; the
            // non-improvement counter eventually forces a restart.
            relax_clauses(m.cids);
            return false;
        }
        perform(m);
        return true;
    }

    // ---- stuck-literal heuristic ----------------------------------------

    static int substituted_degree(const SubstitutedPoly& sp) {
        if (sp.has_algebraic()) return static_cast<int>(sp.extended.size()) - 1;
        return sp.rational.degree();
    }

    // True when the finite candidate window holds at least one rational.
    static bool window_nonempty(const Bound& lo, const Bound& hi) {
        if (!lo.is_finite() || !hi.is_finite()) return true;
        Ordering o = cmp_value(*lo.value, *hi.value);
        if (o == Ordering::LT) return true;
        // degenerate point: usable only when it is a rational
        return o == Ordering::EQ && !lo.open && !hi.open && is_rational(*lo.value);
    }

    // Rational strictly above / below v, within distance eps.
    Rational rational_above(const Value& v, const Rational& eps) {
        if (is_rational(v)) return as_rational(v) + eps;
        return as_algebraic(v).refined(eps / 2).hi() + eps / 2;
    }
    Rational rational_below(const Value& v, const Rational& eps) {
        if (is_rational(v)) return as_rational(v) - eps;
        return as_algebraic(v).refined(eps / 2).lo() - eps / 2;
    }

    void push_candidate(std::vector<Value>& s, VarId x, Value v) {
        if (!value_allowed(x, v)) return;
        if (use_slack_ && params_.relax_mode == RelaxMode::Relax && beyond_threshold(v))
            return; // heuristic values stay simple in slack mode
        if (value_eq(v, sb_.assignment().reals[x])) return;
        for (const Value& w : s)
            if (value_eq(w, v)) return;
        s.push_back(std::move(v));
    }

    // Candidate values for x taken from the feasible-set boundaries of the
    // stuck literal, adjacent integers, and random draws around the
    // current value.
    std::vector<Value> stuck_candidates(const Literal& l, VarId x) {
        std::vector<Value> s;
        const Rational& eps = params_.eps_v;
        IntervalSet feas;
        try {
            feas = feasible_set(l, sb_.assignment().reals, x, params_.eps_p);
        } catch (const MoveUnavailable&) {
        }
        // (1) rationals just inside each finite boundary, plus nearby
        // integers inside the interval
        for (const Interval& iv : feas.intervals()) {
            if (iv.lo.is_finite()) {
                Bound hi_cap = Bound::finite(Value(rational_above(*iv.lo.value, eps)), false);
                if (detail::cmp_upper(iv.hi, hi_cap) < 0) hi_cap = iv.hi;
                if (window_nonempty(iv.lo, hi_cap))
                    push_candidate(s, x, Value(simplest_rational_in(iv.lo, hi_cap)));
                Integer n = value_floor(*iv.lo.value);
                for (int d = 0; d <= 1; ++d) {
                    Value cand{Rational(Integer(n + d))};
                    if (iv.contains(cand)) push_candidate(s, x, cand);
                }
            }
            if (iv.hi.is_finite()) {
                Bound lo_cap = Bound::finite(Value(rational_below(*iv.hi.value, eps)), false);
                if (detail::cmp_lower(iv.lo, lo_cap) > 0) lo_cap = iv.lo;
                if (window_nonempty(lo_cap, iv.hi))
                    push_candidate(s, x, Value(simplest_rational_in(lo_cap, iv.hi)));
                Integer n = value_floor(*iv.hi.value);
                for (int d = 0; d <= 1; ++d) {
                    Value cand{Rational(Integer(n + d))};
                    if (iv.contains(cand)) push_candidate(s, x, cand);
                }
            }
        }
        // (2) adjacent integers
        const Value& x0 = sb_.assignment().reals[x];
        Integer f = value_floor(x0);
        bool is_int = is_rational(x0) && is_integer(as_rational(x0));
        push_candidate(s, x, Value(Rational(is_int ? f - 1 : f)));
        push_candidate(s, x, Value(Rational(f + 1)));
        // (3) three uniform draws on each side of x0 (spans order-normalized;
        // empty when x0 = 0 or irrational)
        if (is_rational(x0) && as_rational(x0) != 0) {
            Rational r0 = as_rational(x0);
            Rational half = r0 / 2, twice = r0 * 2;
            Rational lo1 = std::min(half, r0), hi1 = std::max(half, r0);
            Rational lo2 = std::min(r0, twice), hi2 = std::max(r0, twice);
            for (int i = 0; i < 3; ++i) {
                Rational u = rng_.uniform_rational(lo1, hi1);
                if (u != r0) push_candidate(s, x, Value(u));
            }
            for (int i = 0; i < 3; ++i) {
                Rational u = rng_.uniform_rational(lo2, hi2);
                if (u != r0) push_candidate(s, x, Value(u));
            }
        }
        return s;
    }

    // First candidate whose tentative application gives the literal a
    // nonempty feasible set for some variable; random fallback.
    Value lookahead_pick(const Literal& l, VarId x, const std::vector<Value>& s) {
        std::vector<VarId> vars = l.atom.poly.variables();
        for (const Value& v : s) {
            Assignment tmp = sb_.assignment();
            tmp.reals[x] = v;
            try {
                if (literal_holds(l, tmp, params_.eps_p)) return v;
            } catch (const MoveUnavailable&) {
            }
            for (VarId w : vars) {
                if (w == x) continue;
                try {
                    if (!feasible_set(l, tmp.reals, w, params_.eps_p).empty()) return v;
                } catch (const MoveUnavailable&) {
                }
            }
        }
        return s[rng_.below(s.size())];
    }

    bool stuck_move(int idx) {
        const Clause& c = sb_.clauses()[idx];
        std::vector<std::size_t> arith;
        for (std::size_t k = 0; k < c.literals.size(); ++k)
            if (!c.literals[k].is_bool()) arith.push_back(k);
        if (arith.empty()) return false;
        const Literal& l = c.literals[arith[rng_.below(arith.size())]];
        // variables with nonzero coefficient under the current assignment
        // of the others
        std::vector<VarId> nz;
        for (VarId v : l.atom.poly.variables()) {
            try {
                if (substituted_degree(
                        substitute_except(l.atom.poly, sb_.assignment().reals, v)) >= 1)
                    nz.push_back(v);
            } catch (const MoveUnavailable&) {
            }
        }
        if (nz.empty()) nz = l.atom.poly.variables(); // fallback: random variable
        if (nz.empty()) return false;
        VarId x = nz[rng_.below(nz.size())];
        std::vector<Value> s = stuck_candidates(l, x);
        if (s.empty()) return false;
        Value v = lookahead_pick(l, x, s);
        Move m;
        m.x = x;
        m.value = std::move(v);
        m.score = sb_.eval_move_score(x, m.value);
        perform(m);
        return true;
    }

    // Last-resort perturbation: re-randomize one variable of the clause.
    void random_perturb(int idx) {
        const Clause& c = sb_.clauses()[idx];
        std::vector<VarId> reals;
        std::vector<BoolVarId> bools;
        for (const Literal& l : c.literals) {
            if (l.is_bool())
                bools.push_back(l.atom.bool_var);
            else
                for (VarId v : l.atom.poly.variables()) reals.push_back(v);
        }
        std::sort(reals.begin(), reals.end());
        reals.erase(std::unique(reals.begin(), reals.end()), reals.end());
        std::sort(bools.begin(), bools.end());
        bools.erase(std::unique(bools.begin(), bools.end()), bools.end());
        std::size_t total = reals.size() + bools.size();
        if (total == 0) return;
        std::size_t k = rng_.below(total);
        if (k < reals.size()) {
            Move m;
            m.x = reals[k];
            m.value = Value(Rational(static_cast<long>(rng_.below(21)) - 10));
            perform(m);
        } else {
            Move m;
            m.is_flip = true;
            m.b = bools[k - reals.size()];
            perform(m);
        }
    }

    // ---- restarts -----------------------------------------------------

    void minor_restart() {
        ++stats_.minor_restarts;
        ++minor_count_;
        trace_line("minor restart " + std::to_string(minor_count_));
        std::vector<int> uns = sb_.unsat_clauses();
        if (!uns.empty()) random_perturb(uns[rng_.below(uns.size())]);
        exclude_infeasible_ = !exclude_infeasible_;
        non_improving_ = 0;
        best_unsat_ = sb_.unsat_weight();
    }

    void major_restart() {
        ++stats_.major_restarts;
        minor_count_ = 0;
        trace_line("major restart");
        for (auto [idx, k] : relaxed_atoms_) sb_.set_relaxed(idx, k, false);
        relaxed_atoms_.clear();
        use_slack_ = true;
        Assignment a;
        a.reals.reserve(sb_.num_reals());
        // initial values (all zero) perturbed by uniform integers in [-10, 10]
        for (std::size_t i = 0; i < sb_.num_reals(); ++i)
            a.reals.push_back(Value(Rational(static_cast<long>(rng_.below(21)) - 10)));
        for (std::size_t i = 0; i < sb_.num_bools(); ++i)
            a.bools.push_back(rng_.below(2) == 0);
        sb_.reset_assignment(std::move(a));
        sb_.reset_weights();
        non_improving_ = 0;
        best_unsat_ = sb_.unsat_weight();
    }

    // ---- one search step ----------------------------------------------

    void step() {
        std::optional<Move> bm = best_move();
        if (bm && bm->score > 0) {
            relax_or_perform(*bm);
            return;
        }
        sb_.paws_update(rng_, params_.sp);
        for (int attempt = 0; attempt < 3; ++attempt) {
            std::vector<int> uns = sb_.unsat_clauses();
            int idx = uns[rng_.below(uns.size())];
            std::optional<Move> cm = critical_move(idx);
            if (cm) {
                relax_or_perform(*cm);
                return;
            }
        }
        std::vector<int> uns = sb_.unsat_clauses();
        int idx = uns[rng_.below(uns.size())];
        if (!stuck_move(idx)) random_perturb(idx);
    }

    void trace_line(const std::string& msg) {
        if (!trace_) return;
        (*trace_) << "step " << stats_.steps << " unsat_w " << sb_.unsat_weight() << " "
                  << msg << "\n";
    }

    SearchParams params_;
    Scoreboard sb_;
    Rng rng_;
    std::ostream* trace_;
    std::vector<std::vector<VarId>> covars_;
    std::vector<IntervalSet> infeasible_;
    std::vector<std::pair<int, std::size_t>> relaxed_atoms_;
    bool use_slack_ = true;
    bool exclude_infeasible_ = false;
    int non_improving_ = 0;
    int minor_count_ = 0;
    long best_unsat_ = std::numeric_limits<long>::max();
    SearchStats stats_;
};

inline SearchResult solve(std::vector<Clause> clauses, std::size_t num_reals,
                          std::size_t num_bools, const SearchParams& params,
                          std::ostream* trace = nullptr) {
    Searcher s(std::move(clauses), num_reals, num_bools, params, trace);
    return s.run();
}

} // namespace nrals
