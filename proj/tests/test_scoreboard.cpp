#include <catch2/catch_amalgamated.hpp>

#include "nrals/scoreboard.hpp"

using namespace nrals;

namespace {

Polynomial var(VarId v) { return Polynomial::variable(v); }
Polynomial cst(long n, long d = 1) { return Polynomial::constant(make_rational(n, d)); }

Literal lit_cmp(Polynomial p, CmpKind k, bool negated = false) {
    Literal l;
    l.atom = Atom::compare(std::move(p), k);
    l.negated = negated;
    return l;
}

Literal lit_bool(BoolVarId b, bool negated = false) {
    Literal l;
    l.atom = Atom::boolean(b);
    l.negated = negated;
    return l;
}

Clause clause(int cid, std::vector<Literal> lits) {
    Clause c;
    c.cid = cid;
    c.literals = std::move(lits);
    return c;
}

QPoly qp(std::initializer_list<long> coeffs) {
    std::vector<Rational> c;
    for (long v : coeffs) c.push_back(Rational(v));
    return QPoly(std::move(c));
}

AlgebraicNumber sqrt_of(long n, long lo, long hi) {
    return AlgebraicNumber(qp({-n, 0, 1}), Rational(lo), Rational(hi));
}

bool boundary_eq(const Boundary& a, const Boundary& b) {
    return value_eq(a.val, b.val) && a.is_open == b.is_open && a.is_make == b.is_make &&
           a.cid == b.cid;
}

void require_boundaries(const std::vector<Boundary>& got,
                        const std::vector<Boundary>& expected) {
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        INFO("boundary " << i);
        REQUIRE(boundary_eq(got[i], expected[i]));
    }
}

// The running example used throughout the scoreboard tests:
//   clause cid 1 (weight 1):  x^2 + y^2 <= 1
//   clause cid 2 (weight 3):  x + y < 1        (encoded as !(x + y - 1 >= 0))
//   clause cid 3 (weight 2):  x + z > 0        (encoded as !(x + z <= 0))
// under the assignment x = y = z = 1.
Scoreboard example_board(
    BoundaryContainer::Strategy strat = BoundaryContainer::Strategy::SortedVector,
    bool naive = false) {
    const VarId x = 0, y = 1, z = 2;
    std::vector<Clause> cls;
    cls.push_back(clause(1, {lit_cmp(var(x) * var(x) + var(y) * var(y) - cst(1), CmpKind::LE)}));
    cls.push_back(clause(2, {lit_cmp(var(x) + var(y) - cst(1), CmpKind::GE, true)}));
    cls.push_back(clause(3, {lit_cmp(var(x) + var(z), CmpKind::LE, true)}));
    Scoreboard sb(std::move(cls), 3, 0, make_rational(1, 10000), strat, naive);
    Assignment a;
    a.reals = {Value(Rational(1)), Value(Rational(1)), Value(Rational(1))};
    sb.reset_assignment(a);
    sb.set_weight(0, 1);
    sb.set_weight(1, 3);
    sb.set_weight(2, 2);
    return sb;
}

} // namespace

TEST_CASE("per-clause boundaries for the running example") {
    Scoreboard sb = example_board();
    const VarId x = 0;

    // clause 1 is unsatisfied (1 + 1 > 1); feasible set for x is [0, 0]
    REQUIRE(!sb.sat(0));
    REQUIRE(sb.start_score(x, 0) == 0);
    require_boundaries(sb.vcs(x, 0).boundaries, {{Value(Rational(0)), false, true, 1},
                                                 {Value(Rational(0)), true, false, 1}});

    // clause 2 is unsatisfied; feasible set (-inf, 0), so -inf counts as make
    REQUIRE(!sb.sat(1));
    REQUIRE(sb.start_score(x, 1) == 3);
    require_boundaries(sb.vcs(x, 1).boundaries, {{Value(Rational(0)), false, false, 2}});

    // clause 3 is satisfied; feasible set (-1, inf)
    REQUIRE(sb.sat(2));
    REQUIRE(sb.start_score(x, 2) == -2);
    require_boundaries(sb.vcs(x, 2).boundaries, {{Value(Rational(-1)), true, true, 3}});

    REQUIRE(sb.unsat_weight() == 1 + 3);
}

TEST_CASE("combined boundaries and interval score map") {
    Scoreboard sb = example_board();
    const VarId x = 0;

    VarScore vs = sb.combine(x);
    REQUIRE(vs.start == 1);
    require_boundaries(vs.merged, {{Value(Rational(-1)), true, true, 3},
                                   {Value(Rational(0)), false, true, 1},
                                   {Value(Rational(0)), false, false, 2},
                                   {Value(Rational(0)), true, false, 1}});

    // Score map: (-inf,-1] -> 1, (-1,0) -> 3, [0,0] -> 1, (0,inf) -> 0.
    std::vector<Segment> segs = sb.segments(x);
    REQUIRE(segs.size() == 4);
    REQUIRE(segs[0].lo.kind == Bound::NegInf);
    REQUIRE(segs[0].hi.is_finite());
    REQUIRE(!segs[0].hi.open);
    REQUIRE(value_eq(*segs[0].hi.value, Value(Rational(-1))));
    REQUIRE(segs[0].score == 1);

    REQUIRE(segs[1].lo.open);
    REQUIRE(segs[1].hi.open);
    REQUIRE(value_eq(*segs[1].lo.value, Value(Rational(-1))));
    REQUIRE(value_eq(*segs[1].hi.value, Value(Rational(0))));
    REQUIRE(segs[1].score == 3);

    REQUIRE(segs[2].one_point);
    REQUIRE(value_eq(*segs[2].lo.value, Value(Rational(0))));
    REQUIRE(segs[2].score == 1);
    REQUIRE(segs[2].cids == std::vector<int>{1, 2, 1});

    REQUIRE(segs[3].hi.kind == Bound::PosInf);
    REQUIRE(segs[3].lo.open);
    REQUIRE(segs[3].score == 0);

    // The best segment is (-1, 0); its simplest value is -1/2.
    REQUIRE(simplest_rational_in(segs[1].lo, segs[1].hi) == make_rational(-1, 2));

    // Point evaluation agrees with the map; the current value scores 0.
    REQUIRE(sb.eval_move_score(x, Value(Rational(1))) == 0);
    REQUIRE(sb.eval_move_score(x, Value(make_rational(-1, 2))) == 3);
    REQUIRE(sb.eval_move_score(x, Value(Rational(0))) == 1);
    REQUIRE(sb.eval_move_score(x, Value(Rational(-1))) == 1);
    REQUIRE(sb.eval_move_score(x, Value(Rational(-7))) == 1);
}

TEST_CASE("incremental update after a move dirties exactly the touched pairs") {
    Scoreboard sb = example_board();
    const VarId x = 0, y = 1, z = 2;

    // Clean every cache first.
    sb.combine(x);
    sb.combine(y);
    sb.combine(z);
    REQUIRE(!sb.vcs_dirty(x, 0));
    REQUIRE(!sb.vcs_dirty(z, 2));

    sb.apply_real_move(y, Value(Rational(-2)));

    // y occurs in clauses 1 and 2 only; z's pair with clause 3 is untouched.
    REQUIRE(sb.vcs_dirty(x, 0));
    REQUIRE(sb.vcs_dirty(x, 1));
    REQUIRE(sb.vcs_dirty(y, 0));
    REQUIRE(!sb.vcs_dirty(x, 2));
    REQUIRE(!sb.vcs_dirty(z, 2));

    // clause 2 (x + y < 1) became satisfied: -1 < 1.
    REQUIRE(sb.sat(1));
    REQUIRE(sb.unsat_weight() == 1);

    // Combined picture for x: x^2 <= -3 is infeasible (flat 0); x < 3 is
    // satisfied with feasible set (-inf, 3); x + z > 0 unchanged.
    VarScore vs = sb.combine(x);
    REQUIRE(vs.start == -2);
    require_boundaries(vs.merged, {{Value(Rational(-1)), true, true, 3},
                                   {Value(Rational(3)), false, false, 2}});
}

TEST_CASE("frozen pair: substitution failure yields flat zero") {
    const VarId x = 0, y = 1, z = 2;
    std::vector<Clause> cls;
    cls.push_back(clause(0, {lit_cmp(var(x) * var(y) + var(z), CmpKind::GE)}));
    Scoreboard sb(std::move(cls), 3, 0, make_rational(1, 10000));
    Assignment a;
    a.reals = {Value(Rational(0)), Value(sqrt_of(2, 1, 2)), Value(sqrt_of(3, 1, 2))};
    sb.reset_assignment(a);

    // The literal is undecidable (two algebraic values in one polynomial)
    // and therefore conservatively counted as false.
    REQUIRE(!sb.sat(0));
    const VarClauseScore& s = sb.vcs(x, 0);
    REQUIRE(s.unavailable);
    REQUIRE(s.boundaries.empty());
    REQUIRE(sb.start_score(x, 0) == 0);
    REQUIRE(sb.eval_move_score(x, Value(Rational(5))) == 0);
}

TEST_CASE("bool flip scores and flips") {
    const VarId x = 0;
    std::vector<Clause> cls;
    cls.push_back(clause(0, {lit_bool(0), lit_cmp(var(x) - cst(1), CmpKind::GE)}));
    cls.push_back(clause(1, {lit_bool(0, true)}));
    cls.push_back(clause(2, {lit_bool(1)}));
    Scoreboard sb(std::move(cls), 1, 2, make_rational(1, 10000));
    // defaults: x = 0, b0 = b1 = true
    REQUIRE(sb.sat(0));
    REQUIRE(!sb.sat(1));
    REQUIRE(sb.sat(2));
    REQUIRE(sb.unsat_weight() == 1);

    REQUIRE(sb.bool_flip_score(0) == 0); // loses clause 0, gains clause 1
    REQUIRE(sb.bool_flip_score(1) == -1);
    sb.set_weight(1, 5);
    REQUIRE(sb.bool_flip_score(0) == 4);

    sb.apply_bool_flip(0);
    REQUIRE(!sb.sat(0));
    REQUIRE(sb.sat(1));
    REQUIRE(sb.unsat_weight() == 1);
    REQUIRE(sb.bool_flip_score(0) == -4);
}

TEST_CASE("weight updates") {
    SECTION("escalation branch raises every unsatisfied clause by one") {
        Scoreboard sb = example_board();
        Rng rng(7);
        sb.paws_update(rng, Rational(0)); // bernoulli(0) is always false
        REQUIRE(sb.weight(0) == 2);
        REQUIRE(sb.weight(1) == 4);
        REQUIRE(sb.weight(2) == 2); // satisfied, untouched
        REQUIRE(sb.unsat_weight() == 6);
    }
    SECTION("smoothing branch lowers satisfied clauses above one") {
        Scoreboard sb = example_board();
        Rng rng(7);
        sb.paws_update(rng, Rational(1)); // bernoulli(1) is always true
        REQUIRE(sb.weight(0) == 1);
        REQUIRE(sb.weight(1) == 3);
        REQUIRE(sb.weight(2) == 1); // satisfied with weight 2 -> 1
    }
    SECTION("weights scale traversal scores without a rebuild") {
        Scoreboard sb = example_board();
        REQUIRE(sb.eval_move_score(0, Value(make_rational(-1, 2))) == 3);
        sb.set_weight(1, 10);
        REQUIRE(sb.eval_move_score(0, Value(make_rational(-1, 2))) == 10);
        sb.set_weight(2, 9);
        REQUIRE(sb.eval_move_score(0, Value(make_rational(-1, 2))) == 10);
        REQUIRE(sb.eval_move_score(0, Value(Rational(-7))) == 10 - 9);
    }
    SECTION("reset_weights restores all weights to one") {
        Scoreboard sb = example_board();
        sb.reset_weights();
        for (int i = 0; i < 3; ++i) REQUIRE(sb.weight(i) == 1);
        REQUIRE(sb.unsat_weight() == 2);
    }
}

TEST_CASE("relaxation widens an equality into a band") {
    const VarId x = 0;
    std::vector<Clause> cls;
    cls.push_back(clause(0, {lit_cmp(var(x) * var(x) - cst(2), CmpKind::EQ)}));
    cls.push_back(clause(1, {lit_cmp(var(x), CmpKind::GE, true)}));
    Scoreboard sb(std::move(cls), 1, 0, make_rational(1, 100));

    REQUIRE(!sb.sat(0));
    REQUIRE(sb.vcs(x, 0).boundaries.size() == 4); // two one-point roots
    REQUIRE(sb.eval_move_score(x, Value(make_rational(707, 500))) == 0);

    sb.set_relaxed(0, 0, true);
    REQUIRE(sb.vcs_dirty(x, 0));
    REQUIRE(sb.vcs(x, 0).boundaries.size() == 4); // two bands now
    // (707/500)^2 - 2 = -151/250000, within the +-1/100 band.
    REQUIRE(sb.eval_move_score(x, Value(make_rational(707, 500))) == 1);
    sb.apply_real_move(x, Value(make_rational(707, 500)));
    REQUIRE(sb.sat(0));

    sb.set_relaxed(0, 0, false);
    REQUIRE(!sb.sat(0));

    REQUIRE_THROWS_AS(sb.set_relaxed(1, 0, true), std::logic_error); // negated literal
}

namespace {

// Independent oracle: make-break score recomputed from scratch by flipping
// the assignment and re-evaluating every clause.
long brute_force_score(const Scoreboard& sb, VarId x, const Value& v) {
    Assignment moved = sb.assignment();
    moved.reals[x] = v;
    long score = 0;
    for (std::size_t i = 0; i < sb.clauses().size(); ++i) {
        bool now = sb.sat(static_cast<int>(i));
        bool after = clause_holds(sb.clauses()[i], moved, sb.eps_p());
        if (after && !now) score += sb.weight(static_cast<int>(i));
        if (!after && now) score -= sb.weight(static_cast<int>(i));
    }
    return score;
}

Polynomial rand_poly(Rng& rng, int nvars) {
    Polynomial p = Polynomial::constant(Rational(static_cast<long>(rng.below(9)) - 4));
    int terms = 1 + static_cast<int>(rng.below(3));
    for (int t = 0; t < terms; ++t) {
        long coeff = static_cast<long>(rng.below(9)) - 4;
        if (coeff == 0) coeff = 1;
        Polynomial mono = Polynomial::constant(Rational(coeff));
        int factors = 1 + static_cast<int>(rng.below(2));
        for (int f = 0; f < factors; ++f)
            mono = mono * Polynomial::variable(static_cast<VarId>(rng.below(nvars)));
        p = p + mono;
    }
    return p;
}

std::vector<Clause> rand_clauses(Rng& rng, int nclauses, int nreals, int nbools) {
    std::vector<Clause> cls;
    for (int i = 0; i < nclauses; ++i) {
        Clause c;
        c.cid = i;
        int nlits = 1 + static_cast<int>(rng.below(3));
        for (int k = 0; k < nlits; ++k) {
            if (nbools > 0 && rng.below(4) == 0) {
                c.literals.push_back(
                    lit_bool(static_cast<BoolVarId>(rng.below(nbools)), rng.below(2) == 0));
            } else {
                CmpKind kind = static_cast<CmpKind>(rng.below(3));
                c.literals.push_back(lit_cmp(rand_poly(rng, nreals), kind, rng.below(2) == 0));
            }
        }
        cls.push_back(std::move(c));
    }
    return cls;
}

Value rand_value(Rng& rng) {
    long num = static_cast<long>(rng.below(21)) - 10;
    long den = 1 + static_cast<long>(rng.below(3));
    return Value(make_rational(num, den));
}

} // namespace

TEST_CASE("randomized oracle: traversal scores, strategies, incremental vs naive") {
    Rng rng(20250817);
    const int nreals = 3, nbools = 2;
    for (int iter = 0; iter < 8; ++iter) {
        std::vector<Clause> cls = rand_clauses(rng, 10, nreals, nbools);
        Rational eps = make_rational(1, 10000);
        Scoreboard inc(cls, nreals, nbools, eps, BoundaryContainer::Strategy::SortedVector);
        Scoreboard ms(cls, nreals, nbools, eps, BoundaryContainer::Strategy::OrderedMultiset);
        Scoreboard nv(cls, nreals, nbools, eps, BoundaryContainer::Strategy::SortedVector,
                      /*naive=*/true);

        for (int step = 0; step < 30; ++step) {
            // random mutation, mirrored on all three boards
            unsigned kind = static_cast<unsigned>(rng.below(4));
            if (kind == 0 && nbools > 0) {
                BoolVarId b = static_cast<BoolVarId>(rng.below(nbools));
                inc.apply_bool_flip(b);
                ms.apply_bool_flip(b);
                nv.apply_bool_flip(b);
            } else if (kind == 1) {
                Rng r1 = rng, r2 = rng, r3 = rng; // identical draws
                Rational sp = make_rational(1, 2);
                inc.paws_update(r1, sp);
                ms.paws_update(r2, sp);
                nv.paws_update(r3, sp);
                rng = r1;
            } else {
                VarId x = static_cast<VarId>(rng.below(nreals));
                Value v = rand_value(rng);
                inc.apply_real_move(x, v);
                ms.apply_real_move(x, v);
                nv.apply_real_move(x, v);
            }

            REQUIRE(inc.unsat_weight() == nv.unsat_weight());
            REQUIRE(inc.unsat_weight() == ms.unsat_weight());

            for (VarId x = 0; x < nreals; ++x) {
                VarScore a = inc.combine(x);
                VarScore b = nv.combine(x);
                VarScore c = ms.combine(x);
                REQUIRE(a.start == b.start);
                REQUIRE(a.start == c.start);
                require_boundaries(a.merged, b.merged);
                require_boundaries(a.merged, c.merged);

                Value probe = rand_value(rng);
                long expected = brute_force_score(inc, x, probe);
                REQUIRE(inc.eval_move_score(x, probe) == expected);
                REQUIRE(nv.eval_move_score(x, probe) == expected);
                REQUIRE(ms.eval_move_score(x, probe) == expected);
            }
            for (BoolVarId b = 0; b < nbools; ++b)
                REQUIRE(inc.bool_flip_score(b) == nv.bool_flip_score(b));
        }
    }
}

TEST_CASE("segment map matches point evaluation on random instances") {
    Rng rng(424242);
    const int nreals = 2;
    for (int iter = 0; iter < 6; ++iter) {
        std::vector<Clause> cls = rand_clauses(rng, 6, nreals, 0);
        Scoreboard sb(cls, nreals, 0, make_rational(1, 10000));
        for (VarId x = 0; x < nreals; ++x) {
            std::vector<Segment> segs = sb.segments(x);
            REQUIRE(!segs.empty());
            REQUIRE(segs.front().lo.kind == Bound::NegInf);
            REQUIRE(segs.back().hi.kind == Bound::PosInf);
            for (const Segment& s : segs) {
                Value probe = s.one_point
                                  ? *s.lo.value
                                  : Value(simplest_rational_in(s.lo, s.hi));
                if (!is_rational(probe)) continue;
                REQUIRE(sb.eval_move_score(x, probe) == s.score);
                REQUIRE(brute_force_score(sb, x, probe) == s.score);
            }
        }
    }
}
