#include <catch2/catch_amalgamated.hpp>

#include "nrals/formula.hpp"
#include "nrals/rng.hpp"

using namespace nrals;

namespace {

Polynomial var(VarId v) { return Polynomial::variable(v); }
Polynomial cst(long n, long d = 1) { return Polynomial::constant(make_rational(n, d)); }

Literal canon(Polynomial p, CmpKind k, bool neg = false) {
    return detail::Smt2Parser::make_canonical_literal(std::move(p), k, neg);
}

Clause mk_clause(std::vector<Literal> lits) {
    Clause c;
    c.literals = std::move(lits);
    return c;
}

Assignment full_assignment(const Instance& inst, std::vector<Value> reals,
                           std::vector<bool> bools = {}) {
    Assignment a;
    a.reals = std::move(reals);
    a.reals.resize(inst.num_reals(), Value(Rational(0)));
    a.bools = std::move(bools);
    a.bools.resize(inst.num_bools(), true);
    return a;
}

} // namespace

TEST_CASE("parsing basic scripts") {
    SECTION("unit circle constraint") {
        Instance inst = parse_smt2("(declare-fun x () Real)(declare-fun y () Real)"
                                   "(assert (<= (+ (* x x) (* y y)) 1))(check-sat)");
        REQUIRE(inst.original.size() == 1);
        REQUIRE(inst.original[0].literals.size() == 1);
        const Literal& l = inst.original[0].literals[0];
        REQUIRE(!l.negated);
        REQUIRE(l.atom.cmp == CmpKind::LE);
        REQUIRE(l.atom.poly == var(0) * var(0) + var(1) * var(1) - cst(1));
    }
    SECTION("strict inequality becomes a negated literal") {
        Instance inst = parse_smt2("(declare-fun x () Real)(declare-fun b () Bool)"
                                   "(assert (or (< x 0) b))");
        REQUIRE(inst.original.size() == 1);
        const auto& lits = inst.original[0].literals;
        REQUIRE(lits.size() == 2);
        REQUIRE(lits[0].negated);
        REQUIRE(lits[0].atom.cmp == CmpKind::GE);
        REQUIRE(lits[0].atom.poly == var(0));
        REQUIRE(lits[1].is_bool());
        REQUIRE(!lits[1].negated);
    }
    SECTION("conjunction splits into unit clauses") {
        Instance inst = parse_smt2("(declare-fun x () Real)"
                                   "(assert (and (>= x 0) (<= x 0)))");
        REQUIRE(inst.original.size() == 2);
        REQUIRE(inst.original[0].literals[0].atom.cmp == CmpKind::GE);
        REQUIRE(inst.original[1].literals[0].atom.cmp == CmpKind::LE);
    }
    SECTION("let bindings, macros, division and decimals") {
        Instance inst = parse_smt2(
            "(declare-fun x () Real)(declare-fun y () Real)"
            "(define-fun half () Real (/ 1 2))"
            "(assert (let ((s (+ x y))) (>= (/ s 2) (- half 0.25))))");
        REQUIRE(inst.original.size() == 1);
        const Literal& l = inst.original[0].literals[0];
        // s/2 >= 1/4  ->  (x + y)/2 - 1/4 >= 0, scaled to 2x + 2y - 1 >= 0
        REQUIRE(l.atom.cmp == CmpKind::GE);
        REQUIRE(l.atom.poly == cst(-1) + var(0) * cst(2) + var(1) * cst(2));
    }
    SECTION("implication and chained comparison") {
        Instance inst = parse_smt2("(declare-fun x () Real)(declare-fun b () Bool)"
                                   "(assert (=> b (< 0 x 1)))");
        // b => (0 < x and x < 1): two clauses {!b, x>0}, {!b, x<1}
        REQUIRE(inst.original.size() == 2);
        for (const auto& c : inst.original) {
            REQUIRE(c.literals.size() == 2);
            REQUIRE(c.literals[0].is_bool());
            REQUIRE(c.literals[0].negated);
        }
    }
    SECTION("constant atoms fold away") {
        Instance inst = parse_smt2("(declare-fun x () Real)"
                                   "(assert (or (>= 1 0) (< x 0)))"
                                   "(assert (or (< 1 0) (>= x 3)))");
        REQUIRE(inst.original.size() == 1); // first assert is trivially true
        REQUIRE(inst.original[0].literals.size() == 1);
    }
    SECTION("ite over Real with constant branches") {
        Instance inst = parse_smt2("(declare-fun x () Real)(declare-fun b () Bool)"
                                   "(assert (>= x (ite b 1 2)))");
        // (b -> x>=1) and (!b -> x>=2)
        REQUIRE(inst.original.size() == 2);
        Assignment a = full_assignment(inst, {Value(make_rational(3, 2))}, {true});
        REQUIRE(verify_model(inst.original, a));
        a.bools[0] = false;
        REQUIRE(!verify_model(inst.original, a));
    }
    SECTION("parse errors name the construct") {
        REQUIRE_THROWS_AS(parse_smt2("(declare-fun f (Real) Real)"), ParseError);
        REQUIRE_THROWS_AS(parse_smt2("(declare-fun x () Real)(assert (distinct x 0))"),
                          ParseError);
        REQUIRE_THROWS_AS(
            parse_smt2("(declare-fun x () Real)(declare-fun y () Real)(assert (>= (/ x y) 1))"),
            ParseError);
        REQUIRE_THROWS_AS(parse_smt2("(assert (>= z 0))"), ParseError);
        REQUIRE_THROWS_AS(parse_smt2("(declare-fun x () Int)(assert (>= x 0))"), ParseError);
        REQUIRE_THROWS_AS(
            parse_smt2("(declare-fun x () Real)(declare-fun b () Bool)"
                       "(assert (>= (ite b x 2) 0))"),
            ParseError);
    }
}

TEST_CASE("cnf equivalence with the ast") {
    // No definitional variables needed here: direct equality on all points.
    Instance inst = parse_smt2(
        "(declare-fun x () Real)(declare-fun b () Bool)(declare-fun c () Bool)"
        "(assert (or (and b (> x 1)) (and (not b) c (<= x 0))))");
    for (int bi = 0; bi < 2; ++bi)
        for (int ci = 0; ci < 2; ++ci)
            for (long xv = -2; xv <= 2; ++xv) {
                Assignment a = full_assignment(inst, {Value(Rational(xv))},
                                               {bi == 1, ci == 1});
                REQUIRE(verify_model(inst.original, a) == ast_eval(inst.ast, a));
            }
}

TEST_CASE("cnf blowup introduces definitional booleans both ways") {
    Instance inst = parse_smt2(
        "(declare-fun a () Bool)(declare-fun b () Bool)(declare-fun c () Bool)"
        "(declare-fun d () Bool)(declare-fun e () Bool)(declare-fun f () Bool)"
        "(assert (or (and a b c) (and d e f)))");
    REQUIRE(inst.num_bools() > 6); // fresh definitional variables added
    std::size_t nb = inst.num_bools();
    // For every assignment to the original booleans, the CNF is satisfiable
    // by some extension iff the AST is true.
    for (unsigned mask = 0; mask < 64; ++mask) {
        std::vector<bool> orig(6);
        for (int i = 0; i < 6; ++i) orig[i] = (mask >> i) & 1;
        Assignment probe;
        probe.reals = {};
        probe.bools = orig;
        probe.bools.resize(nb, false);
        bool ast_true = ast_eval(inst.ast, probe);
        bool cnf_sat = false;
        unsigned extra = static_cast<unsigned>(nb - 6);
        for (unsigned em = 0; em < (1u << extra) && !cnf_sat; ++em) {
            Assignment a;
            a.bools = orig;
            for (unsigned i = 0; i < extra; ++i) a.bools.push_back((em >> i) & 1);
            cnf_sat = verify_model(inst.original, a);
        }
        REQUIRE(cnf_sat == ast_true);
    }
}

TEST_CASE("preprocessing merges, propagates and eliminates") {
    SECTION("unit >= and <= merge into an equality") {
        Instance inst;
        inst.real_names = {"w", "x", "y", "z"};
        Polynomial p = var(0) + var(1) + var(2) + var(3); // 4 vars blocks elimination
        inst.original.push_back(mk_clause({canon(p, CmpKind::GE)}));
        inst.original.push_back(mk_clause({canon(p, CmpKind::LE)}));
        preprocess(inst);
        REQUIRE(!inst.contradiction);
        REQUIRE(inst.clauses.size() == 1);
        REQUIRE(inst.clauses[0].literals[0].atom.cmp == CmpKind::EQ);
        REQUIRE(inst.clauses[0].literals[0].atom.poly == p);
    }
    SECTION("linear unit equation eliminates its variable") {
        Instance inst;
        inst.real_names = {"x", "y", "z"};
        // 2x + y + 3 = 0 and x^2 + z > 0
        inst.original.push_back(
            mk_clause({canon(var(0) * cst(2) + var(1) + cst(3), CmpKind::EQ)}));
        inst.original.push_back(
            mk_clause({canon(var(0) * var(0) + var(2), CmpKind::LE, true)}));
        preprocess(inst);
        REQUIRE(inst.clauses.size() == 1);
        REQUIRE(inst.elim_script.size() == 1);
        REQUIRE(inst.elim_script[0].first == 0);
        // x := (-y - 3)/2, so the clause becomes ((y+3)/2)^2 + z > 0,
        // canonically y^2 + 6y + 4z + 9 > 0 i.e. !(... <= 0).
        const Literal& l = inst.clauses[0].literals[0];
        REQUIRE(l.negated);
        REQUIRE(l.atom.cmp == CmpKind::LE);
        REQUIRE(l.atom.poly ==
                var(1) * var(1) + var(1) * cst(6) + var(2) * cst(4) + cst(9));
        // Back-substitution restores a consistent model.
        Assignment a;
        a.reals = {Value(Rational(0)), Value(Rational(1)), Value(Rational(5))};
        extend_model(inst, a);
        REQUIRE(as_rational(a.reals[0]) == -2);
        REQUIRE(verify_model(inst.original, a));
    }
    SECTION("boolean unit propagation") {
        Instance inst;
        inst.real_names = {"x"};
        inst.bool_names = {"b"};
        Literal bpos;
        bpos.atom = Atom::boolean(0);
        Literal bneg = bpos;
        bneg.negated = true;
        inst.original.push_back(mk_clause({bpos}));
        inst.original.push_back(mk_clause({bneg, canon(var(0), CmpKind::GE)}));
        preprocess(inst);
        REQUIRE(inst.clauses.size() == 1);
        REQUIRE(!inst.clauses[0].literals[0].is_bool());
        REQUIRE(inst.fixed_bools == std::vector<std::pair<BoolVarId, bool>>{{0, true}});
    }
    SECTION("contradictions are reported") {
        Instance inst = parse_smt2("(declare-fun b () Bool)(assert b)(assert (not b))");
        preprocess(inst);
        REQUIRE(inst.contradiction);
        Instance inst2 = parse_smt2("(declare-fun x () Real)(assert (= x 1))"
                                    "(assert (= x 2))");
        preprocess(inst2);
        REQUIRE(inst2.contradiction);
    }
}

TEST_CASE("verify_model pinned examples") {
    SECTION("violated circle clause") {
        Instance inst = parse_smt2(
            "(declare-fun x () Real)(declare-fun y () Real)(declare-fun z () Real)"
            "(assert (<= (+ (* x x) (* y y)) 1))(assert (< (+ x y) 1))"
            "(assert (> (+ x z) 0))");
        Assignment a = full_assignment(
            inst, {Value(make_rational(-1, 2)), Value(Rational(-2)), Value(Rational(1))});
        REQUIRE(!verify_model(inst.original, a)); // 1/4 + 4 > 1
    }
    SECTION("circle with rational point") {
        Instance inst = parse_smt2(
            "(declare-fun x () Real)(declare-fun y () Real)"
            "(assert (= (+ (* x x) (* y y)) 25))(assert (> x 2))(assert (< x 4))");
        Assignment a = full_assignment(inst, {Value(Rational(3)), Value(Rational(4))});
        REQUIRE(verify_model(inst.original, a));
        a.reals[1] = Value(Rational(5));
        REQUIRE(!verify_model(inst.original, a));
    }
    SECTION("empty clause set verifies") {
        Assignment a;
        REQUIRE(verify_model({}, a));
    }
}

namespace {

// Random CNF instance over up to 3 reals and 1 bool with small linear /
// quadratic polynomials.
Instance random_instance(Rng& rng) {
    Instance inst;
    inst.real_names = {"x", "y", "z"};
    inst.bool_names = {"b"};
    int nclauses = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < nclauses; ++i) {
        std::vector<Literal> lits;
        int nlits = 1 + static_cast<int>(rng.below(3));
        for (int j = 0; j < nlits; ++j) {
            if (rng.below(4) == 0) {
                Literal l;
                l.atom = Atom::boolean(0);
                l.negated = rng.below(2) == 1;
                lits.push_back(l);
                continue;
            }
            Polynomial p;
            int nterms = 1 + static_cast<int>(rng.below(3));
            for (int t = 0; t < nterms; ++t) {
                long c = static_cast<long>(rng.below(9)) - 4;
                if (c == 0) c = 1;
                VarId v = static_cast<VarId>(rng.below(3));
                if (rng.below(4) == 0)
                    p = p + var(v) * var(v) * cst(c);
                else
                    p = p + var(v) * cst(c);
            }
            p = p + cst(static_cast<long>(rng.below(7)) - 3);
            CmpKind k = static_cast<CmpKind>(rng.below(3));
            lits.push_back(canon(std::move(p), k, rng.below(3) == 0));
        }
        Clause c = mk_clause(std::move(lits));
        c.cid = i;
        inst.original.push_back(std::move(c));
    }
    return inst;
}

const std::vector<Rational> kGrid = {Rational(-2), Rational(-1), Rational(0),
                                     make_rational(1, 2), Rational(1), Rational(2)};

template <class Fn>
void for_each_grid_assignment(const Instance& inst, Fn&& fn) {
    std::size_t n = kGrid.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (int b = 0; b < 2; ++b) {
                    Assignment a;
                    a.reals = {Value(kGrid[i]), Value(kGrid[j]), Value(kGrid[k])};
                    a.bools = {b == 1};
                    fn(a);
                }
}

} // namespace

TEST_CASE("preprocessing preserves satisfiability on random instances") {
    Rng rng(90210);
    for (int iter = 0; iter < 40; ++iter) {
        Instance inst = random_instance(rng);
        Instance pre = inst;
        preprocess(pre);

        bool sat_orig = false;
        for_each_grid_assignment(inst, [&](const Assignment& a) {
            if (!sat_orig && verify_model(inst.original, a)) sat_orig = true;
        });

        if (pre.contradiction) {
            REQUIRE(!sat_orig);
            continue;
        }
        bool sat_pre = false;
        for_each_grid_assignment(inst, [&](Assignment a) {
            if (sat_pre) return;
            extend_model(pre, a);
            if (verify_model(inst.original, a)) sat_pre = true;
        });
        // Any model of the original survives preprocessing (the converse
        // need not hold on a grid: eliminated variables may land between
        // grid points). sat_pre results are verified against the original
        // clause set inside the loop, so soundness is implicit.
        if (sat_orig) REQUIRE(sat_pre);
    }
}

TEST_CASE("model printing") {
    Instance inst;
    inst.real_names = {"x", "y", "z"};
    inst.bool_names = {"b", "$def0"};
    Assignment a;
    a.reals = {Value(Rational(3)), Value(make_rational(-1, 2)),
               Value(AlgebraicNumber(QPoly({Rational(-2), Rational(0), Rational(1)}),
                                     Rational(1), Rational(2)))};
    a.bools = {true, false};
    std::string m = print_model(inst, a);
    REQUIRE(m.find("(define-fun x () Real 3.0)") != std::string::npos);
    REQUIRE(m.find("(define-fun y () Real (- (/ 1.0 2.0)))") != std::string::npos);
    REQUIRE(m.find("root-obj") != std::string::npos);
    REQUIRE(m.find(" 2)") != std::string::npos); // sqrt(2) is the 2nd root of x^2-2
    REQUIRE(m.find("~ 1.414214") != std::string::npos);
    REQUIRE(m.find("(define-fun b () Bool true)") != std::string::npos);
    REQUIRE(m.find("$def0") == std::string::npos); // internal names are hidden
}
