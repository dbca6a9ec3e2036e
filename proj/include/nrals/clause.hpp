#pragma once

#include <string>
#include <vector>

#include "nrals/polynomial.hpp"

namespace nrals {

using BoolVarId = int;

enum class CmpKind { GE, LE, EQ };

// Atom: boolean variable or polynomial comparison in "p <kind> 0" form.
struct Atom {
    enum Kind { Bool, Cmp } tag = Cmp;
    BoolVarId bool_var = -1; // tag == Bool
    Polynomial poly;         // tag == Cmp
    CmpKind cmp = CmpKind::GE;

    static Atom boolean(BoolVarId b) {
        Atom a;
        a.tag = Bool;
        a.bool_var = b;
        return a;
    }
    static Atom compare(Polynomial p, CmpKind k) {
        Atom a;
        a.tag = Cmp;
        a.poly = std::move(p);
        a.cmp = k;
        return a;
    }
    bool is_bool() const { return tag == Bool; }
};

// Strict inequalities are encoded as negations: p>0 is !(p<=0), p<0 is
// !(p>=0), p!=0 is !(p=0). `relaxed` tracks the temporary widening of
// non-strict atoms; it may be set only on non-negated Cmp literals.
struct Literal {
    Atom atom;
    bool negated = false;
    bool relaxed = false;

    bool is_bool() const { return atom.is_bool(); }
};

struct Clause {
    int cid = -1;
    std::vector<Literal> literals;
};

// Complete assignment: every declared variable has a value.
struct Assignment {
    RealAssignment reals;    // indexed by VarId
    std::vector<bool> bools; // indexed by BoolVarId
};

} // namespace nrals
