#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nrals/clause.hpp"
#include "nrals/polynomial.hpp"
#include "nrals/roots.hpp"

namespace nrals {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool atom_eq(const Atom& a, const Atom& b) {
    if (a.tag != b.tag) return false;
    if (a.tag == Atom::Bool) return a.bool_var == b.bool_var;
    return a.cmp == b.cmp && a.poly == b.poly;
}

inline bool literal_eq(const Literal& a, const Literal& b) {
    return a.negated == b.negated && atom_eq(a.atom, b.atom);
}

// ---------------------------------------------------------------------
// Formula AST (the pre-CNF shape of the asserted constraints).

struct Node;
using NodeP = std::shared_ptr<const Node>;

struct Node {
    enum Kind { True_, False_, Lit_, And_, Or_, Not_ } kind = True_;
    Literal lit;              // Lit_
    std::vector<NodeP> kids;  // And_/Or_/Not_
};

inline NodeP mk_const(bool b) {
    auto n = std::make_shared<Node>();
    n->kind = b ? Node::True_ : Node::False_;
    return n;
}
inline NodeP mk_lit(Literal l) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Lit_;
    n->lit = std::move(l);
    return n;
}
inline NodeP mk_nary(Node::Kind k, std::vector<NodeP> kids) {
    if (k == Node::And_) {
        std::vector<NodeP> keep;
        for (auto& c : kids) {
            if (c->kind == Node::False_) return mk_const(false);
            if (c->kind != Node::True_) keep.push_back(std::move(c));
        }
        if (keep.empty()) return mk_const(true);
        if (keep.size() == 1) return keep[0];
        auto n = std::make_shared<Node>();
        n->kind = Node::And_;
        n->kids = std::move(keep);
        return n;
    }
    if (k == Node::Or_) {
        std::vector<NodeP> keep;
        for (auto& c : kids) {
            if (c->kind == Node::True_) return mk_const(true);
            if (c->kind != Node::False_) keep.push_back(std::move(c));
        }
        if (keep.empty()) return mk_const(false);
        if (keep.size() == 1) return keep[0];
        auto n = std::make_shared<Node>();
        n->kind = Node::Or_;
        n->kids = std::move(keep);
        return n;
    }
    throw std::logic_error("mk_nary");
}
inline NodeP mk_not(NodeP c) {
    if (c->kind == Node::True_) return mk_const(false);
    if (c->kind == Node::False_) return mk_const(true);
    if (c->kind == Node::Not_) return c->kids[0];
    if (c->kind == Node::Lit_) {
        Literal l = c->lit;
        l.negated = !l.negated;
        return mk_lit(std::move(l));
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Not_;
    n->kids = {std::move(c)};
    return n;
}

// Truth of the AST under a complete assignment (original, unrelaxed atoms).
inline bool ast_eval(const NodeP& n, const Assignment& asg) {
    switch (n->kind) {
    case Node::True_: return true;
    case Node::False_: return false;
    case Node::Lit_: return literal_holds(n->lit, asg, Rational(0));
    case Node::Not_: return !ast_eval(n->kids[0], asg);
    case Node::And_:
        for (const auto& k : n->kids)
            if (!ast_eval(k, asg)) return false;
        return true;
    case Node::Or_:
        for (const auto& k : n->kids)
            if (ast_eval(k, asg)) return true;
        return false;
    }
    return false;
}

// ---------------------------------------------------------------------
// Parsed instance.

struct Instance {
    std::vector<std::string> real_names;
    std::vector<std::string> bool_names;
    NodeP ast = mk_const(true);     // conjunction of all asserts
    std::vector<Clause> original;   // CNF before preprocessing
    std::vector<Clause> clauses;    // after preprocessing
    // Eliminated real variables, in elimination order: x := poly (over
    // variables still live at that point).
    std::vector<std::pair<VarId, Polynomial>> elim_script;
    std::vector<std::pair<BoolVarId, bool>> fixed_bools;
    bool contradiction = false;
    std::string contradiction_reason;

    std::size_t num_reals() const { return real_names.size(); }
    std::size_t num_bools() const { return bool_names.size(); }
};

// ---------------------------------------------------------------------
// Tokenizer / s-expressions.

namespace smt2 {

struct Sexpr {
    bool is_atom = true;
    std::string tok;
    std::vector<Sexpr> list;
};

inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> toks;
    std::size_t i = 0, n = text.size();
    while (i < n) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == ';') {
            while (i < n && text[i] != '\n') ++i;
        } else if (c == '(' || c == ')') {
            toks.emplace_back(1, c);
            ++i;
        } else if (c == '|') {
            std::size_t j = text.find('|', i + 1);
            if (j == std::string::npos) throw ParseError("unterminated quoted symbol");
            toks.push_back(text.substr(i + 1, j - i - 1));
            i = j + 1;
        } else if (c == '"') {
            std::size_t j = i + 1;
            while (j < n && text[j] != '"') ++j;
            if (j >= n) throw ParseError("unterminated string literal");
            toks.push_back(text.substr(i, j - i + 1));
            i = j + 1;
        } else {
            std::size_t j = i;
            while (j < n && !std::isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '(' && text[j] != ')' && text[j] != ';')
                ++j;
            toks.push_back(text.substr(i, j - i));
            i = j;
        }
    }
    return toks;
}

inline Sexpr parse_sexpr(const std::vector<std::string>& toks, std::size_t& pos) {
    if (pos >= toks.size()) throw ParseError("unexpected end of input");
    if (toks[pos] == "(") {
        Sexpr s;
        s.is_atom = false;
        ++pos;
        while (pos < toks.size() && toks[pos] != ")") s.list.push_back(parse_sexpr(toks, pos));
        if (pos >= toks.size()) throw ParseError("missing closing parenthesis");
        ++pos;
        return s;
    }
    if (toks[pos] == ")") throw ParseError("unexpected ')'");
    Sexpr s;
    s.tok = toks[pos++];
    return s;
}

// A real-sorted term: disjoint guarded cases (guards arise from ite).
struct CondBranch {
    std::vector<NodeP> guards; // conjunction of conditions for this case
    Polynomial poly;
};
using CondPoly = std::vector<CondBranch>;

inline CondPoly cp_const(const Rational& r) { return {{{}, Polynomial::constant(r)}}; }

using Parsed = std::variant<NodeP, CondPoly>;

inline bool is_bool_term(const Parsed& p) { return std::holds_alternative<NodeP>(p); }

template <class F>
CondPoly cp_combine(const CondPoly& a, const CondPoly& b, F&& f) {
    CondPoly out;
    for (const auto& ba : a)
        for (const auto& bb : b) {
            CondBranch br;
            br.guards = ba.guards;
            br.guards.insert(br.guards.end(), bb.guards.begin(), bb.guards.end());
            br.poly = f(ba.poly, bb.poly);
            out.push_back(std::move(br));
        }
    return out;
}

inline bool looks_numeric(const std::string& s) {
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])) && s[i] != '.' && s[i] != '/')
            return false;
    return true;
}

} // namespace smt2

// ---------------------------------------------------------------------
// Parser proper.

namespace detail {

class Smt2Parser {
public:
    explicit Smt2Parser(const std::string& text) : text_(text) {}

    Instance run() {
        auto toks = smt2::tokenize(text_);
        std::size_t pos = 0;
        std::vector<NodeP> asserts;
        while (pos < toks.size()) {
            smt2::Sexpr cmd = smt2::parse_sexpr(toks, pos);
            if (cmd.is_atom || cmd.list.empty() || !cmd.list[0].is_atom)
                throw ParseError("malformed command");
            const std::string& head = cmd.list[0].tok;
            if (head == "set-logic" || head == "set-info" || head == "set-option" ||
                head == "check-sat" || head == "exit" || head == "get-model" ||
                head == "echo") {
                continue;
            }
            if (head == "declare-fun") {
                if (cmd.list.size() != 4 || !cmd.list[1].is_atom || cmd.list[2].is_atom ||
                    !cmd.list[2].list.empty())
                    throw ParseError("unsupported construct: non-constant declare-fun");
                declare(cmd.list[1].tok, sort_of(cmd.list[3]));
            } else if (head == "declare-const") {
                if (cmd.list.size() != 3 || !cmd.list[1].is_atom)
                    throw ParseError("malformed declare-const");
                declare(cmd.list[1].tok, sort_of(cmd.list[2]));
            } else if (head == "define-fun") {
                if (cmd.list.size() != 5 || !cmd.list[1].is_atom || cmd.list[2].is_atom ||
                    !cmd.list[2].list.empty())
                    throw ParseError("unsupported construct: define-fun with parameters");
                Env env;
                macros_[cmd.list[1].tok] = parse_term(cmd.list[4], env);
            } else if (head == "assert") {
                if (cmd.list.size() != 2) throw ParseError("malformed assert");
                Env env;
                asserts.push_back(as_formula(parse_term(cmd.list[1], env)));
            } else {
                throw ParseError("unsupported command: " + head);
            }
        }
        inst_.ast = mk_nary(Node::And_, std::move(asserts));
        build_cnf();
        return std::move(inst_);
    }

private:
    using Env = std::map<std::string, smt2::Parsed>;

    enum class Sort { Real, Bool };

    Sort sort_of(const smt2::Sexpr& s) {
        if (s.is_atom && s.tok == "Real") return Sort::Real;
        if (s.is_atom && s.tok == "Bool") return Sort::Bool;
        if (s.is_atom && s.tok == "Int")
            throw ParseError("unsupported sort: Int");
        throw ParseError("unsupported sort: " + (s.is_atom ? s.tok : std::string("(...)")));
    }

    void declare(const std::string& name, Sort sort) {
        if (reals_.count(name) || bools_.count(name) || macros_.count(name))
            throw ParseError("redeclaration of " + name);
        if (sort == Sort::Real) {
            reals_[name] = static_cast<VarId>(inst_.real_names.size());
            inst_.real_names.push_back(name);
        } else {
            bools_[name] = static_cast<BoolVarId>(inst_.bool_names.size());
            inst_.bool_names.push_back(name);
        }
    }

    static NodeP as_formula(const smt2::Parsed& p) {
        if (!smt2::is_bool_term(p)) throw ParseError("expected Bool term, found Real term");
        return std::get<NodeP>(p);
    }
    static smt2::CondPoly as_real(const smt2::Parsed& p) {
        if (smt2::is_bool_term(p)) throw ParseError("expected Real term, found Bool term");
        return std::get<smt2::CondPoly>(p);
    }

    smt2::Parsed parse_term(const smt2::Sexpr& s, Env& env) {
        if (s.is_atom) return parse_symbol(s.tok, env);
        if (s.list.empty()) throw ParseError("empty application");
        if (!s.list[0].is_atom) throw ParseError("unsupported construct: higher-order term");
        const std::string& op = s.list[0].tok;
        if (op == "let") return parse_let(s, env);
        if (op == "and" || op == "or") {
            std::vector<NodeP> kids;
            for (std::size_t i = 1; i < s.list.size(); ++i)
                kids.push_back(as_formula(parse_term(s.list[i], env)));
            return mk_nary(op == "and" ? Node::And_ : Node::Or_, std::move(kids));
        }
        if (op == "not") {
            if (s.list.size() != 2) throw ParseError("not expects one argument");
            return mk_not(as_formula(parse_term(s.list[1], env)));
        }
        if (op == "=>") {
            if (s.list.size() < 3) throw ParseError("=> expects two or more arguments");
            // Right-associative implication chain.
            NodeP acc = as_formula(parse_term(s.list.back(), env));
            for (std::size_t i = s.list.size() - 1; i-- > 1;) {
                NodeP lhs = as_formula(parse_term(s.list[i], env));
                acc = mk_nary(Node::Or_, {mk_not(lhs), acc});
            }
            return acc;
        }
        if (op == "ite") return parse_ite(s, env);
        if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "=")
            return parse_relation(s, env);
        if (op == "+" || op == "-" || op == "*" || op == "/")
            return parse_arith(s, env);
        if (op == "distinct" || op == "div" || op == "mod" || op == "abs" ||
            op == "to_real" || op == "to_int" || op == "forall" || op == "exists" ||
            op == "xor")
            throw ParseError("unsupported construct: " + op);
        throw ParseError("unknown symbol in application: " + op);
    }

    smt2::Parsed parse_symbol(const std::string& tok, Env& env) {
        auto it = env.find(tok);
        if (it != env.end()) return it->second;
        auto mi = macros_.find(tok);
        if (mi != macros_.end()) return mi->second;
        if (tok == "true") return smt2::Parsed(mk_const(true));
        if (tok == "false") return smt2::Parsed(mk_const(false));
        auto ri = reals_.find(tok);
        if (ri != reals_.end())
            return smt2::Parsed(smt2::CondPoly{{{}, Polynomial::variable(ri->second)}});
        auto bi = bools_.find(tok);
        if (bi != bools_.end()) {
            Literal l;
            l.atom = Atom::boolean(bi->second);
            return smt2::Parsed(mk_lit(std::move(l)));
        }
        if (smt2::looks_numeric(tok)) return smt2::Parsed(smt2::cp_const(parse_rational(tok)));
        throw ParseError("unknown symbol: " + tok);
    }

    smt2::Parsed parse_let(const smt2::Sexpr& s, Env& env) {
        if (s.list.size() != 3 || s.list[1].is_atom) throw ParseError("malformed let");
        Env inner = env; // parallel bindings: evaluate in the outer env
        for (const auto& bind : s.list[1].list) {
            if (bind.is_atom || bind.list.size() != 2 || !bind.list[0].is_atom)
                throw ParseError("malformed let binding");
            inner[bind.list[0].tok] = parse_term(bind.list[1], env);
        }
        return parse_term(s.list[2], inner);
    }

    smt2::Parsed parse_ite(const smt2::Sexpr& s, Env& env) {
        if (s.list.size() != 4) throw ParseError("ite expects three arguments");
        NodeP cond = as_formula(parse_term(s.list[1], env));
        smt2::Parsed t = parse_term(s.list[2], env);
        smt2::Parsed e = parse_term(s.list[3], env);
        if (smt2::is_bool_term(t) != smt2::is_bool_term(e))
            throw ParseError("ite branches have different sorts");
        if (smt2::is_bool_term(t)) {
            NodeP a = std::get<NodeP>(t), b = std::get<NodeP>(e);
            return smt2::Parsed(mk_nary(Node::And_, {mk_nary(Node::Or_, {mk_not(cond), a}),
                                                     mk_nary(Node::Or_, {cond, b})}));
        }
        smt2::CondPoly ct = as_real(t), ce = as_real(e);
        for (const auto& br : ct)
            if (!br.poly.is_constant())
                throw ParseError("unsupported construct: ite over Real with non-constant branch");
        for (const auto& br : ce)
            if (!br.poly.is_constant())
                throw ParseError("unsupported construct: ite over Real with non-constant branch");
        smt2::CondPoly out;
        for (auto& br : ct) {
            br.guards.insert(br.guards.begin(), cond);
            out.push_back(std::move(br));
        }
        NodeP ncond = mk_not(cond);
        for (auto& br : ce) {
            br.guards.insert(br.guards.begin(), ncond);
            out.push_back(std::move(br));
        }
        return smt2::Parsed(std::move(out));
    }

    smt2::Parsed parse_arith(const smt2::Sexpr& s, Env& env) {
        const std::string& op = s.list[0].tok;
        std::vector<smt2::CondPoly> args;
        for (std::size_t i = 1; i < s.list.size(); ++i)
            args.push_back(as_real(parse_term(s.list[i], env)));
        if (args.empty()) throw ParseError(op + " expects arguments");
        if (op == "-" && args.size() == 1) {
            smt2::CondPoly r = args[0];
            for (auto& br : r) br.poly = -br.poly;
            return smt2::Parsed(std::move(r));
        }
        smt2::CondPoly acc = args[0];
        for (std::size_t i = 1; i < args.size(); ++i) {
            if (op == "+")
                acc = smt2::cp_combine(acc, args[i],
                                       [](const Polynomial& a, const Polynomial& b) { return a + b; });
            else if (op == "-")
                acc = smt2::cp_combine(acc, args[i],
                                       [](const Polynomial& a, const Polynomial& b) { return a - b; });
            else if (op == "*")
                acc = smt2::cp_combine(acc, args[i],
                                       [](const Polynomial& a, const Polynomial& b) { return a * b; });
            else { // division folds constant divisors into coefficients
                for (const auto& br : args[i]) {
                    if (!br.poly.is_constant())
                        throw ParseError("unsupported construct: division by non-constant");
                    if (br.poly.constant_value() == 0)
                        throw ParseError("division by zero constant");
                }
                acc = smt2::cp_combine(acc, args[i], [](const Polynomial& a, const Polynomial& b) {
                    return a * (Rational(1) / b.constant_value());
                });
            }
        }
        return smt2::Parsed(std::move(acc));
    }

    smt2::Parsed parse_relation(const smt2::Sexpr& s, Env& env) {
        const std::string& op = s.list[0].tok;
        if (s.list.size() < 3) throw ParseError(op + " expects two or more arguments");
        std::vector<smt2::Parsed> args;
        for (std::size_t i = 1; i < s.list.size(); ++i) args.push_back(parse_term(s.list[i], env));
        if (op == "=" && smt2::is_bool_term(args[0])) {
            // boolean equivalence chain
            std::vector<NodeP> conj;
            for (std::size_t i = 0; i + 1 < args.size(); ++i) {
                NodeP a = as_formula(args[i]), b = as_formula(args[i + 1]);
                conj.push_back(mk_nary(Node::Or_, {mk_not(a), b}));
                conj.push_back(mk_nary(Node::Or_, {mk_not(b), a}));
            }
            return smt2::Parsed(mk_nary(Node::And_, std::move(conj)));
        }
        std::vector<NodeP> conj;
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            conj.push_back(relation_node(op, as_real(args[i]), as_real(args[i + 1])));
        return smt2::Parsed(mk_nary(Node::And_, std::move(conj)));
    }

    NodeP relation_node(const std::string& op, const smt2::CondPoly& a,
                        const smt2::CondPoly& b) {
        std::vector<NodeP> conj;
        for (const auto& ba : a)
            for (const auto& bb : b) {
                NodeP atom = atom_node(ba.poly - bb.poly, op);
                std::vector<NodeP> disj;
                for (const auto& g : ba.guards) disj.push_back(mk_not(g));
                for (const auto& g : bb.guards) disj.push_back(mk_not(g));
                disj.push_back(std::move(atom));
                conj.push_back(mk_nary(Node::Or_, std::move(disj)));
            }
        return mk_nary(Node::And_, std::move(conj));
    }

    NodeP atom_node(Polynomial p, const std::string& op) {
        CmpKind kind;
        bool negated;
        if (op == "<=") { kind = CmpKind::LE; negated = false; }
        else if (op == ">=") { kind = CmpKind::GE; negated = false; }
        else if (op == "=") { kind = CmpKind::EQ; negated = false; }
        else if (op == "<") { kind = CmpKind::GE; negated = true; }  // p < 0 == !(p >= 0)
        else if (op == ">") { kind = CmpKind::LE; negated = true; }  // p > 0 == !(p <= 0)
        else throw ParseError("unknown relation: " + op);
        Literal l = make_canonical_literal(std::move(p), kind, negated);
        if (l.atom.poly.is_constant()) {
            // constant atom folds to a truth value
            int sg = sign(l.atom.poly.constant_value());
            bool truth;
            switch (l.atom.cmp) {
            case CmpKind::GE: truth = sg >= 0; break;
            case CmpKind::LE: truth = sg <= 0; break;
            default: truth = sg == 0; break;
            }
            return mk_const(truth != l.negated);
        }
        return mk_lit(std::move(l));
    }

public:
    // Scale to integer primitive coefficients; orient so the first term's
    // coefficient is positive, flipping GE/LE when the sign flips. Keeps
    // the >=/<= pair over one polynomial recognizable for preprocessing.
    static Literal make_canonical_literal(Polynomial p, CmpKind kind, bool negated) {
        if (!p.is_constant()) {
            Integer den_lcm(1), num_gcd(0);
            for (const auto& [m, c] : p.terms()) {
                mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
            }
            for (const auto& [m, c] : p.terms()) {
                Integer scaled = c.get_num() * (den_lcm / c.get_den());
                mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_mpz_t());
            }
            Rational factor = make_rational(den_lcm, num_gcd);
            if (sign(p.terms().rbegin()->second) < 0) {
                factor = -factor;
                if (kind == CmpKind::GE) kind = CmpKind::LE;
                else if (kind == CmpKind::LE) kind = CmpKind::GE;
            }
            p = p * factor;
        }
        Literal l;
        l.atom = Atom::compare(std::move(p), kind);
        l.negated = negated;
        return l;
    }

private:
    // ---- CNF conversion -------------------------------------------------
    void build_cnf() {
        auto cls = to_cnf(inst_.ast);
        int cid = 0;
        for (auto& lits : cls) {
            Clause c;
            c.cid = cid++;
            c.literals = std::move(lits);
            inst_.original.push_back(std::move(c));
        }
    }

    BoolVarId fresh_bool() {
        std::string name;
        do {
            name = "$def" + std::to_string(fresh_counter_++);
        } while (bools_.count(name) || reals_.count(name));
        bools_[name] = static_cast<BoolVarId>(inst_.bool_names.size());
        inst_.bool_names.push_back(name);
        return bools_[name];
    }

    static constexpr std::size_t kBlowupFactor = 8;

    std::vector<std::vector<Literal>> to_cnf(const NodeP& n) {
        switch (n->kind) {
        case Node::True_: return {};
        case Node::False_: return {{}};
        case Node::Lit_: return {{n->lit}};
        case Node::Not_: return to_cnf(push_not(n->kids[0]));
        case Node::And_: {
            std::vector<std::vector<Literal>> out;
            for (const auto& k : n->kids) {
                auto sub = to_cnf(k);
                out.insert(out.end(), std::make_move_iterator(sub.begin()),
                           std::make_move_iterator(sub.end()));
            }
            return out;
        }
        case Node::Or_: {
            std::vector<std::vector<std::vector<Literal>>> parts;
            std::size_t product = 1;
            for (const auto& k : n->kids) {
                auto sub = to_cnf(k);
                if (sub.empty()) return {}; // child is true
                bool has_empty = false;
                for (const auto& c : sub) has_empty |= c.empty();
                if (has_empty) continue; // child is false
                product *= sub.size();
                if (product > 1000000) product = 1000000; // saturate
                parts.push_back(std::move(sub));
            }
            if (parts.empty()) return {{}}; // all children false
            if (product <= kBlowupFactor) {
                std::vector<std::vector<Literal>> out{{}};
                for (const auto& part : parts) {
                    std::vector<std::vector<Literal>> next;
                    for (const auto& base : out)
                        for (const auto& cls : part) {
                            std::vector<Literal> merged = base;
                            merged.insert(merged.end(), cls.begin(), cls.end());
                            next.push_back(std::move(merged));
                        }
                    out = std::move(next);
                }
                return out;
            }
            // Definitional encoding: replace each multi-clause child by a
            // fresh boolean equivalent to it.
            std::vector<std::vector<Literal>> out;
            std::vector<Literal> main;
            for (auto& part : parts) {
                if (part.size() == 1) {
                    // A plain clause child folds straight into the result.
                    main.insert(main.end(), part[0].begin(), part[0].end());
                    continue;
                }
                BoolVarId b = fresh_bool();
                Literal pos, neg;
                pos.atom = Atom::boolean(b);
                neg = pos;
                neg.negated = true;
                // b -> child
                for (auto cls : part) {
                    cls.push_back(neg);
                    out.push_back(std::move(cls));
                }
                // child -> b : every clause of CNF(not child) gets b.
                // Reconstruct the child's formula is gone here, so derive
                // the converse from the clause set: not child = OR over
                // clauses of AND of negated literals; its CNF is the
                // cartesian distribution, bounded the same way.
                auto conv = converse_clauses(part);
                for (auto& cls : conv) {
                    cls.push_back(pos);
                    out.push_back(std::move(cls));
                }
                main.push_back(pos);
            }
            out.push_back(std::move(main));
            return out;
        }
        }
        return {};
    }

    // CNF of the negation of a clause set (used for the reverse direction
    // of definitional variables). The negation is an OR of per-clause
    // "all literals false" conjunctions; distribute, introducing nested
    // definitions when too large.
    std::vector<std::vector<Literal>> converse_clauses(
        const std::vector<std::vector<Literal>>& part) {
        std::size_t product = 1;
        for (const auto& cls : part) {
            product *= std::max<std::size_t>(cls.size(), 1);
            if (product > kBlowupFactor) break;
        }
        auto negate_lit = [](Literal l) {
            l.negated = !l.negated;
            return l;
        };
        if (product <= kBlowupFactor) {
            std::vector<std::vector<Literal>> out{{}};
            for (const auto& cls : part) {
                std::vector<std::vector<Literal>> next;
                for (const auto& base : out)
                    for (const auto& lit : cls) {
                        std::vector<Literal> merged = base;
                        merged.push_back(negate_lit(lit));
                        next.push_back(std::move(merged));
                    }
                out = std::move(next);
            }
            return out;
        }
        // One fresh boolean per conjunct: d_i <-> AND of negated literals.
        std::vector<std::vector<Literal>> out;
        std::vector<Literal> selector;
        for (const auto& cls : part) {
            BoolVarId d = fresh_bool();
            Literal pos, neg;
            pos.atom = Atom::boolean(d);
            neg = pos;
            neg.negated = true;
            std::vector<Literal> back{pos}; // (OR lits) -> d  is  d or lits
            for (const auto& lit : cls) {
                out.push_back({neg, negate_lit(lit)}); // d -> !lit
                back.push_back(lit);
            }
            out.push_back(std::move(back));
            selector.push_back(pos);
        }
        out.push_back(std::move(selector));
        return out;
    }

    static NodeP push_not(const NodeP& n) {
        switch (n->kind) {
        case Node::True_: return mk_const(false);
        case Node::False_: return mk_const(true);
        case Node::Lit_: {
            Literal l = n->lit;
            l.negated = !l.negated;
            return mk_lit(std::move(l));
        }
        case Node::Not_: return n->kids[0];
        case Node::And_: {
            std::vector<NodeP> kids;
            for (const auto& k : n->kids) kids.push_back(mk_not(k));
            return mk_nary(Node::Or_, std::move(kids));
        }
        case Node::Or_: {
            std::vector<NodeP> kids;
            for (const auto& k : n->kids) kids.push_back(mk_not(k));
            return mk_nary(Node::And_, std::move(kids));
        }
        }
        return mk_const(false);
    }

    const std::string& text_;
    Instance inst_;
    std::map<std::string, VarId> reals_;
    std::map<std::string, BoolVarId> bools_;
    std::map<std::string, smt2::Parsed> macros_;
    int fresh_counter_ = 0;
};

} // namespace detail

inline Instance parse_smt2(const std::string& text) {
    return detail::Smt2Parser(text).run();
}

// ---------------------------------------------------------------------
// Preprocessing.

namespace detail {

// Re-canonicalize a literal after substitution. Returns the literal's
// truth value when its polynomial became constant.
inline std::optional<bool> normalize_literal(Literal& l) {
    if (l.is_bool()) return std::nullopt;
    if (l.atom.poly.is_constant()) {
        int sg = sign(l.atom.poly.constant_value());
        bool truth;
        switch (l.atom.cmp) {
        case CmpKind::GE: truth = sg >= 0; break;
        case CmpKind::LE: truth = sg <= 0; break;
        default: truth = sg == 0; break;
        }
        return truth != l.negated;
    }
    Literal canon = Smt2Parser::make_canonical_literal(std::move(l.atom.poly), l.atom.cmp,
                                                       l.negated);
    l = std::move(canon);
    return std::nullopt;
}

} // namespace detail

// Simplification passes over the CNF: boolean unit propagation, merging
// the >=/<= unit pair into an equality, and elimination of variables
// defined by simple linear unit equations. Sets inst.contradiction when
// the input is refuted outright.
inline void preprocess(Instance& inst) {
    std::vector<Clause> cls = inst.original;
    std::map<BoolVarId, bool> fixed;

    auto contradiction = [&](const std::string& why) {
        inst.contradiction = true;
        inst.contradiction_reason = why;
        inst.clauses.clear();
    };

    // Drop duplicate literals; detect tautological clauses.
    auto tidy_clause = [&](Clause& c) -> bool { // returns false when clause is true
        std::vector<Literal> out;
        for (const Literal& l : c.literals) {
            bool dup = false;
            for (const Literal& o : out) {
                if (literal_eq(l, o)) { dup = true; break; }
                Literal neg = o;
                neg.negated = !neg.negated;
                if (literal_eq(l, neg)) return false; // l or !l: tautology
            }
            if (!dup) out.push_back(l);
        }
        c.literals = std::move(out);
        return true;
    };

    bool changed = true;
    while (changed && !inst.contradiction) {
        changed = false;

        // Constant-literal folding + tautology removal.
        for (std::size_t i = 0; i < cls.size();) {
            bool clause_true = false;
            auto& lits = cls[i].literals;
            for (std::size_t j = 0; j < lits.size();) {
                if (auto truth = detail::normalize_literal(lits[j])) {
                    if (*truth) { clause_true = true; break; }
                    lits.erase(lits.begin() + j);
                    changed = true;
                    continue;
                }
                ++j;
            }
            if (!clause_true) clause_true = !tidy_clause(cls[i]);
            if (clause_true) {
                cls.erase(cls.begin() + i);
                changed = true;
                continue;
            }
            if (lits.empty()) return contradiction("derived an empty clause");
            ++i;
        }

        // Boolean unit propagation.
        for (const Clause& c : cls) {
            if (c.literals.size() == 1 && c.literals[0].is_bool()) {
                BoolVarId b = c.literals[0].atom.bool_var;
                bool val = !c.literals[0].negated;
                auto it = fixed.find(b);
                if (it != fixed.end()) {
                    if (it->second != val)
                        return contradiction("conflicting boolean units for " +
                                             inst.bool_names[b]);
                } else {
                    fixed[b] = val;
                    changed = true;
                }
            }
        }
        if (changed && !fixed.empty()) {
            for (std::size_t i = 0; i < cls.size();) {
                bool clause_true = false;
                auto& lits = cls[i].literals;
                for (std::size_t j = 0; j < lits.size();) {
                    if (lits[j].is_bool() && fixed.count(lits[j].atom.bool_var)) {
                        bool truth = fixed[lits[j].atom.bool_var] != lits[j].negated;
                        if (truth) { clause_true = true; break; }
                        lits.erase(lits.begin() + j);
                        continue;
                    }
                    ++j;
                }
                if (clause_true) {
                    cls.erase(cls.begin() + i);
                    continue;
                }
                if (lits.empty()) return contradiction("boolean propagation emptied a clause");
                ++i;
            }
        }

        // Merge unit p>=0 with unit p<=0 into unit p=0.
        for (std::size_t i = 0; i < cls.size() && !changed; ++i) {
            if (cls[i].literals.size() != 1) continue;
            const Literal& a = cls[i].literals[0];
            if (a.is_bool() || a.negated || a.atom.cmp != CmpKind::GE) continue;
            for (std::size_t j = 0; j < cls.size(); ++j) {
                if (j == i || cls[j].literals.size() != 1) continue;
                const Literal& b = cls[j].literals[0];
                if (b.is_bool() || b.negated || b.atom.cmp != CmpKind::LE) continue;
                if (!(a.atom.poly == b.atom.poly)) continue;
                Literal eq;
                eq.atom = Atom::compare(a.atom.poly, CmpKind::EQ);
                cls[i].literals[0] = std::move(eq);
                cls.erase(cls.begin() + j);
                changed = true;
                break;
            }
        }
        if (changed) continue;

        // Linear elimination from unit equations c*x + q = 0.
        for (std::size_t i = 0; i < cls.size() && !changed; ++i) {
            if (cls[i].literals.size() != 1) continue;
            const Literal& l = cls[i].literals[0];
            if (l.is_bool() || l.negated || l.atom.cmp != CmpKind::EQ) continue;
            const Polynomial& p = l.atom.poly;
            for (VarId x : p.variables()) {
                // x must occur only as the standalone monomial c*x.
                Rational c(0);
                bool clean = true;
                for (const auto& [m, coef] : p.terms()) {
                    bool has_x = false;
                    for (const auto& [v, e] : m) has_x |= (v == x);
                    if (!has_x) continue;
                    if (m.size() == 1 && m[0].first == x && m[0].second == 1)
                        c = coef;
                    else {
                        clean = false;
                        break;
                    }
                }
                if (!clean || c == 0) continue;
                Polynomial q = p - Polynomial::variable(x) * c;
                if (q.total_degree() > 1 || q.variables().size() > 2) continue;
                Polynomial subst = q * (Rational(-1) / c);
                inst.elim_script.push_back({x, subst});
                cls.erase(cls.begin() + i);
                for (Clause& cc : cls)
                    for (Literal& ll : cc.literals)
                        if (!ll.is_bool() && ll.atom.poly.degree_in(x) > 0)
                            ll.atom.poly = ll.atom.poly.substitute_var(x, subst);
                changed = true;
                break;
            }
        }
    }

    if (inst.contradiction) return;
    for (const auto& [b, v] : fixed) inst.fixed_bools.push_back({b, v});
    int cid = 0;
    for (Clause& c : cls) c.cid = cid++;
    inst.clauses = std::move(cls);
}

// Extends a model of the preprocessed clauses to the original variables:
// runs the elimination script backwards and applies fixed booleans.
inline void extend_model(const Instance& inst, Assignment& asg) {
    for (std::size_t i = inst.elim_script.size(); i-- > 0;) {
        const auto& [x, poly] = inst.elim_script[i];
        asg.reals[x] = evaluate(poly, asg.reals);
    }
    for (const auto& [b, v] : inst.fixed_bools) asg.bools[b] = v;
}

// Exact check of the ORIGINAL clause set (unrelaxed atoms).
inline bool verify_model(const std::vector<Clause>& original, const Assignment& asg) {
    for (const Clause& c : original) {
        bool sat = false;
        for (const Literal& l : c.literals) {
            Literal plain = l;
            plain.relaxed = false;
            if (literal_holds(plain, asg, Rational(0))) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

// ---------------------------------------------------------------------
// Model printing (get-model style).

namespace detail {

inline std::string smt2_numeral(const Rational& r) {
    bool neg = r < 0;
    Rational a = abs_rational(r);
    std::string body;
    if (denominator(a) == 1)
        body = a.get_num().get_str() + ".0";
    else
        body = "(/ " + a.get_num().get_str() + ".0 " + a.get_den().get_str() + ".0)";
    return neg ? "(- " + body + ")" : body;
}

inline std::string smt2_poly_in_x(const QPoly& p) {
    std::vector<std::string> terms;
    for (std::size_t i = p.coeffs().size(); i-- > 0;) {
        const Rational& c = p.coeff(i);
        if (c == 0) continue;
        std::string cs = smt2_numeral(c);
        std::string xs;
        if (i == 0)
            xs = "";
        else if (i == 1)
            xs = "x";
        else
            xs = "(^ x " + std::to_string(i) + ")";
        if (xs.empty())
            terms.push_back(cs);
        else if (c == 1)
            terms.push_back(xs);
        else
            terms.push_back("(* " + cs + " " + xs + ")");
    }
    if (terms.empty()) return "0.0";
    if (terms.size() == 1) return terms[0];
    std::string out = "(+";
    for (const auto& t : terms) out += " " + t;
    return out + ")";
}

inline std::string smt2_value(const Value& v) {
    if (is_rational(v)) return smt2_numeral(as_rational(v));
    const AlgebraicNumber& a = as_algebraic(v);
    RootInfo ri = isolate_roots(a.minpoly());
    int idx = 0;
    for (std::size_t i = 0; i < ri.roots.size(); ++i)
        if (value_eq(ri.roots[i], v)) {
            idx = static_cast<int>(i) + 1;
            break;
        }
    return "(root-obj " + smt2_poly_in_x(a.minpoly()) + " " + std::to_string(idx) + ")";
}

} // namespace detail

inline std::string print_model(const Instance& inst, const Assignment& asg) {
    std::ostringstream out;
    out << "(model\n";
    for (std::size_t i = 0; i < inst.real_names.size(); ++i) {
        out << "  (define-fun " << inst.real_names[i] << " () Real "
            << detail::smt2_value(asg.reals[i]) << ")";
        if (!is_rational(asg.reals[i])) {
            std::ostringstream approx;
            approx.precision(6);
            approx << std::fixed << value_approx(asg.reals[i]);
            out << " ; ~ " << approx.str();
        }
        out << "\n";
    }
    for (std::size_t i = 0; i < inst.bool_names.size(); ++i) {
        if (inst.bool_names[i].rfind("$def", 0) == 0) continue; // internal
        out << "  (define-fun " << inst.bool_names[i] << " () Bool "
            << (asg.bools[i] ? "true" : "false") << ")\n";
    }
    out << ")\n";
    return out.str();
}

} // namespace nrals
