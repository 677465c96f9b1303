#include "hyperplan/formula.hpp"

#include "hyperplan/errors.hpp"
#include "hyperplan/system.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

namespace hyperplan {

namespace ltl {

namespace {
BodyPtr make(Op op, BodyPtr lhs = nullptr, BodyPtr rhs = nullptr)
{
    auto b = std::make_shared<Body>();
    b->op = op;
    b->lhs = std::move(lhs);
    b->rhs = std::move(rhs);
    return b;
}
} // namespace

BodyPtr tt() { return make(Op::True); }
BodyPtr ff() { return make(Op::False); }
BodyPtr atom(std::string name, int var)
{
    auto b = std::make_shared<Body>();
    b->op = Op::Atom;
    b->atom = std::move(name);
    b->var = var;
    return b;
}
BodyPtr neg(BodyPtr a) { return make(Op::Not, std::move(a)); }
BodyPtr conj(BodyPtr a, BodyPtr b) { return make(Op::And, std::move(a), std::move(b)); }
BodyPtr disj(BodyPtr a, BodyPtr b) { return make(Op::Or, std::move(a), std::move(b)); }
BodyPtr implies(BodyPtr a, BodyPtr b) { return make(Op::Implies, std::move(a), std::move(b)); }
BodyPtr iff(BodyPtr a, BodyPtr b) { return make(Op::Iff, std::move(a), std::move(b)); }
BodyPtr next(BodyPtr a) { return make(Op::Next, std::move(a)); }
BodyPtr until(BodyPtr a, BodyPtr b) { return make(Op::Until, std::move(a), std::move(b)); }
BodyPtr eventually(BodyPtr a) { return make(Op::Eventually, std::move(a)); }
BodyPtr globally(BodyPtr a) { return make(Op::Globally, std::move(a)); }

} // namespace ltl

bool structurally_equal(const Body& a, const Body& b)
{
    if (a.op != b.op || a.atom != b.atom || a.var != b.var)
        return false;
    auto same = [](const BodyPtr& x, const BodyPtr& y) {
        if (!x || !y)
            return !x && !y;
        return structurally_equal(*x, *y);
    };
    return same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

int depth(const Body& b)
{
    int d = 0;
    if (b.lhs)
        d = std::max(d, depth(*b.lhs));
    if (b.rhs)
        d = std::max(d, depth(*b.rhs));
    return d + 1;
}

namespace {

void collect_vars(const Body& b, std::vector<int>& out)
{
    if (b.op == Op::Atom)
        out.push_back(b.var);
    if (b.lhs)
        collect_vars(*b.lhs, out);
    if (b.rhs)
        collect_vars(*b.rhs, out);
}

} // namespace

HyperFormula::HyperFormula(std::vector<QuantifiedVar> prefix, BodyPtr body)
    : prefix_(std::move(prefix)), body_(std::move(body))
{
    if (prefix_.empty())
        throw SemanticError("formula has an empty quantifier prefix");
    if (!body_)
        throw SemanticError("formula has no body");
    for (std::size_t i = 0; i < prefix_.size(); ++i) {
        if (prefix_[i].var.index != static_cast<int>(i) + 1)
            throw SemanticError("path variable indices must be contiguous from 1");
        for (std::size_t j = 0; j < i; ++j)
            if (prefix_[j].var.name == prefix_[i].var.name)
                throw SemanticError("duplicate path variable '" + prefix_[i].var.name + "'");
    }
    std::vector<int> used;
    collect_vars(*body_, used);
    for (int v : used)
        if (v < 1 || v > num_paths())
            throw SemanticError("body refers to an unbound path variable index " + std::to_string(v));
}

std::vector<int> HyperFormula::existential_vars() const
{
    std::vector<int> out;
    for (const auto& q : prefix_)
        if (q.quantifier == Quantifier::Exists)
            out.push_back(q.var.index);
    return out;
}

std::vector<int> HyperFormula::universal_vars() const
{
    std::vector<int> out;
    for (const auto& q : prefix_)
        if (q.quantifier == Quantifier::Forall)
            out.push_back(q.var.index);
    return out;
}

std::string HyperFormula::quantifier_word() const
{
    std::string w;
    for (const auto& q : prefix_)
        w.push_back(q.quantifier == Quantifier::Forall ? 'A' : 'E');
    return w;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Ident, Dot, LParen, RParen, Not, And, Or, Implies, Iff, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> lex(std::string_view s)
{
    std::vector<Token> out;
    std::size_t line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto is_ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        std::size_t l = line, k = col;
        auto emit = [&](Tok t, std::size_t n) {
            out.push_back({t, std::string(s.substr(i, n)), l, k});
            advance(n);
        };
        if (s.substr(i, 3) == "<->")
            emit(Tok::Iff, 3);
        else if (s.substr(i, 2) == "->")
            emit(Tok::Implies, 2);
        else if (s.substr(i, 2) == "&&")
            emit(Tok::And, 2);
        else if (s.substr(i, 2) == "||")
            emit(Tok::Or, 2);
        else if (c == '.')
            emit(Tok::Dot, 1);
        else if (c == '(')
            emit(Tok::LParen, 1);
        else if (c == ')')
            emit(Tok::RParen, 1);
        else if (c == '!')
            emit(Tok::Not, 1);
        else if (c == '&')
            emit(Tok::And, 1);
        else if (c == '|')
            emit(Tok::Or, 1);
        else if (is_ident_char(c)) {
            std::size_t n = 0;
            while (i + n < s.size() && is_ident_char(s[i + n]))
                ++n;
            emit(Tok::Ident, n);
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", l, k);
        }
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(lex(text)) {}

    HyperFormula parse()
    {
        std::vector<QuantifiedVar> prefix;
        while (peek().kind == Tok::Ident && (peek().text == "forall" || peek().text == "exists")) {
            Quantifier q = take().text == "forall" ? Quantifier::Forall : Quantifier::Exists;
            const Token& name = expect(Tok::Ident, "path variable");
            if (!is_identifier(name.text) || is_keyword(name.text))
                fail(name, "invalid path variable name '" + name.text + "'");
            for (const auto& p : prefix)
                if (p.var.name == name.text)
                    throw SemanticError("duplicate path variable '" + name.text + "'");
            expect(Tok::Dot, "'.'");
            prefix.push_back({q, PathVar{name.text, static_cast<int>(prefix.size()) + 1}});
        }
        if (prefix.empty())
            fail(peek(), "expected 'forall' or 'exists'");
        vars_ = &prefix;
        BodyPtr body = parse_binary();
        if (peek().kind != Tok::End)
            fail(peek(), "unexpected '" + peek().text + "'");
        return HyperFormula(std::move(prefix), std::move(body));
    }

private:
    static bool is_keyword(const std::string& s)
    {
        return s == "X" || s == "F" || s == "G" || s == "U" || s == "true" || s == "false" || s == "forall" ||
               s == "exists";
    }

    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_++]; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(msg, t.line, t.column); }

    const Token& expect(Tok kind, const char* what)
    {
        if (peek().kind != kind)
            fail(peek(), std::string("expected ") + what);
        return take();
    }

    bool at_ident(const char* text) const { return peek().kind == Tok::Ident && peek().text == text; }

    // -> and <-> share the lowest level and associate to the right.
    BodyPtr parse_binary()
    {
        BodyPtr lhs = parse_or();
        if (peek().kind == Tok::Implies) {
            take();
            return ltl::implies(lhs, parse_binary());
        }
        if (peek().kind == Tok::Iff) {
            take();
            return ltl::iff(lhs, parse_binary());
        }
        return lhs;
    }

    BodyPtr parse_or()
    {
        BodyPtr lhs = parse_and();
        while (peek().kind == Tok::Or) {
            take();
            lhs = ltl::disj(lhs, parse_and());
        }
        return lhs;
    }

    BodyPtr parse_and()
    {
        BodyPtr lhs = parse_until();
        while (peek().kind == Tok::And) {
            take();
            lhs = ltl::conj(lhs, parse_until());
        }
        return lhs;
    }

    BodyPtr parse_until()
    {
        BodyPtr lhs = parse_unary();
        if (at_ident("U")) {
            take();
            return ltl::until(lhs, parse_until());
        }
        return lhs;
    }

    BodyPtr parse_unary()
    {
        if (peek().kind == Tok::Not) {
            take();
            return ltl::neg(parse_unary());
        }
        if (at_ident("X")) {
            take();
            return ltl::next(parse_unary());
        }
        if (at_ident("F")) {
            take();
            return ltl::eventually(parse_unary());
        }
        if (at_ident("G")) {
            take();
            return ltl::globally(parse_unary());
        }
        return parse_primary();
    }

    BodyPtr parse_primary()
    {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            take();
            BodyPtr inner = parse_binary();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (t.kind != Tok::Ident)
            fail(t, t.kind == Tok::End ? "unexpected end of formula" : "unexpected '" + t.text + "'");
        take();
        if (t.text == "true")
            return ltl::tt();
        if (t.text == "false")
            return ltl::ff();
        if (is_keyword(t.text))
            fail(t, "unexpected '" + t.text + "'");
        auto us = t.text.rfind('_');
        if (us == std::string::npos || us == 0 || us + 1 == t.text.size())
            fail(t, "atom '" + t.text + "' must have the form <atom>_<path>");
        std::string atom = t.text.substr(0, us);
        std::string var = t.text.substr(us + 1);
        if (!is_identifier(atom) || !is_identifier(var))
            fail(t, "malformed atom '" + t.text + "'");
        for (const auto& q : *vars_)
            if (q.var.name == var)
                return ltl::atom(atom, q.var.index);
        throw SemanticError("unbound variable " + var + " (line " + std::to_string(t.line) + ", column " +
                            std::to_string(t.column) + ")");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const std::vector<QuantifiedVar>* vars_ = nullptr;
};

} // namespace

HyperFormula parse_formula(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printing

std::string to_string(const Body& b, const HyperFormula& f)
{
    auto sub = [&](const BodyPtr& p) { return to_string(*p, f); };
    switch (b.op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return b.atom + "_" + f.var_name(b.var);
    case Op::Not: return "!" + sub(b.lhs);
    case Op::Next: return "X " + sub(b.lhs);
    case Op::Eventually: return "F " + sub(b.lhs);
    case Op::Globally: return "G " + sub(b.lhs);
    case Op::And: return "(" + sub(b.lhs) + " & " + sub(b.rhs) + ")";
    case Op::Or: return "(" + sub(b.lhs) + " | " + sub(b.rhs) + ")";
    case Op::Implies: return "(" + sub(b.lhs) + " -> " + sub(b.rhs) + ")";
    case Op::Iff: return "(" + sub(b.lhs) + " <-> " + sub(b.rhs) + ")";
    case Op::Until: return "(" + sub(b.lhs) + " U " + sub(b.rhs) + ")";
    }
    return {};
}

std::string to_string(const HyperFormula& f)
{
    std::string out;
    for (const auto& q : f.prefix())
        out += (q.quantifier == Quantifier::Forall ? "forall " : "exists ") + q.var.name + ". ";
    return out + to_string(f.body(), f);
}

HyperFormula negate(const HyperFormula& f)
{
    std::vector<QuantifiedVar> prefix = f.prefix();
    for (auto& q : prefix)
        q.quantifier = q.quantifier == Quantifier::Forall ? Quantifier::Exists : Quantifier::Forall;
    return HyperFormula(std::move(prefix), ltl::neg(f.body_ptr()));
}

// ---------------------------------------------------------------------------
// Classification

const char* name(PrefixClass c)
{
    switch (c) {
    case PrefixClass::ExistsOnly: return "ExistsOnly";
    case PrefixClass::ForallExists: return "ForallExists";
    case PrefixClass::ForallExistsForall: return "ForallExistsForall";
    case PrefixClass::General: return "General";
    }
    return "?";
}

const char* name(BodyClass c)
{
    switch (c) {
    case BodyClass::Reachability: return "Reachability";
    case BodyClass::Safety: return "Safety";
    case BodyClass::Neither: return "Neither";
    }
    return "?";
}

PrefixClass classify_prefix(const HyperFormula& f) { return classify_word(f.quantifier_word()); }

PrefixClass classify_word(std::string_view w)
{
    std::size_t i = 0;
    auto run = [&](char c) {
        std::size_t start = i;
        while (i < w.size() && w[i] == c)
            ++i;
        return i - start;
    };
    const std::size_t leading_a = run('A');
    const std::size_t es = run('E');
    const std::size_t trailing_a = run('A');
    if (i != w.size() || es == 0)
        return PrefixClass::General;
    if (trailing_a > 0)
        return PrefixClass::ForallExistsForall;
    return leading_a == 0 ? PrefixClass::ExistsOnly : PrefixClass::ForallExists;
}

namespace {

enum TemporalBits : unsigned { kNext = 1, kUntil = 2, kRelease = 4, kEventually = 8, kGlobally = 16 };

// Temporal operators occurring in the negation normal form of b (or of !b when
// `negated`). Implications and biconditionals are expanded before pushing.
unsigned nnf_temporal(const Body& b, bool negated)
{
    switch (b.op) {
    case Op::True:
    case Op::False:
    case Op::Atom: return 0;
    case Op::Not: return nnf_temporal(*b.lhs, !negated);
    case Op::And:
    case Op::Or: return nnf_temporal(*b.lhs, negated) | nnf_temporal(*b.rhs, negated);
    case Op::Implies: return nnf_temporal(*b.lhs, !negated) | nnf_temporal(*b.rhs, negated);
    case Op::Iff:
        // (a & b) | (!a & !b) and its negation both mention a, !a, b, !b.
        return nnf_temporal(*b.lhs, false) | nnf_temporal(*b.lhs, true) | nnf_temporal(*b.rhs, false) |
               nnf_temporal(*b.rhs, true);
    case Op::Next: return kNext | nnf_temporal(*b.lhs, negated);
    case Op::Eventually: return (negated ? kGlobally : kEventually) | nnf_temporal(*b.lhs, negated);
    case Op::Globally: return (negated ? kEventually : kGlobally) | nnf_temporal(*b.lhs, negated);
    case Op::Until:
        return (negated ? kRelease : kUntil) | nnf_temporal(*b.lhs, negated) | nnf_temporal(*b.rhs, negated);
    }
    return 0;
}

} // namespace

bool in_reachability_fragment(const Body& b)
{
    return (nnf_temporal(b, false) & ~unsigned(kNext | kUntil | kEventually)) == 0;
}

bool in_safety_fragment(const Body& b)
{
    return (nnf_temporal(b, false) & ~unsigned(kNext | kGlobally)) == 0;
}

BodyClass classify_body(const Body& b)
{
    if (in_reachability_fragment(b))
        return BodyClass::Reachability;
    if (in_safety_fragment(b))
        return BodyClass::Safety;
    return BodyClass::Neither;
}

std::vector<IndexedAtom> indexed_atoms(const Body& b)
{
    std::vector<IndexedAtom> out;
    auto walk = [&](auto&& self, const Body& n) -> void {
        if (n.op == Op::Atom)
            out.push_back({n.atom, n.var});
        if (n.lhs)
            self(self, *n.lhs);
        if (n.rhs)
            self(self, *n.rhs);
    };
    walk(walk, b);
    std::sort(out.begin(), out.end(), [](const IndexedAtom& x, const IndexedAtom& y) {
        return std::tie(x.var, x.atom) < std::tie(y.var, y.atom);
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace hyperplan
