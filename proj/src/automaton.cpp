#include "hyperplan/automaton.hpp"

#include "hyperplan/errors.hpp"

#include <algorithm>
#include <deque>
#include <iterator>
#include <sstream>
#include <unordered_map>

namespace hyperplan {

bool Guard::matches(LetterMask letter) const
{
    return std::any_of(cubes.begin(), cubes.end(), [&](const Cube& c) { return c.matches(letter); });
}

DetAutomaton::DetAutomaton(AutomatonKind kind, std::vector<IndexedAtom> alphabet, std::vector<std::string> residues,
                           std::vector<std::vector<Edge>> edges, std::vector<bool> marked)
    : kind_(kind), alphabet_(std::move(alphabet)), residues_(std::move(residues)), edges_(std::move(edges)),
      marked_(std::move(marked))
{
    if (edges_.empty() || residues_.size() != edges_.size() || marked_.size() != edges_.size())
        throw SemanticError("inconsistent automaton tables");
}

LetterMask DetAutomaton::mask_of(const Letter& letter) const
{
    LetterMask m = 0;
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        if (letter.count(alphabet_[i]))
            m |= LetterMask(1) << i;
    return m;
}

int DetAutomaton::step(int q, LetterMask letter) const
{
    if (q < 0 || q >= num_states())
        throw SemanticError("unknown automaton state " + std::to_string(q));
    for (const auto& e : edges_[q])
        if (e.guard.matches(letter))
            return e.target;
    throw SemanticError("automaton transition function is not total");
}

std::string DetAutomaton::guard_to_string(const Guard& g) const
{
    if (g.cubes.empty())
        return "false";
    std::string out;
    for (std::size_t c = 0; c < g.cubes.size(); ++c) {
        if (c)
            out += " | ";
        const Cube& cube = g.cubes[c];
        if (cube.care == 0) {
            out += "true";
            continue;
        }
        std::string lits;
        int count = 0;
        for (std::size_t i = 0; i < alphabet_.size(); ++i) {
            LetterMask bit = LetterMask(1) << i;
            if (!(cube.care & bit))
                continue;
            if (count++)
                lits += " & ";
            if (!(cube.value & bit))
                lits += "!";
            lits += alphabet_[i].atom + "_" + std::to_string(alphabet_[i].var);
        }
        out += (g.cubes.size() > 1 && count > 1) ? "(" + lits + ")" : lits;
    }
    return out;
}

std::string DetAutomaton::to_dot() const
{
    std::ostringstream out;
    out << "digraph automaton {\n  rankdir=LR;\n  init [shape=point];\n  init -> q0;\n";
    for (int q = 0; q < num_states(); ++q) {
        out << "  q" << q << " [label=\"q" << q << "\\n" << residues_[q] << "\""
            << (marked_[q] ? ", shape=doublecircle" : ", shape=circle") << "];\n";
    }
    for (int q = 0; q < num_states(); ++q)
        for (const auto& e : edges_[q])
            out << "  q" << q << " -> q" << e.target << " [label=\"" << guard_to_string(e.guard) << "\"];\n";
    out << "}\n";
    return out.str();
}

namespace {

// Hash-consed negation-normal-form terms. Children of And/Or are flattened,
// sorted by id and deduplicated, so equal ids mean syntactically equal
// normalized residues.
enum class TOp : std::uint8_t { True, False, Lit, And, Or, Next, Until, Release, Eventually, Globally };

struct Term {
    TOp op;
    int bit = -1;
    bool positive = true;
    std::vector<int> kids;

    bool operator==(const Term&) const = default;
};

struct TermHash {
    std::size_t operator()(const Term& t) const
    {
        std::size_t h = static_cast<std::size_t>(t.op) * 0x9e3779b97f4a7c15ULL;
        h ^= static_cast<std::size_t>(t.bit + 1) + 0x9e3779b9 + (h << 6) + (h >> 2);
        h ^= static_cast<std::size_t>(t.positive) + 0x9e3779b9 + (h << 6) + (h >> 2);
        for (int k : t.kids)
            h ^= static_cast<std::size_t>(k) + 0x9e3779b9 + (h << 6) + (h >> 2);
        return h;
    }
};

class TermPool {
public:
    TermPool()
    {
        true_ = intern(Term{TOp::True, -1, true, {}});
        false_ = intern(Term{TOp::False, -1, true, {}});
    }

    int tt() const { return true_; }
    int ff() const { return false_; }
    const Term& at(int id) const { return terms_[id]; }

    int lit(int bit, bool positive) { return intern(Term{TOp::Lit, bit, positive, {}}); }

    int conj(std::vector<int> kids) { return nary(TOp::And, std::move(kids)); }
    int disj(std::vector<int> kids) { return nary(TOp::Or, std::move(kids)); }

    int next(int a)
    {
        if (a == true_ || a == false_)
            return a;
        return intern(Term{TOp::Next, -1, true, {a}});
    }

    int until(int a, int b)
    {
        if (b == true_ || b == false_)
            return b;
        if (a == false_)
            return b;
        if (a == true_)
            return eventually(b);
        return intern(Term{TOp::Until, -1, true, {a, b}});
    }

    int release(int a, int b)
    {
        if (b == true_ || b == false_)
            return b;
        if (a == true_)
            return b;
        if (a == false_)
            return globally(b);
        return intern(Term{TOp::Release, -1, true, {a, b}});
    }

    int eventually(int a)
    {
        if (a == true_ || a == false_ || terms_[a].op == TOp::Eventually)
            return a;
        return intern(Term{TOp::Eventually, -1, true, {a}});
    }

    int globally(int a)
    {
        if (a == true_ || a == false_ || terms_[a].op == TOp::Globally)
            return a;
        return intern(Term{TOp::Globally, -1, true, {a}});
    }

    std::size_t size() const { return terms_.size(); }

private:
    int intern(Term t)
    {
        auto it = index_.find(t);
        if (it != index_.end())
            return it->second;
        int id = static_cast<int>(terms_.size());
        terms_.push_back(t);
        index_.emplace(std::move(t), id);
        return id;
    }

    using Clause = std::vector<int>;
    struct TooLarge {};
    static constexpr std::size_t kMaxClauses = 512;

    int nary(TOp op, std::vector<int> kids)
    {
        const int unit = op == TOp::And ? true_ : false_;
        const int zero = op == TOp::And ? false_ : true_;
        std::vector<int> flat;
        for (int k : kids) {
            if (k == zero)
                return zero;
            if (k != unit)
                flat.push_back(k);
        }
        if (flat.empty())
            return unit;
        try {
            std::vector<Clause> dnf = op == TOp::And ? clause_product(flat) : clause_union(flat);
            return from_dnf(std::move(dnf));
        } catch (const TooLarge&) {
            return flat_nary(op, std::move(flat));
        }
    }

    // Boolean structure as an absorbed DNF over non-And/Or terms. Finite over
    // a fixed closure, so progression cannot nest And/Or without bound.
    std::vector<Clause> dnf_of(int k)
    {
        const Term& t = terms_[k];
        if (t.op == TOp::Or)
            return clause_union(t.kids);
        if (t.op == TOp::And)
            return clause_product(t.kids);
        if (k == true_)
            return {Clause{}};
        if (k == false_)
            return {};
        return {Clause{k}};
    }

    std::vector<Clause> clause_union(const std::vector<int>& kids)
    {
        std::vector<Clause> out;
        for (int k : kids) {
            auto d = dnf_of(k);
            out.insert(out.end(), d.begin(), d.end());
        }
        return absorb(std::move(out));
    }

    std::vector<Clause> clause_product(const std::vector<int>& kids)
    {
        std::vector<Clause> acc{Clause{}};
        for (int k : kids) {
            auto d = dnf_of(k);
            std::vector<Clause> next;
            for (const auto& a : acc)
                for (const auto& b : d) {
                    Clause c;
                    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c));
                    next.push_back(std::move(c));
                }
            acc = absorb(std::move(next));
            if (acc.empty())
                break;
        }
        return acc;
    }

    // Drops duplicates and every clause that includes another clause.
    static std::vector<Clause> absorb(std::vector<Clause> cs)
    {
        std::sort(cs.begin(), cs.end(), [](const Clause& a, const Clause& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        std::vector<Clause> out;
        for (auto& c : cs) {
            bool subsumed = false;
            for (const auto& d : out)
                if (std::includes(c.begin(), c.end(), d.begin(), d.end())) {
                    subsumed = true;
                    break;
                }
            if (!subsumed)
                out.push_back(std::move(c));
        }
        if (out.size() > kMaxClauses)
            throw TooLarge{};
        return out;
    }

    int from_dnf(std::vector<Clause> dnf)
    {
        if (dnf.empty())
            return false_;
        std::vector<int> disjuncts;
        for (auto& c : dnf) {
            if (c.empty())
                return true_;
            disjuncts.push_back(c.size() == 1 ? c.front() : intern(Term{TOp::And, -1, true, std::move(c)}));
        }
        std::sort(disjuncts.begin(), disjuncts.end());
        disjuncts.erase(std::unique(disjuncts.begin(), disjuncts.end()), disjuncts.end());
        if (disjuncts.size() == 1)
            return disjuncts.front();
        return intern(Term{TOp::Or, -1, true, std::move(disjuncts)});
    }

    // Fallback when the DNF is too large: sorted, flattened, deduplicated.
    int flat_nary(TOp op, std::vector<int> kids)
    {
        std::vector<int> flat;
        for (int k : kids) {
            if (terms_[k].op == op)
                flat.insert(flat.end(), terms_[k].kids.begin(), terms_[k].kids.end());
            else
                flat.push_back(k);
        }
        std::sort(flat.begin(), flat.end());
        flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
        if (flat.size() == 1)
            return flat.front();
        return intern(Term{op, -1, true, std::move(flat)});
    }

    std::vector<Term> terms_;
    std::unordered_map<Term, int, TermHash> index_;
    int true_ = 0;
    int false_ = 0;
};

class Progression {
public:
    Progression(TermPool& pool, std::vector<IndexedAtom> alphabet) : pool_(pool), alphabet_(std::move(alphabet)) {}

    int nnf(const Body& b, bool neg)
    {
        switch (b.op) {
        case Op::True: return neg ? pool_.ff() : pool_.tt();
        case Op::False: return neg ? pool_.tt() : pool_.ff();
        case Op::Atom: return pool_.lit(bit_of(b), !neg);
        case Op::Not: return nnf(*b.lhs, !neg);
        case Op::And:
            return neg ? pool_.disj({nnf(*b.lhs, true), nnf(*b.rhs, true)})
                       : pool_.conj({nnf(*b.lhs, false), nnf(*b.rhs, false)});
        case Op::Or:
            return neg ? pool_.conj({nnf(*b.lhs, true), nnf(*b.rhs, true)})
                       : pool_.disj({nnf(*b.lhs, false), nnf(*b.rhs, false)});
        case Op::Implies:
            return neg ? pool_.conj({nnf(*b.lhs, false), nnf(*b.rhs, true)})
                       : pool_.disj({nnf(*b.lhs, true), nnf(*b.rhs, false)});
        case Op::Iff: {
            int a = nnf(*b.lhs, false), na = nnf(*b.lhs, true);
            int c = nnf(*b.rhs, false), nc = nnf(*b.rhs, true);
            if (neg)
                return pool_.disj({pool_.conj({a, nc}), pool_.conj({na, c})});
            return pool_.disj({pool_.conj({a, c}), pool_.conj({na, nc})});
        }
        case Op::Next: return pool_.next(nnf(*b.lhs, neg));
        case Op::Eventually: return neg ? pool_.globally(nnf(*b.lhs, true)) : pool_.eventually(nnf(*b.lhs, false));
        case Op::Globally: return neg ? pool_.eventually(nnf(*b.lhs, true)) : pool_.globally(nnf(*b.lhs, false));
        case Op::Until:
            return neg ? pool_.release(nnf(*b.lhs, true), nnf(*b.rhs, true))
                       : pool_.until(nnf(*b.lhs, false), nnf(*b.rhs, false));
        }
        return pool_.ff();
    }

    /// Residue that must hold from the next position on, given the letter now.
    int progress(int t, LetterMask letter)
    {
        memo_.clear();
        return prog(t, letter);
    }

    std::string render(int t) const
    {
        const Term& term = pool_.at(t);
        auto kid = [&](std::size_t i) { return render(term.kids[i]); };
        switch (term.op) {
        case TOp::True: return "true";
        case TOp::False: return "false";
        case TOp::Lit: {
            const auto& ia = alphabet_[term.bit];
            return (term.positive ? "" : "!") + ia.atom + "_" + std::to_string(ia.var);
        }
        case TOp::And:
        case TOp::Or: {
            std::string out = "(";
            for (std::size_t i = 0; i < term.kids.size(); ++i) {
                if (i)
                    out += term.op == TOp::And ? " & " : " | ";
                out += kid(i);
            }
            return out + ")";
        }
        case TOp::Next: return "X " + kid(0);
        case TOp::Eventually: return "F " + kid(0);
        case TOp::Globally: return "G " + kid(0);
        case TOp::Until: return "(" + kid(0) + " U " + kid(1) + ")";
        case TOp::Release: return "(" + kid(0) + " R " + kid(1) + ")";
        }
        return {};
    }

private:
    int bit_of(const Body& b) const
    {
        for (std::size_t i = 0; i < alphabet_.size(); ++i)
            if (alphabet_[i].atom == b.atom && alphabet_[i].var == b.var)
                return static_cast<int>(i);
        throw SemanticError("atom outside the automaton alphabet");
    }

    // Iterative post-order: residues can nest thousands of And/Or levels deep.
    int prog(int root, LetterMask letter)
    {
        std::vector<std::pair<int, bool>> stack{{root, false}};
        while (!stack.empty()) {
            auto [t, expanded] = stack.back();
            if (memo_.count(t)) {
                stack.pop_back();
                continue;
            }
            const Term& term = pool_.at(t);
            const bool temporal_leaf = term.op == TOp::True || term.op == TOp::False || term.op == TOp::Lit
                                       || term.op == TOp::Next;
            if (!expanded && !temporal_leaf) {
                stack.back().second = true;
                for (int k : term.kids)
                    if (!memo_.count(k))
                        stack.push_back({k, false});
                continue;
            }
            stack.pop_back();
            memo_.emplace(t, step(t, letter));
        }
        return memo_.at(root);
    }

    // One progression step given that every child already has its residue.
    int step(int t, LetterMask letter)
    {
        const Term term = pool_.at(t);
        auto kid = [&](int i) { return memo_.at(term.kids[i]); };
        switch (term.op) {
        case TOp::True:
        case TOp::False: return t;
        case TOp::Lit: {
            bool set = (letter >> term.bit) & 1U;
            return set == term.positive ? pool_.tt() : pool_.ff();
        }
        case TOp::And:
        case TOp::Or: {
            std::vector<int> kids;
            kids.reserve(term.kids.size());
            for (std::size_t i = 0; i < term.kids.size(); ++i)
                kids.push_back(kid(i));
            return term.op == TOp::And ? pool_.conj(std::move(kids)) : pool_.disj(std::move(kids));
        }
        case TOp::Next: return term.kids[0];
        case TOp::Until: return pool_.disj({kid(1), pool_.conj({kid(0), t})});
        case TOp::Release: return pool_.conj({kid(1), pool_.disj({kid(0), t})});
        case TOp::Eventually: return pool_.disj({kid(0), t});
        case TOp::Globally: return pool_.conj({kid(0), t});
        }
        return t;
    }

    TermPool& pool_;
    std::vector<IndexedAtom> alphabet_;
    std::unordered_map<int, int> memo_;
};

// Splits the letter space on the highest bit first; every leaf whose letters
// agree on the target becomes one cube.
void split(const std::vector<int>& targets, LetterMask base, int bits, LetterMask care, LetterMask value,
           std::vector<std::vector<Cube>>& out)
{
    const std::size_t size = std::size_t(1) << bits;
    const int first = targets[base];
    bool uniform = true;
    for (std::size_t i = 1; i < size && uniform; ++i)
        uniform = targets[base + i] == first;
    if (uniform) {
        out[first].push_back(Cube{care, value});
        return;
    }
    const int b = bits - 1;
    const LetterMask bit = LetterMask(1) << b;
    split(targets, base, b, care | bit, value, out);
    split(targets, base | bit, b, care | bit, value | bit, out);
}

std::vector<Cube> merge_cubes(std::vector<Cube> cubes)
{
    bool changed = true;
    while (changed) {
        changed = false;
        std::sort(cubes.begin(), cubes.end());
        for (std::size_t i = 0; i < cubes.size() && !changed; ++i) {
            for (std::size_t j = i + 1; j < cubes.size() && !changed; ++j) {
                if (cubes[i].care != cubes[j].care)
                    continue;
                LetterMask diff = cubes[i].value ^ cubes[j].value;
                if (diff == 0 || (diff & (diff - 1)) != 0)
                    continue;
                Cube merged{cubes[i].care & ~diff, cubes[i].value & ~diff};
                cubes.erase(cubes.begin() + static_cast<std::ptrdiff_t>(j));
                cubes[i] = merged;
                changed = true;
            }
        }
    }
    std::sort(cubes.begin(), cubes.end());
    cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
    return cubes;
}

DetAutomaton build(const Body& body, AutomatonKind kind, const AutomatonOptions& options)
{
    std::vector<IndexedAtom> alphabet = indexed_atoms(body);
    const int bits = static_cast<int>(alphabet.size());
    if (bits > options.max_alphabet || bits > 31)
        throw ResourceError("body uses " + std::to_string(bits) + " indexed atoms; the automaton cap is " +
                            std::to_string(options.max_alphabet));

    TermPool pool;
    Progression progression(pool, alphabet);
    const int marked_term = kind == AutomatonKind::Dfa ? pool.tt() : pool.ff();

    std::vector<int> state_terms{progression.nnf(body, false)};
    std::unordered_map<int, int> state_of{{state_terms[0], 0}};
    std::vector<std::vector<Edge>> edges;
    const std::size_t letters = std::size_t(1) << bits;

    for (std::size_t q = 0; q < state_terms.size(); ++q) {
        std::vector<int> targets(letters);
        // Descending letter order: new states are numbered by the successor
        // of the letter with the most atoms true first.
        for (std::size_t l = letters; l-- > 0;) {
            int residue = progression.progress(state_terms[q], static_cast<LetterMask>(l));
            auto [it, fresh] = state_of.emplace(residue, static_cast<int>(state_terms.size()));
            if (fresh) {
                if (state_terms.size() >= options.max_states)
                    throw ResourceError("automaton exceeds " + std::to_string(options.max_states) + " states");
                state_terms.push_back(residue);
            }
            targets[l] = it->second;
        }
        std::vector<std::vector<Cube>> per_target(state_terms.size());
        split(targets, 0, bits, 0, 0, per_target);
        std::vector<Edge> out;
        for (std::size_t t = 0; t < per_target.size(); ++t)
            if (!per_target[t].empty())
                out.push_back(Edge{Guard{merge_cubes(std::move(per_target[t]))}, static_cast<int>(t)});
        edges.push_back(std::move(out));
    }

    std::vector<std::string> residues;
    std::vector<bool> marked;
    for (int t : state_terms) {
        residues.push_back(progression.render(t));
        marked.push_back(t == marked_term);
    }
    return DetAutomaton(kind, std::move(alphabet), std::move(residues), std::move(edges), std::move(marked));
}

} // namespace

DetAutomaton build_reach_dfa(const Body& body, const AutomatonOptions& options)
{
    if (!in_reachability_fragment(body))
        throw ClassificationError("body is not in the reachability fragment");
    return build(body, AutomatonKind::Dfa, options);
}

DetAutomaton build_safety_dsa(const Body& body, const AutomatonOptions& options)
{
    if (!in_safety_fragment(body))
        throw ClassificationError("body is not in the safety fragment");
    return build(body, AutomatonKind::Dsa, options);
}

Truth accepts(const DetAutomaton& aut, std::span<const Letter> word)
{
    int q = aut.initial();
    if (aut.marked(q))
        return aut.kind() == AutomatonKind::Dfa ? Truth::True : Truth::False;
    for (const auto& letter : word) {
        q = aut.step(q, letter);
        if (aut.marked(q))
            return aut.kind() == AutomatonKind::Dfa ? Truth::True : Truth::False;
    }
    return Truth::Unknown;
}

void check_well_formed(const DetAutomaton& aut)
{
    const std::size_t letters = std::size_t(1) << aut.alphabet().size();
    for (int q = 0; q < aut.num_states(); ++q) {
        for (std::size_t l = 0; l < letters; ++l) {
            int hits = 0;
            int target = -1;
            for (const auto& e : aut.edges(q))
                if (e.guard.matches(static_cast<LetterMask>(l))) {
                    ++hits;
                    target = e.target;
                }
            if (hits != 1)
                throw SemanticError("state q" + std::to_string(q) + " has " + std::to_string(hits) +
                                    " enabled edges for letter " + std::to_string(l));
            if (aut.marked(q) && target != q)
                throw SemanticError("marked state q" + std::to_string(q) + " is not absorbing");
        }
    }
}

} // namespace hyperplan
