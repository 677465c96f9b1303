#include "hyperplan/semantics.hpp"

#include "hyperplan/errors.hpp"

namespace hyperplan {

const char* name(Truth t)
{
    switch (t) {
    case Truth::False: return "False";
    case Truth::True: return "True";
    case Truth::Unknown: return "Unknown";
    }
    return "?";
}

namespace {

Truth k_not(Truth a)
{
    if (a == Truth::Unknown)
        return a;
    return a == Truth::True ? Truth::False : Truth::True;
}

Truth k_and(Truth a, Truth b)
{
    if (a == Truth::False || b == Truth::False)
        return Truth::False;
    if (a == Truth::True && b == Truth::True)
        return Truth::True;
    return Truth::Unknown;
}

Truth k_or(Truth a, Truth b) { return k_not(k_and(k_not(a), k_not(b))); }

// Values of `b` at positions 0..k, where index k stands for every position past
// the end of the word (all atoms unknown there, so the value is position
// independent).
std::vector<Truth> eval_positions(const Body& b, std::span<const Letter> word)
{
    const std::size_t k = word.size();
    std::vector<Truth> v(k + 1, Truth::Unknown);
    switch (b.op) {
    case Op::True: std::fill(v.begin(), v.end(), Truth::True); break;
    case Op::False: std::fill(v.begin(), v.end(), Truth::False); break;
    case Op::Atom:
        for (std::size_t j = 0; j < k; ++j)
            v[j] = word[j].count(IndexedAtom{b.atom, b.var}) ? Truth::True : Truth::False;
        v[k] = Truth::Unknown;
        break;
    case Op::Not: {
        auto a = eval_positions(*b.lhs, word);
        for (std::size_t j = 0; j <= k; ++j)
            v[j] = k_not(a[j]);
        break;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Iff: {
        auto a = eval_positions(*b.lhs, word);
        auto c = eval_positions(*b.rhs, word);
        for (std::size_t j = 0; j <= k; ++j) {
            switch (b.op) {
            case Op::And: v[j] = k_and(a[j], c[j]); break;
            case Op::Or: v[j] = k_or(a[j], c[j]); break;
            case Op::Implies: v[j] = k_or(k_not(a[j]), c[j]); break;
            default: v[j] = k_or(k_and(a[j], c[j]), k_and(k_not(a[j]), k_not(c[j]))); break;
            }
        }
        break;
    }
    case Op::Next: {
        auto a = eval_positions(*b.lhs, word);
        for (std::size_t j = 0; j < k; ++j)
            v[j] = a[j + 1];
        v[k] = a[k];
        break;
    }
    case Op::Eventually:
    case Op::Globally: {
        auto a = eval_positions(*b.lhs, word);
        v[k] = a[k];
        for (std::size_t j = k; j-- > 0;)
            v[j] = b.op == Op::Eventually ? k_or(a[j], v[j + 1]) : k_and(a[j], v[j + 1]);
        break;
    }
    case Op::Until: {
        auto a = eval_positions(*b.lhs, word);
        auto c = eval_positions(*b.rhs, word);
        v[k] = c[k];
        for (std::size_t j = k; j-- > 0;)
            v[j] = k_or(c[j], k_and(a[j], v[j + 1]));
        break;
    }
    }
    return v;
}

} // namespace

Truth eval_word_bounded(const Body& body, std::span<const Letter> word) { return eval_positions(body, word)[0]; }

Letter letter_of(const TransitionSystem& ts, std::span<const int> locations)
{
    Letter letter;
    for (std::size_t i = 0; i < locations.size(); ++i)
        for (int a : ts.label(locations[i]))
            letter.insert(IndexedAtom{ts.atoms()[a], static_cast<int>(i) + 1});
    return letter;
}

Truth eval_prefix_bounded(const TransitionSystem& ts, const PathAssignment& assignment, const Body& body)
{
    if (assignment.empty())
        throw SemanticError("empty path assignment");
    const std::size_t len = assignment.begin()->second.size();
    if (len == 0)
        throw SemanticError("assigned prefixes must be non-empty");
    for (const auto& [var, seq] : assignment) {
        if (seq.size() != len)
            throw SemanticError("assigned prefixes differ in length");
        for (int l : seq)
            if (l < 0 || l >= ts.num_locations())
                throw SemanticError("assigned prefix contains an unknown location");
    }
    for (const auto& ia : indexed_atoms(body)) {
        if (!assignment.count(ia.var))
            throw SemanticError("path variable " + std::to_string(ia.var) + " is not assigned");
    }

    std::vector<Letter> word(len);
    for (std::size_t j = 0; j < len; ++j)
        for (const auto& [var, seq] : assignment)
            for (int a : ts.label(seq[j]))
                word[j].insert(IndexedAtom{ts.atoms()[a], var});
    return eval_word_bounded(body, word);
}

} // namespace hyperplan
