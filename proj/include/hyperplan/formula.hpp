#pragma once

#include <compare>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hyperplan {

enum class Quantifier { Forall, Exists };

/// A quantified path name and its 1-based position in the prefix.
struct PathVar {
    std::string name;
    int index = 0;
};

enum class Op { True, False, Atom, Not, And, Or, Implies, Iff, Next, Until, Eventually, Globally };

struct Body;
using BodyPtr = std::shared_ptr<const Body>;

/// LTL body node. `atom`/`var` are set for Atom only (`var` is the 1-based
/// path index); `lhs` holds the operand of unary nodes.
struct Body {
    Op op = Op::True;
    std::string atom;
    int var = 0;
    BodyPtr lhs;
    BodyPtr rhs;
};

namespace ltl {
BodyPtr tt();
BodyPtr ff();
BodyPtr atom(std::string name, int var);
BodyPtr neg(BodyPtr a);
BodyPtr conj(BodyPtr a, BodyPtr b);
BodyPtr disj(BodyPtr a, BodyPtr b);
BodyPtr implies(BodyPtr a, BodyPtr b);
BodyPtr iff(BodyPtr a, BodyPtr b);
BodyPtr next(BodyPtr a);
BodyPtr until(BodyPtr a, BodyPtr b);
BodyPtr eventually(BodyPtr a);
BodyPtr globally(BodyPtr a);
} // namespace ltl

bool structurally_equal(const Body& a, const Body& b);
int depth(const Body& b);

struct QuantifiedVar {
    Quantifier quantifier;
    PathVar var;
};

class HyperFormula {
public:
    HyperFormula(std::vector<QuantifiedVar> prefix, BodyPtr body);

    const std::vector<QuantifiedVar>& prefix() const { return prefix_; }
    const Body& body() const { return *body_; }
    const BodyPtr& body_ptr() const { return body_; }

    int num_paths() const { return static_cast<int>(prefix_.size()); }
    Quantifier quantifier(int index) const { return prefix_[index - 1].quantifier; }
    const std::string& var_name(int index) const { return prefix_[index - 1].var.name; }
    /// 1-based indices of existential / universal variables in prefix order.
    std::vector<int> existential_vars() const;
    std::vector<int> universal_vars() const;
    /// Quantifier word such as "AE" (A = forall, E = exists).
    std::string quantifier_word() const;

private:
    std::vector<QuantifiedVar> prefix_;
    BodyPtr body_;
};

/// Parses `forall p. exists q. <body>`; body syntax uses `a_p` atoms and
/// `! & | -> <-> X U F G true false` with the usual precedence (unary binds
/// tightest, then U which is right-associative, then &, |, and finally the
/// right-associative -> and <->).
HyperFormula parse_formula(std::string_view text);

/// Prints in the syntax accepted by parse_formula, fully parenthesised.
std::string to_string(const HyperFormula& f);
std::string to_string(const Body& b, const HyperFormula& f);

/// Dual quantifiers, negated body.
HyperFormula negate(const HyperFormula& f);

enum class PrefixClass { ExistsOnly, ForallExists, ForallExistsForall, General };
enum class BodyClass { Reachability, Safety, Neither };

const char* name(PrefixClass c);
const char* name(BodyClass c);

PrefixClass classify_prefix(const HyperFormula& f);
/// Same classification on a quantifier word such as "AEA".
PrefixClass classify_word(std::string_view word);

/// Temporal-operator fragment tests on the negation normal form.
bool in_reachability_fragment(const Body& b);
bool in_safety_fragment(const Body& b);
/// Reachability wins over Safety for bodies in both fragments (temporal-free
/// and X-only bodies).
BodyClass classify_body(const Body& b);

/// (atom, path index) pair; letters are sets of these.
struct IndexedAtom {
    std::string atom;
    int var = 0;
    auto operator<=>(const IndexedAtom&) const = default;
};
using Letter = std::set<IndexedAtom>;

/// Indexed atoms occurring in the body, sorted by (var, atom).
std::vector<IndexedAtom> indexed_atoms(const Body& b);

} // namespace hyperplan
