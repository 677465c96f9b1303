#include "hyperplan/pddl.hpp"

#include "hyperplan/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hyperplan {

namespace {

using nlohmann::json;

std::string move_name(const JointAction& dirs, const std::vector<std::string>& directions)
{
    std::string out = "move";
    for (int d : dirs)
        out += "-" + mangle(directions.at(d));
    return out;
}

std::string path_object(const std::string& p) { return "path-" + mangle(p); }
std::string location_object(const std::string& p, const std::string& l) { return "loc-" + mangle(p) + "-" + mangle(l); }
std::string state_object(int q) { return "q-" + std::to_string(q); }

std::vector<std::string> flag_names(Variant v)
{
    if (v == Variant::Safe)
        return {"win", "lose", "alive"};
    return {"accept"};
}

std::string atom_text(const FactoredEncoding& fe, int fluent)
{
    const int core = fe.num_paths() * fe.num_locations();
    if (fluent < core) {
        const auto& p = fe.paths[fluent / fe.num_locations()];
        return "(at " + path_object(p) + " " + location_object(p, fe.locations[fluent % fe.num_locations()]) + ")";
    }
    if (fluent < fe.num_core_fluents())
        return "(autstate " + state_object(fluent - core) + ")";
    return "(" + flag_names(fe.variant).at(fluent - fe.num_core_fluents()) + ")";
}

// Atom text per fluent id.
using AtomTable = std::vector<std::string>;

AtomTable atom_table(const FactoredEncoding& fe)
{
    AtomTable t;
    for (int fl = 0; fl < fe.num_fluents(); ++fl)
        t.push_back(atom_text(fe, fl));
    return t;
}

void write_effect(std::ostringstream& out, const AtomTable& atoms, const CondEffect& e, const std::string& indent)
{
    std::vector<std::string> lits;
    for (int fl : e.del)
        lits.push_back("(not " + atoms[fl] + ")");
    for (int fl : e.add)
        lits.push_back(atoms[fl]);
    if (e.when.empty()) {
        for (const auto& l : lits)
            out << indent << l << "\n";
        return;
    }
    out << indent << "(when ";
    if (e.when.size() == 1) {
        out << atoms[e.when.front()];
    } else {
        out << "(and";
        for (int fl : e.when)
            out << " " << atoms[fl];
        out << ")";
    }
    out << (lits.size() == 1 ? " " : " (and");
    for (std::size_t i = 0; i < lits.size(); ++i)
        out << (lits.size() == 1 ? "" : " ") << lits[i];
    out << (lits.size() == 1 ? ")\n" : "))\n");
}

void write_outcome(std::ostringstream& out, const AtomTable& atoms, const std::vector<CondEffect>& outcome,
                   const std::string& indent)
{
    if (outcome.empty()) {
        out << indent << "(and)\n";
        return;
    }
    out << indent << "(and\n";
    for (const auto& e : outcome)
        write_effect(out, atoms, e, indent + "  ");
    out << indent << ")\n";
}

} // namespace

PddlDocuments emit_pddl(const FactoredEncoding& fe, PrefixClass cls)
{
    if (cls != PrefixClass::ExistsOnly && cls != PrefixClass::ForallExists)
        throw UnsupportedError(std::string("PDDL emission needs an exists-only or forall-exists prefix, got ") +
                               name(cls));
    const bool nondet = std::any_of(fe.actions.begin(), fe.actions.end(),
                                    [](const FactoredAction& a) { return a.outcomes.size() > 1; });
    json objects = json::object();
    auto claim = [&objects](const std::string& obj, json meaning) {
        if (objects.contains(obj))
            throw std::logic_error("PDDL name collision on " + obj);
        objects[obj] = std::move(meaning);
    };

    const AtomTable atoms = atom_table(fe);
    std::ostringstream d;
    d << "(define (domain hyperplan)\n";
    d << "  (:requirements :strips :typing :conditional-effects" << (nondet ? " :non-deterministic" : "") << ")\n";
    d << "  (:types pathvar location autstate)\n";
    d << "  (:constants\n   ";
    for (const auto& p : fe.paths) {
        d << " " << path_object(p);
        claim(path_object(p), {{"kind", "path"}, {"path", p}});
    }
    d << " - pathvar\n   ";
    for (const auto& p : fe.paths)
        for (const auto& l : fe.locations) {
            d << " " << location_object(p, l);
            claim(location_object(p, l), {{"kind", "location"}, {"path", p}, {"location", l}});
        }
    d << " - location\n   ";
    for (int q = 0; q < fe.num_aut_states; ++q) {
        d << " " << state_object(q);
        claim(state_object(q), {{"kind", "state"}, {"state", q}});
    }
    d << " - autstate)\n";
    d << "  (:predicates\n    (at ?p - pathvar ?l - location)\n    (autstate ?q - autstate)\n";
    for (const auto& flag : flag_names(fe.variant))
        d << "    (" << flag << ")\n";
    d << "  )\n";

    json actions = json::object();
    for (const auto& act : fe.actions) {
        const std::string an = move_name(act.dirs, fe.directions);
        json dirs = json::array();
        for (int dir : act.dirs)
            dirs.push_back(fe.directions.at(dir));
        if (actions.contains(an))
            throw std::logic_error("PDDL name collision on " + an);
        actions[an] = dirs;
        d << "  (:action " << an << "\n    :parameters ()\n    :effect";
        if (act.outcomes.size() == 1) {
            d << "\n";
            write_outcome(d, atoms, act.outcomes.front(), "      ");
        } else {
            d << " (oneof\n";
            for (const auto& outcome : act.outcomes)
                write_outcome(d, atoms, outcome, "      ");
            d << "    )\n";
        }
        d << "  )\n";
    }
    d << ")\n";

    std::ostringstream p;
    p << "(define (problem instance)\n  (:domain hyperplan)\n  (:init\n";
    for (int fl : fe.init)
        p << "    " << atoms[fl] << "\n";
    p << "  )\n  (:goal " << atoms[fe.goal()] << ")\n)\n";

    json manifest{{"format", "hyperplan-pddl-manifest"},
                  {"version", 1},
                  {"variant", name(fe.variant)},
                  {"quantifiers", fe.quantifier_word},
                  {"paths", fe.paths},
                  {"locations", fe.locations},
                  {"directions", fe.directions},
                  {"automaton", {{"states", fe.num_aut_states}, {"marked", fe.marked}}},
                  {"flags", flag_names(fe.variant)},
                  {"objects", objects},
                  {"actions", actions}};
    return {d.str(), p.str(), manifest.dump(2) + "\n"};
}

namespace {

struct Sexp {
    bool list = false;
    std::string atom;
    std::vector<Sexp> items;
    std::size_t line = 1;
    std::size_t column = 1;

    bool is(std::string_view a) const { return !list && atom == a; }
    bool head(std::string_view a) const { return list && !items.empty() && items[0].is(a); }
    std::string where() const { return std::to_string(line) + ":" + std::to_string(column); }
};

// PDDL names are case-insensitive; atoms are lowercased on read.
class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    Sexp document()
    {
        skip();
        if (pos_ >= text_.size())
            throw ParseError("empty PDDL document", line_, column_);
        Sexp s = read();
        skip();
        if (pos_ < text_.size())
            throw ParseError("text after the closing parenthesis", line_, column_);
        return s;
    }

private:
    void advance()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    static bool space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }
    static bool delimiter(char c) { return c == '(' || c == ')' || c == ';' || space(c); }

    void skip()
    {
        while (pos_ < text_.size()) {
            if (text_[pos_] == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (space(text_[pos_])) {
                advance();
            } else {
                break;
            }
        }
    }

    Sexp read()
    {
        Sexp s;
        s.line = line_;
        s.column = column_;
        if (text_[pos_] == ')')
            throw ParseError("unbalanced ')'", line_, column_);
        if (text_[pos_] == '(') {
            s.list = true;
            advance();
            for (;;) {
                skip();
                if (pos_ >= text_.size())
                    throw ParseError("unbalanced '(' opened at " + s.where(), line_, column_);
                if (text_[pos_] == ')') {
                    advance();
                    return s;
                }
                s.items.push_back(read());
            }
        }
        // Tokens never contain newlines, so only the column moves.
        std::size_t end = pos_;
        while (end < text_.size() && !delimiter(text_[end]))
            ++end;
        s.atom.assign(text_.substr(pos_, end - pos_));
        for (char& c : s.atom)
            if (c >= 'A' && c <= 'Z')
                c = static_cast<char>(c - 'A' + 'a');
        column_ += end - pos_;
        pos_ = end;
        return s;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

[[noreturn]] void unsupported(const Sexp& s, const std::string& what)
{
    throw UnsupportedError("PDDL " + s.where() + ": unsupported construct: " + what);
}

// `a b - t c` as (name, type) pairs; untyped names get "object".
std::vector<std::pair<std::string, std::string>> typed_list(const std::vector<Sexp>& items, std::size_t from,
                                                            std::vector<std::string>& problems)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::vector<std::string> pending;
    for (std::size_t i = from; i < items.size(); ++i) {
        const Sexp& s = items[i];
        if (s.list) {
            problems.push_back(s.where() + ": expected a name in a typed list");
            continue;
        }
        if (s.atom == "-") {
            if (i + 1 >= items.size() || items[i + 1].list) {
                problems.push_back(s.where() + ": '-' without a type name");
                return out;
            }
            for (auto& n : pending)
                out.emplace_back(std::move(n), items[i + 1].atom);
            pending.clear();
            ++i;
            continue;
        }
        pending.push_back(s.atom);
    }
    for (auto& n : pending)
        out.emplace_back(std::move(n), "object");
    return out;
}

struct Signature {
    std::set<std::string> types{"object"};
    std::map<std::string, std::string> objects;
    std::map<std::string, std::vector<std::string>> predicates;
};

class Checker {
public:
    std::vector<std::string> problems;

    void domain(const Sexp& root)
    {
        if (!root.head("define") || root.items.size() < 2 || !root.items[1].head("domain")) {
            problems.push_back(root.where() + ": domain must start with (define (domain <name>)");
            return;
        }
        if (root.items[1].items.size() == 2)
            domain_name_ = root.items[1].items[1].atom;
        std::vector<const Sexp*> actions;
        for (std::size_t i = 2; i < root.items.size(); ++i) {
            const Sexp& sec = root.items[i];
            if (sec.head(":requirements"))
                continue;
            if (sec.head(":types")) {
                for (auto& [n, t] : typed_list(sec.items, 1, problems)) {
                    sig_.types.insert(n);
                    if (t != "object")
                        sig_.types.insert(t);
                }
            } else if (sec.head(":constants")) {
                declare_objects(sec);
            } else if (sec.head(":predicates")) {
                for (std::size_t k = 1; k < sec.items.size(); ++k) {
                    const Sexp& pd = sec.items[k];
                    if (!pd.list || pd.items.empty() || pd.items[0].list) {
                        problems.push_back(pd.where() + ": malformed predicate declaration");
                        continue;
                    }
                    std::vector<std::string> types;
                    for (auto& [v, t] : typed_list(pd.items, 1, problems)) {
                        if (v.empty() || v[0] != '?')
                            problems.push_back(pd.where() + ": predicate parameter " + v + " must start with '?'");
                        need_type(t, pd);
                        types.push_back(t);
                    }
                    if (!sig_.predicates.emplace(pd.items[0].atom, types).second)
                        problems.push_back(pd.where() + ": predicate " + pd.items[0].atom + " declared twice");
                }
            } else if (sec.head(":action")) {
                actions.push_back(&sec);
            } else {
                problems.push_back(sec.where() + ": unsupported domain section");
            }
        }
        for (const Sexp* a : actions)
            action(*a);
    }

    void problem(const Sexp& root)
    {
        if (!root.head("define") || root.items.size() < 2 || !root.items[1].head("problem")) {
            problems.push_back(root.where() + ": problem must start with (define (problem <name>)");
            return;
        }
        bool goal = false;
        for (std::size_t i = 2; i < root.items.size(); ++i) {
            const Sexp& sec = root.items[i];
            if (sec.head(":domain")) {
                if (sec.items.size() != 2 || sec.items[1].atom != domain_name_)
                    problems.push_back(sec.where() + ": problem refers to a different domain");
            } else if (sec.head(":objects")) {
                declare_objects(sec);
            } else if (sec.head(":init")) {
                for (std::size_t k = 1; k < sec.items.size(); ++k)
                    atom(sec.items[k], {});
            } else if (sec.head(":goal")) {
                goal = true;
                if (sec.items.size() != 2)
                    problems.push_back(sec.where() + ": :goal takes one formula");
                else
                    condition(sec.items[1], {});
            } else {
                problems.push_back(sec.where() + ": unsupported problem section");
            }
        }
        if (!goal)
            problems.push_back(root.where() + ": problem has no :goal");
    }

private:
    using Params = std::map<std::string, std::string>;

    void need_type(const std::string& t, const Sexp& at)
    {
        if (!sig_.types.count(t))
            problems.push_back(at.where() + ": undeclared type " + t);
    }

    void declare_objects(const Sexp& sec)
    {
        for (auto& [n, t] : typed_list(sec.items, 1, problems)) {
            need_type(t, sec);
            if (!sig_.objects.emplace(n, t).second)
                problems.push_back(sec.where() + ": object " + n + " declared twice");
        }
    }

    void action(const Sexp& a)
    {
        if (a.items.size() < 2 || a.items[1].list) {
            problems.push_back(a.where() + ": action without a name");
            return;
        }
        Params params;
        for (std::size_t i = 2; i + 1 < a.items.size(); i += 2) {
            const Sexp& key = a.items[i];
            const Sexp& val = a.items[i + 1];
            if (key.is(":parameters")) {
                if (!val.list) {
                    problems.push_back(val.where() + ": :parameters must be a list");
                    continue;
                }
                for (auto& [v, t] : typed_list(val.items, 0, problems)) {
                    need_type(t, val);
                    params[v] = t;
                }
            } else if (key.is(":precondition")) {
                condition(val, params);
            } else if (key.is(":effect")) {
                effect(val, params);
            } else {
                problems.push_back(key.where() + ": unknown action field " + key.atom);
            }
        }
        if (a.items.size() % 2 != 0)
            problems.push_back(a.where() + ": action fields must come in key/value pairs");
    }

    void condition(const Sexp& c, const Params& params)
    {
        if (c.head("and") || c.head("or")) {
            for (std::size_t i = 1; i < c.items.size(); ++i)
                condition(c.items[i], params);
        } else if (c.head("not")) {
            if (c.items.size() != 2)
                problems.push_back(c.where() + ": not takes one argument");
            else
                condition(c.items[1], params);
        } else {
            atom(c, params);
        }
    }

    void effect(const Sexp& e, const Params& params)
    {
        if (e.head("and") || e.head("oneof")) {
            for (std::size_t i = 1; i < e.items.size(); ++i)
                effect(e.items[i], params);
        } else if (e.head("when")) {
            if (e.items.size() != 3) {
                problems.push_back(e.where() + ": when takes a condition and an effect");
                return;
            }
            condition(e.items[1], params);
            effect(e.items[2], params);
        } else if (e.head("not")) {
            if (e.items.size() != 2)
                problems.push_back(e.where() + ": not takes one argument");
            else
                atom(e.items[1], params);
        } else {
            atom(e, params);
        }
    }

    void atom(const Sexp& a, const Params& params)
    {
        if (!a.list || a.items.empty() || a.items[0].list) {
            problems.push_back(a.where() + ": expected an atom");
            return;
        }
        auto it = sig_.predicates.find(a.items[0].atom);
        if (it == sig_.predicates.end()) {
            problems.push_back(a.where() + ": undeclared predicate " + a.items[0].atom);
            return;
        }
        const auto& types = it->second;
        if (a.items.size() - 1 != types.size()) {
            problems.push_back(a.where() + ": " + it->first + " takes " + std::to_string(types.size()) +
                               " arguments, got " + std::to_string(a.items.size() - 1));
            return;
        }
        for (std::size_t i = 0; i < types.size(); ++i) {
            const Sexp& arg = a.items[i + 1];
            std::optional<std::string> type;
            if (!arg.list && !arg.atom.empty() && arg.atom[0] == '?') {
                if (auto p = params.find(arg.atom); p != params.end())
                    type = p->second;
            } else if (!arg.list) {
                if (auto o = sig_.objects.find(arg.atom); o != sig_.objects.end())
                    type = o->second;
            }
            if (!type)
                problems.push_back(arg.where() + ": undeclared object or parameter " + (arg.list ? "(...)" : arg.atom));
            else if (types[i] != "object" && *type != types[i])
                problems.push_back(arg.where() + ": " + arg.atom + " has type " + *type + ", expected " + types[i]);
        }
    }

    Signature sig_;
    std::string domain_name_;
};

// Resolves PDDL names through the manifest into fluent ids and actions.
class Resolver {
public:
    Resolver(const json& manifest, FactoredEncoding& fe) : fe_(fe)
    {
        try {
            if (manifest.at("format") != "hyperplan-pddl-manifest" || manifest.at("version") != 1)
                throw SemanticError("not a hyperplan PDDL manifest");
            const std::string variant = manifest.at("variant");
            if (variant != name(Variant::Safe) && variant != name(Variant::Reach))
                throw SemanticError("manifest variant '" + variant + "' is unknown");
            fe.variant = variant == name(Variant::Safe) ? Variant::Safe : Variant::Reach;
            fe.quantifier_word = manifest.at("quantifiers");
            fe.paths = manifest.at("paths").get<std::vector<std::string>>();
            fe.locations = manifest.at("locations").get<std::vector<std::string>>();
            fe.directions = manifest.at("directions").get<std::vector<std::string>>();
            fe.num_aut_states = manifest.at("automaton").at("states");
            fe.marked = manifest.at("automaton").at("marked").get<std::vector<int>>();
            for (const auto& [obj, meaning] : manifest.at("objects").items())
                objects_[obj] = meaning;
            for (const auto& [act, dirs] : manifest.at("actions").items()) {
                JointAction a;
                for (const auto& dn : dirs) {
                    auto it = std::find(fe.directions.begin(), fe.directions.end(), dn.get<std::string>());
                    if (it == fe.directions.end())
                        throw SemanticError("manifest action " + act + " uses unknown direction " + dn.dump());
                    a.push_back(static_cast<int>(it - fe.directions.begin()));
                }
                actions_[act] = a;
            }
        } catch (const json::exception& e) {
            throw SemanticError(std::string("malformed PDDL manifest: ") + e.what());
        }
        std::sort(fe.marked.begin(), fe.marked.end());
        flags_ = flag_names(fe.variant);
    }

    int fluent(const Sexp& a) const
    {
        if (!a.list || a.items.empty() || a.items[0].list)
            unsupported(a, "expected an atom");
        std::string key;
        for (const auto& arg : a.items) {
            if (arg.list)
                unsupported(arg, "nested term");
            key += arg.atom;
            key += ' ';
        }
        if (auto it = resolved_.find(key); it != resolved_.end())
            return it->second;
        const int id = resolve(a);
        resolved_.emplace(std::move(key), id);
        return id;
    }

    const JointAction& action(const Sexp& n) const
    {
        auto it = actions_.find(n.atom);
        if (n.list || it == actions_.end())
            throw SemanticError("PDDL " + n.where() + ": action " + n.atom + " is not in the manifest");
        return it->second;
    }

    std::size_t num_actions() const { return actions_.size(); }

private:
    int resolve(const Sexp& a) const
    {
        const std::string& pred = a.items[0].atom;
        if (pred == "at" && a.items.size() == 3) {
            const json& p = object(a.items[1], "path");
            const json& l = object(a.items[2], "location");
            if (l.at("path") != p.at("path"))
                throw SemanticError("PDDL " + a.where() + ": location object belongs to another path");
            return fe_.at(index_of(fe_.paths, p.at("path"), a) + 1, index_of(fe_.locations, l.at("location"), a));
        }
        if (pred == "autstate" && a.items.size() == 2) {
            int q = object(a.items[1], "state").at("state");
            if (q < 0 || q >= fe_.num_aut_states)
                throw SemanticError("PDDL " + a.where() + ": automaton state out of range");
            return fe_.autstate(q);
        }
        if (a.items.size() == 1)
            for (std::size_t i = 0; i < flags_.size(); ++i)
                if (flags_[i] == pred)
                    return fe_.num_core_fluents() + static_cast<int>(i);
        throw SemanticError("PDDL " + a.where() + ": atom (" + pred + " ...) is not a fluent of this encoding");
    }

    const json& object(const Sexp& s, const char* kind) const
    {
        auto it = objects_.find(s.atom);
        if (it == objects_.end() || it->second.value("kind", "") != kind)
            throw SemanticError("PDDL " + s.where() + ": " + s.atom + " is not a " + kind + " object");
        return it->second;
    }

    static int index_of(const std::vector<std::string>& names, const json& v, const Sexp& at)
    {
        auto it = std::find(names.begin(), names.end(), v.get<std::string>());
        if (it == names.end())
            throw SemanticError("PDDL " + at.where() + ": manifest names an unknown " + v.dump());
        return static_cast<int>(it - names.begin());
    }

    FactoredEncoding& fe_;
    std::map<std::string, json> objects_;
    std::map<std::string, JointAction> actions_;
    std::vector<std::string> flags_;
    // Atom text to fluent id; only successful resolutions are stored.
    mutable std::unordered_map<std::string, int> resolved_;
};

void normalize(std::vector<int>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<int> atoms_of(const Sexp& s, const Resolver& r)
{
    std::vector<int> out;
    if (s.head("and")) {
        for (std::size_t i = 1; i < s.items.size(); ++i)
            out.push_back(r.fluent(s.items[i]));
    } else {
        out.push_back(r.fluent(s));
    }
    normalize(out);
    return out;
}

// literal := atom | (not atom); returns false for deletes.
bool literal(const Sexp& s, const Resolver& r, int& fluent)
{
    if (s.head("not")) {
        if (s.items.size() != 2)
            unsupported(s, "not with more than one argument");
        fluent = r.fluent(s.items[1]);
        return false;
    }
    if (s.head("and") || s.head("or") || s.head("oneof") || s.head("when") || s.head("forall") ||
        s.head("exists") || s.head("imply"))
        unsupported(s, s.items[0].atom + " in literal position");
    fluent = r.fluent(s);
    return true;
}

std::vector<CondEffect> outcome(const Sexp& s, const Resolver& r)
{
    std::vector<const Sexp*> parts;
    if (s.head("and")) {
        for (std::size_t i = 1; i < s.items.size(); ++i)
            parts.push_back(&s.items[i]);
    } else {
        parts.push_back(&s);
    }
    std::vector<CondEffect> out;
    for (const Sexp* p : parts) {
        CondEffect e;
        const Sexp* body = p;
        if (p->head("when")) {
            if (p->items.size() != 3)
                unsupported(*p, "malformed when");
            e.when = atoms_of(p->items[1], r);
            body = &p->items[2];
        } else if (p->head("oneof")) {
            unsupported(*p, "oneof below the top of an effect");
        }
        std::vector<const Sexp*> lits;
        if (body->head("and")) {
            for (std::size_t i = 1; i < body->items.size(); ++i)
                lits.push_back(&body->items[i]);
        } else {
            lits.push_back(body);
        }
        for (const Sexp* l : lits) {
            int fl = 0;
            (literal(*l, r, fl) ? e.add : e.del).push_back(fl);
        }
        normalize(e.add);
        normalize(e.del);
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace

FactoredEncoding parse_pddl(const PddlDocuments& docs)
{
    json manifest;
    try {
        manifest = json::parse(docs.manifest);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("PDDL manifest: ") + e.what(), 1, e.byte);
    }
    FactoredEncoding fe;
    const Resolver r(manifest, fe);

    const Sexp dom = Reader(docs.domain).document();
    if (!dom.head("define") || dom.items.size() < 2 || !dom.items[1].head("domain"))
        unsupported(dom, "domain document must be (define (domain <name>) ...)");
    std::set<JointAction> seen;
    for (std::size_t i = 2; i < dom.items.size(); ++i) {
        const Sexp& sec = dom.items[i];
        if (sec.head(":requirements") || sec.head(":types") || sec.head(":constants") || sec.head(":predicates"))
            continue;
        if (!sec.head(":action"))
            unsupported(sec, "domain section");
        if (sec.items.size() < 2)
            unsupported(sec, "action without a name");
        FactoredAction act;
        act.dirs = r.action(sec.items[1]);
        if (!seen.insert(act.dirs).second)
            throw SemanticError("PDDL " + sec.where() + ": action " + sec.items[1].atom + " defined twice");
        bool has_effect = false;
        for (std::size_t k = 2; k + 1 < sec.items.size(); k += 2) {
            const Sexp& key = sec.items[k];
            const Sexp& val = sec.items[k + 1];
            if (key.is(":parameters")) {
                if (!val.list || !val.items.empty())
                    unsupported(val, "action parameters");
            } else if (key.is(":precondition")) {
                if (!val.head("and") || val.items.size() != 1)
                    unsupported(val, "non-empty precondition");
            } else if (key.is(":effect")) {
                has_effect = true;
                if (val.head("oneof")) {
                    for (std::size_t b = 1; b < val.items.size(); ++b)
                        act.outcomes.push_back(outcome(val.items[b], r));
                    if (act.outcomes.empty())
                        unsupported(val, "empty oneof");
                } else {
                    act.outcomes.push_back(outcome(val, r));
                }
            } else {
                unsupported(key, "action field " + key.atom);
            }
        }
        if (sec.items.size() % 2 != 0)
            unsupported(sec, "unpaired action field");
        if (!has_effect)
            act.outcomes.push_back({});
        fe.actions.push_back(std::move(act));
    }
    if (fe.actions.size() != r.num_actions())
        throw SemanticError("PDDL domain defines " + std::to_string(fe.actions.size()) + " actions, manifest lists " +
                            std::to_string(r.num_actions()));
    std::sort(fe.actions.begin(), fe.actions.end(),
              [](const FactoredAction& a, const FactoredAction& b) { return a.dirs < b.dirs; });

    const Sexp prob = Reader(docs.problem).document();
    if (!prob.head("define") || prob.items.size() < 2 || !prob.items[1].head("problem"))
        unsupported(prob, "problem document must be (define (problem <name>) ...)");
    bool goal = false;
    for (std::size_t i = 2; i < prob.items.size(); ++i) {
        const Sexp& sec = prob.items[i];
        if (sec.head(":domain"))
            continue;
        if (sec.head(":init")) {
            for (std::size_t k = 1; k < sec.items.size(); ++k)
                fe.init.push_back(r.fluent(sec.items[k]));
        } else if (sec.head(":goal")) {
            if (sec.items.size() != 2 || r.fluent(sec.items[1]) != fe.goal())
                unsupported(sec, "goal other than the variant's goal flag");
            goal = true;
        } else {
            unsupported(sec, "problem section");
        }
    }
    if (!goal)
        unsupported(prob, "problem without a goal");
    normalize(fe.init);
    return fe;
}

GroundedStructure ground_pddl(const PddlDocuments& docs, std::size_t max_states)
{
    return ground_factored(parse_pddl(docs), max_states);
}

std::vector<std::string> pddl_problems(std::string_view domain, std::string_view problem)
{
    Checker c;
    try {
        c.domain(Reader(domain).document());
    } catch (const ParseError& e) {
        return {std::string("domain: ") + e.what()};
    }
    try {
        c.problem(Reader(problem).document());
    } catch (const ParseError& e) {
        c.problems.push_back(std::string("problem: ") + e.what());
    }
    return c.problems;
}

Controller ingest_policy(std::string_view controller_json, const PddlDocuments& docs, const TransitionSystem& ts,
                         const HyperFormula& f)
{
    json manifest;
    try {
        manifest = json::parse(docs.manifest);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("PDDL manifest: ") + e.what(), 1, e.byte);
    }
    std::vector<std::string> paths;
    for (int p = 1; p <= f.num_paths(); ++p)
        paths.push_back(f.var_name(p));
    if (manifest.value("paths", json::array()) != json(paths) ||
        manifest.value("locations", json::array()) != json(ts.locations()) ||
        manifest.value("directions", json::array()) != json(ts.directions()))
        throw SemanticError("PDDL manifest does not describe this system and formula");
    const json actions = manifest.value("actions", json::object());
    Controller c = controller_from_json(controller_json, ts, f);
    for (std::size_t i = 0; i < c.nodes.size(); ++i)
        if (c.nodes[i].action && !actions.contains(action_name(*c.nodes[i].action, ts)))
            throw SemanticError("controller node " + std::to_string(i) + " uses action " +
                                action_name(*c.nodes[i].action, ts) + ", which the manifest does not list");
    return c;
}

} // namespace hyperplan
