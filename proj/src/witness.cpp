#include "hyperplan/witness.hpp"

#include "hyperplan/encoding.hpp"
#include "hyperplan/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace hyperplan {

const char* name(Validation::Status s)
{
    switch (s) {
    case Validation::Status::Validated: return "Validated";
    case Validation::Status::Violation: return "Violation";
    case Validation::Status::Indeterminate: return "Indeterminate";
    }
    return "?";
}

SkolemWitness::SkolemWitness(TransitionSystem ts, HyperFormula f, Controller c)
    : ts_(std::move(ts)), f_(std::move(f)), c_(std::move(c)), existential_(f_.existential_vars()),
      universal_(f_.universal_vars())
{
}

namespace {

Observation observation(const std::vector<int>& locs, int observer)
{
    return {Observation::Kind::Locations, std::vector<int>(locs.begin(), locs.begin() + observer)};
}

} // namespace

WitnessRun SkolemWitness::run(const std::vector<std::vector<int>>& universal) const
{
    WitnessRun r;
    std::vector<int> locs(f_.num_paths(), ts_.initial());
    int node = c_.start;
    r.locations.push_back(locs);
    for (std::size_t k = 0; k < universal.size(); ++k) {
        if (universal[k].size() != universal_.size())
            throw SemanticError("step " + std::to_string(k) + " needs one direction per universal variable");
        const auto& action = c_.nodes.at(node).action;
        JointAction act = action ? *action : JointAction(existential_.size(), 0);
        std::vector<int> next = locs;
        for (std::size_t i = 0; i < universal_.size(); ++i)
            next[universal_[i] - 1] = ts_.next(locs[universal_[i] - 1], universal[k][i]);
        for (std::size_t i = 0; i < existential_.size(); ++i)
            next[existential_[i] - 1] = ts_.next(locs[existential_[i] - 1], act[i]);
        r.actions.push_back(act);
        r.nodes.push_back(node);
        if (action) {
            auto to = c_.next(node, observation(next, c_.observer));
            if (!to) {
                r.undefined_at = static_cast<int>(k) + 1;
                return r;
            }
            node = *to;
        }
        locs = std::move(next);
        r.locations.push_back(locs);
    }
    return r;
}

std::vector<int> SkolemWitness::xi(int path, const std::vector<std::vector<int>>& earlier, int steps) const
{
    if (path < 1 || path > f_.num_paths() || f_.quantifier(path) != Quantifier::Exists)
        throw SemanticError("xi is defined for existential paths only");
    std::size_t before = 0;
    while (before < universal_.size() && universal_[before] < path)
        ++before;
    if (earlier.size() != before)
        throw SemanticError("xi for path " + f_.var_name(path) + " takes " + std::to_string(before) +
                            " universal sequences");
    std::vector<std::vector<int>> universal(steps, std::vector<int>(universal_.size(), 0));
    for (std::size_t j = 0; j < before; ++j) {
        if (static_cast<int>(earlier[j].size()) < steps)
            throw SemanticError("universal sequence shorter than the requested steps");
        for (int k = 0; k < steps; ++k)
            universal[k][j] = earlier[j][k];
    }
    std::vector<int> out;
    for (const auto& row : run(universal).locations)
        out.push_back(row[path - 1]);
    return out;
}

SkolemWitness extract_skolem(const Controller& c, const HyperFormula& f, const TransitionSystem& ts)
{
    const auto ex = f.existential_vars();
    const int observer = ex.empty() ? f.num_paths() : ex.back();
    if (c.observer != observer)
        throw SemanticError("controller observes " + std::to_string(c.observer) + " paths, the formula needs " +
                            std::to_string(observer));
    if (c.nodes.empty() || c.start < 0 || c.start >= static_cast<int>(c.nodes.size()))
        throw SemanticError("controller has no valid start node");
    for (const auto& node : c.nodes) {
        if (node.action) {
            if (node.action->size() != ex.size())
                throw SemanticError("controller action arity differs from the number of existential paths");
            for (int d : *node.action)
                if (d < 0 || d >= ts.num_directions())
                    throw SemanticError("controller action uses an unknown direction");
        }
        for (const auto& e : node.edges) {
            if (e.to < 0 || e.to >= static_cast<int>(c.nodes.size()))
                throw SemanticError("controller edge target out of range");
            for (int l : e.obs.locs)
                if (l < 0 || l >= ts.num_locations())
                    throw SemanticError("controller observation uses an unknown location");
        }
    }
    return SkolemWitness(ts, f, c);
}

namespace {

class Enumerator {
public:
    Enumerator(const SkolemWitness& w, const DetAutomaton& aut, const ValidationOptions& o)
        : w_(w), aut_(aut), o_(o), letters_(w.system(), aut, w.formula().num_paths()),
          existential_(w.formula().existential_vars()), universal_(w.formula().universal_vars()),
          reach_(aut.kind() == AutomatonKind::Dfa)
    {
        depth_ = reach_ && o.horizon ? std::min(o.bound, *o.horizon) : o.bound;
        const int nd = w.system().num_directions();
        std::vector<std::vector<int>> tuples{{}};
        for (std::size_t i = 0; i < universal_.size(); ++i) {
            std::vector<std::vector<int>> next;
            for (const auto& t : tuples)
                for (int d = 0; d < nd; ++d) {
                    auto u = t;
                    u.push_back(d);
                    next.push_back(std::move(u));
                }
            tuples = std::move(next);
        }
        tuples_ = std::move(tuples);
    }

    Validation run()
    {
        const auto& ts = w_.system();
        std::vector<int> locs(w_.formula().num_paths(), ts.initial());
        const bool ok = visit(w_.controller().start, locs, aut_.initial(), 0);
        Validation v;
        v.explored = explored_;
        if (!ok) {
            v.status = Validation::Status::Violation;
            v.universal = violation_;
            v.step = step_;
            v.reason = reason_;
        } else if (open_) {
            v.status = Validation::Status::Indeterminate;
            v.reason = "some universal choices have not reached an accepting state after " + std::to_string(depth_) +
                       " steps";
        }
        return v;
    }

private:
    bool fail(int k, std::string why)
    {
        violation_.assign(path_.begin(), path_.begin() + k);
        step_ = k;
        reason_ = std::move(why);
        return false;
    }

    // False on the first violation below this configuration.
    bool visit(int node, const std::vector<int>& locs, int q, int k)
    {
        if (++explored_ > o_.work_budget)
            throw ResourceError("witness validation exceeds the work budget of " + std::to_string(o_.work_budget) +
                                " configurations");
        if (aut_.marked(q)) {
            if (reach_)
                return true;
            return fail(k, "the body's safety automaton reaches a losing state");
        }
        if (k == depth_) {
            if (reach_) {
                if (o_.horizon && *o_.horizon <= o_.bound)
                    return fail(k, "no accepting state within the plan horizon of " + std::to_string(*o_.horizon) +
                                       " steps");
                open_ = true;
            }
            return true;
        }
        const int remaining = depth_ - k;
        auto key = std::make_tuple(node, locs, q);
        if (auto it = memo_.find(key); it != memo_.end() && it->second >= remaining)
            return true;

        const auto& ts = w_.system();
        const auto& c = w_.controller();
        const auto& action = c.nodes.at(node).action;
        if (!action)
            return fail(k, "the controller stops in a non-accepting configuration");
        const int q2 = aut_.step(q, letters_.mask(locs));
        std::vector<int> next = locs;
        for (std::size_t i = 0; i < existential_.size(); ++i)
            next[existential_[i] - 1] = ts.next(locs[existential_[i] - 1], (*action)[i]);
        if (path_.size() <= static_cast<std::size_t>(k))
            path_.resize(k + 1);
        for (const auto& u : tuples_) {
            path_[k] = u;
            for (std::size_t i = 0; i < universal_.size(); ++i)
                next[universal_[i] - 1] = ts.next(locs[universal_[i] - 1], u[i]);
            int to = node;
            if (!aut_.marked(q2)) {
                auto edge = c.next(node, observation(next, c.observer));
                if (!edge)
                    return fail(k + 1, "witness undefined: the controller has no edge for this observation");
                to = *edge;
            }
            if (!visit(to, next, q2, k + 1))
                return false;
        }
        memo_[std::move(key)] = remaining;
        return true;
    }

    const SkolemWitness& w_;
    const DetAutomaton& aut_;
    const ValidationOptions& o_;
    LetterMap letters_;
    std::vector<int> existential_;
    std::vector<int> universal_;
    std::vector<std::vector<int>> tuples_;
    bool reach_;
    int depth_ = 0;
    bool open_ = false;
    std::size_t explored_ = 0;
    std::map<std::tuple<int, std::vector<int>, int>, int> memo_;
    std::vector<std::vector<int>> path_;
    std::vector<std::vector<int>> violation_;
    int step_ = 0;
    std::string reason_;
};

} // namespace

Validation validate_witness(const SkolemWitness& w, const DetAutomaton& aut, const ValidationOptions& options)
{
    if (options.bound < 1)
        throw SemanticError("validation bound must be at least 1");
    if (indexed_atoms(w.formula().body()) != aut.alphabet())
        throw SemanticError("automaton alphabet does not match the formula body");
    return Enumerator(w, aut, options).run();
}

std::string trace_table(const SkolemWitness& w, const DetAutomaton& aut,
                        const std::vector<std::vector<int>>& universal)
{
    const auto& ts = w.system();
    const auto& f = w.formula();
    const LetterMap letters(ts, aut, f.num_paths());
    const WitnessRun r = w.run(universal);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"step"};
    for (int p = 1; p <= f.num_paths(); ++p)
        header.push_back(f.var_name(p));
    header.push_back("letter");
    header.push_back("q");
    rows.push_back(header);
    int q = aut.initial();
    for (std::size_t k = 0; k < r.locations.size(); ++k) {
        const auto& locs = r.locations[k];
        std::vector<std::string> row{std::to_string(k)};
        for (int l : locs)
            row.push_back(ts.locations()[l]);
        const LetterMask mask = letters.mask(locs);
        std::string letter = "{";
        for (std::size_t i = 0; i < aut.alphabet().size(); ++i)
            if ((mask >> i) & 1U) {
                if (letter.size() > 1)
                    letter += ",";
                letter += aut.alphabet()[i].atom + "_" + f.var_name(aut.alphabet()[i].var);
            }
        row.push_back(letter + "}");
        row.push_back("q" + std::to_string(q) + (aut.marked(q) ? "*" : ""));
        rows.push_back(std::move(row));
        q = aut.step(q, mask);
    }
    if (r.undefined_at)
        rows.push_back({std::to_string(*r.undefined_at), "(controller undefined)"});

    std::vector<std::size_t> width;
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) {
            width.resize(std::max(width.size(), i + 1));
            width[i] = std::max(width[i], row[i].size());
        }
    std::ostringstream out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += row[i];
            if (i + 1 < row.size())
                line += std::string(width[i] - row[i].size() + 2, ' ');
        }
        out << line << "\n";
    }
    return out.str();
}

} // namespace hyperplan
