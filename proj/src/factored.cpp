#include "hyperplan/factored.hpp"

#include "hyperplan/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hyperplan {

std::string FactoredEncoding::fluent_name(int fluent) const
{
    const int core = num_paths() * num_locations();
    if (fluent < 0 || fluent >= num_fluents())
        throw SemanticError("unknown fluent " + std::to_string(fluent));
    if (fluent < core)
        return "at(" + paths[fluent / num_locations()] + "," + locations[fluent % num_locations()] + ")";
    if (fluent < core + num_aut_states)
        return "autstate(q" + std::to_string(fluent - core) + ")";
    const int i = fluent - core - num_aut_states;
    if (variant == Variant::Reach)
        return "accept";
    return i == 0 ? "win" : i == 1 ? "lose" : "alive";
}

namespace {

void normalize(std::vector<int>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

FactoredEncoding encode_factored(const TransitionSystem& ts, const HyperFormula& f, const DetAutomaton& aut,
                                 Variant variant)
{
    if (indexed_atoms(f.body()) != aut.alphabet())
        throw SemanticError("automaton alphabet does not match the formula body");
    if ((variant == Variant::Safe) != (aut.kind() == AutomatonKind::Dsa))
        throw SemanticError("variant does not match the automaton kind");
    const LetterMap letters(ts, aut, f.num_paths());
    const bool safe = variant == Variant::Safe;

    FactoredEncoding fe;
    fe.variant = variant;
    for (int p = 1; p <= f.num_paths(); ++p)
        fe.paths.push_back(f.var_name(p));
    fe.quantifier_word = f.quantifier_word();
    fe.locations = ts.locations();
    fe.directions = ts.directions();
    fe.num_aut_states = aut.num_states();
    for (int q = 0; q < aut.num_states(); ++q)
        if (aut.marked(q))
            fe.marked.push_back(q);

    const int n = f.num_paths();
    const int nl = ts.num_locations();
    const int nd = ts.num_directions();
    for (int p = 1; p <= n; ++p)
        fe.init.push_back(fe.at(p, ts.initial()));
    fe.init.push_back(fe.autstate(aut.initial()));
    if (safe && !aut.marked(aut.initial()))
        fe.init.push_back(fe.alive());
    if (!safe && aut.marked(aut.initial()))
        fe.init.push_back(fe.accept());
    normalize(fe.init);

    // Automaton update, keyed on the source locations of the paths the body reads.
    std::vector<CondEffect> automaton;
    const auto& relevant = letters.relevant_paths();
    for (int q = 0; q < aut.num_states(); ++q) {
        if (aut.marked(q))
            continue;
        std::vector<int> tuple(relevant.size(), 0);
        std::vector<int> locs(n, 0);
        for (;;) {
            for (std::size_t i = 0; i < relevant.size(); ++i)
                locs[relevant[i] - 1] = tuple[i];
            const int q2 = aut.step(q, letters.mask(locs));
            if (q2 != q) {
                CondEffect e;
                e.when.push_back(fe.autstate(q));
                for (std::size_t i = 0; i < relevant.size(); ++i)
                    e.when.push_back(fe.at(relevant[i], tuple[i]));
                e.del.push_back(fe.autstate(q));
                e.add.push_back(fe.autstate(q2));
                if (aut.marked(q2))
                    (safe ? e.del : e.add).push_back(safe ? fe.alive() : fe.accept());
                normalize(e.when);
                automaton.push_back(std::move(e));
            }
            std::size_t i = tuple.size();
            while (i > 0 && ++tuple[i - 1] == nl)
                tuple[--i] = 0;
            if (i == 0)
                break;
        }
    }

    // Marked state in the safe variant: wipe everything and raise lose.
    std::vector<int> wipe;
    for (int fl = 0; fl < fe.num_core_fluents(); ++fl)
        wipe.push_back(fl);
    if (safe)
        wipe.push_back(fe.alive());
    std::vector<CondEffect> losing;
    if (safe)
        for (int q : fe.marked)
            losing.push_back(CondEffect{{fe.autstate(q)}, {fe.lose()}, wipe});

    const std::vector<int> ex = f.existential_vars(), un = f.universal_vars();
    auto tuples = [nd](std::size_t len) {
        std::vector<std::vector<int>> out{{}};
        for (std::size_t i = 0; i < len; ++i) {
            std::vector<std::vector<int>> next;
            for (const auto& t : out)
                for (int d = 0; d < nd; ++d) {
                    auto u = t;
                    u.push_back(d);
                    next.push_back(std::move(u));
                }
            out = std::move(next);
        }
        return out;
    };
    const auto universal_tuples = tuples(un.size());

    for (const auto& dirs_e : tuples(ex.size())) {
        FactoredAction act;
        act.dirs = dirs_e;
        std::vector<int> dirs(n);
        for (std::size_t i = 0; i < ex.size(); ++i)
            dirs[ex[i] - 1] = dirs_e[i];
        for (const auto& dirs_u : universal_tuples) {
            for (std::size_t i = 0; i < un.size(); ++i)
                dirs[un[i] - 1] = dirs_u[i];
            std::vector<CondEffect> outcome;
            for (int p = 1; p <= n; ++p) {
                for (int l = 0; l < nl; ++l) {
                    const int l2 = ts.next(l, dirs[p - 1]);
                    if (l2 == l)
                        continue;
                    CondEffect e;
                    e.when.push_back(fe.at(p, l));
                    if (safe)
                        e.when.push_back(fe.alive());
                    normalize(e.when);
                    e.del.push_back(fe.at(p, l));
                    e.add.push_back(fe.at(p, l2));
                    outcome.push_back(std::move(e));
                }
            }
            outcome.insert(outcome.end(), automaton.begin(), automaton.end());
            outcome.insert(outcome.end(), losing.begin(), losing.end());
            act.outcomes.push_back(std::move(outcome));
        }
        if (safe) {
            std::vector<CondEffect> winning{CondEffect{{fe.alive()}, {fe.win()}, wipe}};
            winning.insert(winning.end(), losing.begin(), losing.end());
            act.outcomes.push_back(std::move(winning));
        }
        fe.actions.push_back(std::move(act));
    }
    return fe;
}

GroundedStructure ground_factored(const FactoredEncoding& fenc, std::size_t max_states)
{
    GroundedStructure g;
    std::map<std::vector<int>, int> index;
    auto intern = [&](std::vector<int> s) {
        auto [it, fresh] = index.emplace(s, static_cast<int>(g.states.size()));
        if (fresh) {
            if (g.states.size() >= max_states)
                throw ResourceError("grounding exceeds " + std::to_string(max_states) + " states");
            g.states.push_back(std::move(s));
        }
        return it->second;
    };
    for (const auto& a : fenc.actions)
        g.actions.push_back(a.dirs);

    intern(fenc.init);
    std::vector<char> holds(fenc.num_fluents());
    for (std::size_t s = 0; s < g.states.size(); ++s) {
        std::fill(holds.begin(), holds.end(), 0);
        for (int fl : g.states[s])
            holds[fl] = 1;
        std::vector<std::vector<int>> row;
        for (const auto& act : fenc.actions) {
            std::vector<int> image;
            for (const auto& outcome : act.outcomes) {
                std::vector<char> next = holds;
                std::vector<int> adds;
                for (const auto& e : outcome) {
                    bool fires = std::all_of(e.when.begin(), e.when.end(), [&](int fl) { return holds[fl]; });
                    if (!fires)
                        continue;
                    for (int fl : e.del)
                        next[fl] = 0;
                    adds.insert(adds.end(), e.add.begin(), e.add.end());
                }
                for (int fl : adds)
                    next[fl] = 1;
                std::vector<int> succ;
                for (int fl = 0; fl < fenc.num_fluents(); ++fl)
                    if (next[fl])
                        succ.push_back(fl);
                image.push_back(intern(std::move(succ)));
            }
            normalize(image);
            row.push_back(std::move(image));
        }
        g.images.push_back(std::move(row));
    }
    for (const auto& s : g.states)
        g.goal.push_back(std::binary_search(s.begin(), s.end(), fenc.goal()));
    return g;
}

PlanningState decode_state(const FactoredEncoding& fenc, const std::vector<int>& fluents)
{
    auto has = [&](int fl) { return std::binary_search(fluents.begin(), fluents.end(), fl); };
    if (fenc.variant == Variant::Safe) {
        if (has(fenc.win()) && has(fenc.lose()))
            throw SemanticError("state holds both win and lose");
        if (has(fenc.win()) || has(fenc.lose())) {
            for (int fl : fluents)
                if (fl < fenc.num_core_fluents() || fl == fenc.alive())
                    throw SemanticError("sink state still holds " + fenc.fluent_name(fl));
            return has(fenc.win()) ? PlanningState::win() : PlanningState::lose();
        }
    }
    PlanningState s;
    s.locs.assign(fenc.num_paths(), -1);
    int qs = 0;
    for (int fl : fluents) {
        if (fl < fenc.num_paths() * fenc.num_locations()) {
            int& slot = s.locs[fl / fenc.num_locations()];
            if (slot != -1)
                throw SemanticError("path holds two locations");
            slot = fl % fenc.num_locations();
        } else if (fl < fenc.num_core_fluents()) {
            s.q = fl - fenc.autstate(0);
            ++qs;
        }
    }
    if (qs != 1 || std::count(s.locs.begin(), s.locs.end(), -1) != 0)
        throw SemanticError("state is not a well-formed product state");
    const bool marked = std::binary_search(fenc.marked.begin(), fenc.marked.end(), s.q);
    const bool flag = has(fenc.variant == Variant::Safe ? fenc.alive() : fenc.accept());
    if (flag != (fenc.variant == Variant::Safe ? !marked : marked))
        throw SemanticError("status flag disagrees with the automaton state");
    return s;
}

bool isomorphic(const FactoredEncoding& fenc, const GroundedStructure& g, const QDecPomdp& enc, std::string* why)
{
    auto fail = [&](const std::string& msg) {
        if (why)
            *why = msg;
        return false;
    };
    if (static_cast<int>(g.states.size()) != enc.num_states())
        return fail("state counts differ: " + std::to_string(g.states.size()) + " grounded vs " +
                    std::to_string(enc.num_states()) + " explicit");
    if (static_cast<int>(g.actions.size()) != enc.num_actions())
        return fail("action counts differ");
    std::vector<int> to_explicit;
    std::set<int> hit;
    try {
        for (const auto& s : g.states) {
            auto id = enc.find(decode_state(fenc, s));
            if (!id)
                return fail("grounded state has no explicit counterpart");
            to_explicit.push_back(*id);
            hit.insert(*id);
        }
    } catch (const SemanticError& e) {
        return fail(std::string("undecodable grounded state: ") + e.what());
    }
    if (static_cast<int>(hit.size()) != enc.num_states())
        return fail("grounded states collapse onto fewer explicit states");
    if (to_explicit[0] != enc.initial())
        return fail("initial states differ");
    for (std::size_t s = 0; s < g.states.size(); ++s) {
        if (g.goal[s] != enc.goal(to_explicit[s]))
            return fail("goal status differs at grounded state " + std::to_string(s));
        for (std::size_t a = 0; a < g.actions.size(); ++a) {
            const int ea = enc.action_index(g.actions[a]);
            std::vector<int> mapped;
            for (int t : g.images[s][a])
                mapped.push_back(to_explicit[t]);
            normalize(mapped);
            if (mapped != enc.image(to_explicit[s], ea))
                return fail("images differ at grounded state " + std::to_string(s) + ", action " +
                            std::to_string(a));
        }
    }
    return true;
}

} // namespace hyperplan
