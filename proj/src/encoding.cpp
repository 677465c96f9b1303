#include "hyperplan/encoding.hpp"

#include "hyperplan/errors.hpp"

#include <json.hpp>

#include <algorithm>

namespace hyperplan {

const char* name(Variant v) { return v == Variant::Reach ? "reach" : "safe"; }

std::optional<int> QDecPomdp::find(const PlanningState& s) const
{
    auto it = index_.find(s);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

JointAction QDecPomdp::action(int index) const
{
    if (index < 0 || index >= num_actions_)
        throw SemanticError("action index out of range");
    JointAction a(existential_.size());
    for (std::size_t i = a.size(); i-- > 0;) {
        a[i] = index % num_directions_;
        index /= num_directions_;
    }
    return a;
}

int QDecPomdp::action_index(const JointAction& a) const
{
    if (a.size() != existential_.size())
        throw SemanticError("joint action has the wrong arity");
    int index = 0;
    for (int d : a) {
        if (d < 0 || d >= num_directions_)
            throw SemanticError("joint action names an unknown direction");
        index = index * num_directions_ + d;
    }
    return index;
}

Observation QDecPomdp::observe(int path, int state) const
{
    const PlanningState& s = states_.at(state);
    if (s.kind == PlanningState::Kind::Win)
        return {Observation::Kind::Win, {}};
    if (s.kind == PlanningState::Kind::Lose)
        return {Observation::Kind::Lose, {}};
    if (path < 1 || path > num_paths())
        throw SemanticError("observation of unknown path " + std::to_string(path));
    return {Observation::Kind::Locations, std::vector<int>(s.locs.begin(), s.locs.begin() + path)};
}

LetterMap::LetterMap(const TransitionSystem& ts, const DetAutomaton& aut, int num_paths) : ts_(&ts)
{
    for (const IndexedAtom& ia : aut.alphabet()) {
        auto atom = ts.find_atom(ia.atom);
        if (!atom)
            throw SemanticError("atom '" + ia.atom + "' is not declared by the system");
        if (ia.var < 1 || ia.var > num_paths)
            throw SemanticError("automaton reads path " + std::to_string(ia.var) + " outside the formula");
        bits_.emplace_back(ia.var, *atom);
        if (std::find(relevant_.begin(), relevant_.end(), ia.var) == relevant_.end())
            relevant_.push_back(ia.var);
    }
    std::sort(relevant_.begin(), relevant_.end());
}

LetterMask LetterMap::mask(const std::vector<int>& locs) const
{
    LetterMask m = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (ts_->holds(locs[bits_[i].first - 1], bits_[i].second))
            m |= LetterMask(1) << i;
    return m;
}

namespace {

void check_alphabet(const HyperFormula& f, const DetAutomaton& aut)
{
    if (indexed_atoms(f.body()) != aut.alphabet())
        throw SemanticError("automaton alphabet does not match the formula body");
}

} // namespace

QDecPomdp build_encoding(const TransitionSystem& ts, const HyperFormula& f, const DetAutomaton& aut, Variant variant)
{
    check_alphabet(f, aut);
    const LetterMap letters(ts, aut, f.num_paths());

    QDecPomdp enc;
    enc.variant_ = variant;
    enc.word_ = f.quantifier_word();
    enc.existential_ = f.existential_vars();
    enc.universal_ = f.universal_vars();
    enc.num_directions_ = ts.num_directions();
    const int n = f.num_paths();
    const int nd = ts.num_directions();

    auto power = [](std::uint64_t base, std::size_t exp) {
        std::uint64_t r = 1;
        for (std::size_t i = 0; i < exp; ++i)
            r *= base;
        return r;
    };
    const std::uint64_t actions = power(nd, enc.existential_.size());
    const std::uint64_t branches = power(nd, enc.universal_.size());
    if (actions > 1'000'000 || branches > 1'000'000)
        throw ResourceError("direction product too large to encode explicitly");
    enc.num_actions_ = static_cast<int>(actions);
    enc.state_space_size_ = power(ts.num_locations(), n) * aut.num_states() + (variant == Variant::Safe ? 2 : 0);

    auto intern = [&](const PlanningState& s) {
        auto [it, fresh] = enc.index_.emplace(s, static_cast<int>(enc.states_.size()));
        if (fresh) {
            enc.states_.push_back(s);
            enc.delta_.emplace_back();
        }
        return it->second;
    };

    intern(PlanningState{PlanningState::Kind::Product, std::vector<int>(n, ts.initial()), aut.initial()});
    std::vector<int> dirs(n);
    for (std::size_t s = 0; s < enc.states_.size(); ++s) {
        const PlanningState cur = enc.states_[s];
        std::vector<std::vector<int>> images(enc.num_actions_);
        if (!cur.is_product()) {
            for (auto& img : images)
                img.push_back(static_cast<int>(s));
        } else if (variant == Variant::Safe && aut.marked(cur.q)) {
            const int lose = intern(PlanningState::lose());
            for (auto& img : images)
                img.push_back(lose);
        } else {
            const int q_next = aut.step(cur.q, letters.mask(cur.locs));
            for (int a = 0; a < enc.num_actions_; ++a) {
                const JointAction ja = enc.action(a);
                for (std::size_t i = 0; i < ja.size(); ++i)
                    dirs[enc.existential_[i] - 1] = ja[i];
                for (std::uint64_t u = 0; u < branches; ++u) {
                    std::uint64_t rest = u;
                    for (std::size_t i = enc.universal_.size(); i-- > 0;) {
                        dirs[enc.universal_[i] - 1] = static_cast<int>(rest % nd);
                        rest /= nd;
                    }
                    PlanningState next{PlanningState::Kind::Product, std::vector<int>(n), q_next};
                    for (int p = 0; p < n; ++p)
                        next.locs[p] = ts.next(cur.locs[p], dirs[p]);
                    images[a].push_back(intern(next));
                }
                if (variant == Variant::Safe)
                    images[a].push_back(intern(PlanningState::win()));
            }
        }
        for (auto& img : images) {
            std::sort(img.begin(), img.end());
            img.erase(std::unique(img.begin(), img.end()), img.end());
        }
        enc.delta_[s] = std::move(images);
    }

    enc.goal_.resize(enc.states_.size());
    for (std::size_t s = 0; s < enc.states_.size(); ++s) {
        const PlanningState& st = enc.states_[s];
        enc.goal_[s] = variant == Variant::Reach ? st.is_product() && aut.marked(st.q)
                                                 : st.kind == PlanningState::Kind::Win;
    }
    return enc;
}

QDecPomdp encode_reach(const TransitionSystem& ts, const HyperFormula& f, const DetAutomaton& dfa)
{
    if (dfa.kind() != AutomatonKind::Dfa)
        throw SemanticError("reachability encoding needs a DFA");
    if (classify_body(f.body()) != BodyClass::Reachability)
        throw ClassificationError("body is not a reachability body");
    return build_encoding(ts, f, dfa, Variant::Reach);
}

QDecPomdp encode_safe(const TransitionSystem& ts, const HyperFormula& f, const DetAutomaton& dsa)
{
    if (dsa.kind() != AutomatonKind::Dsa)
        throw SemanticError("safety encoding needs a DSA");
    if (!in_safety_fragment(f.body()))
        throw ClassificationError("body is not a safety body");
    return build_encoding(ts, f, dsa, Variant::Safe);
}

std::vector<PlanningState> reachable_states(const QDecPomdp& enc)
{
    std::vector<PlanningState> out;
    for (int s = 0; s < enc.num_states(); ++s)
        out.push_back(enc.state(s));
    return out;
}

std::string to_string(const PlanningState& s, const TransitionSystem& ts)
{
    if (s.kind == PlanningState::Kind::Win)
        return "win";
    if (s.kind == PlanningState::Kind::Lose)
        return "lose";
    std::string out = "<";
    for (int l : s.locs)
        out += ts.locations()[l] + ",";
    return out + "q" + std::to_string(s.q) + ">";
}

std::string to_string(const JointAction& a, const TransitionSystem& ts)
{
    std::string out = "(";
    for (std::size_t i = 0; i < a.size(); ++i)
        out += (i ? "," : "") + ts.directions()[a[i]];
    return out + ")";
}

std::string to_string(const Observation& o, const TransitionSystem& ts)
{
    if (o.kind == Observation::Kind::Win)
        return "win";
    if (o.kind == Observation::Kind::Lose)
        return "lose";
    std::string out = "<";
    for (std::size_t i = 0; i < o.locs.size(); ++i)
        out += (i ? "," : "") + ts.locations()[o.locs[i]];
    return out + ">";
}

std::string encoding_to_json(const QDecPomdp& enc, const TransitionSystem& ts, const HyperFormula& f)
{
    using nlohmann::json;
    json paths = json::array();
    for (int p = 1; p <= f.num_paths(); ++p)
        paths.push_back({{"name", f.var_name(p)}, {"quantifier", f.quantifier(p) == Quantifier::Forall ? "forall" : "exists"}});
    json actions = json::array();
    for (int a = 0; a < enc.num_actions(); ++a) {
        json dirs = json::array();
        for (int d : enc.action(a))
            dirs.push_back(ts.directions()[d]);
        actions.push_back(dirs);
    }
    json states = json::array();
    json goals = json::array();
    json delta = json::array();
    for (int s = 0; s < enc.num_states(); ++s) {
        const PlanningState& st = enc.state(s);
        json js{{"id", s}};
        if (st.is_product()) {
            json locs = json::array();
            for (int l : st.locs)
                locs.push_back(ts.locations()[l]);
            js["locs"] = locs;
            js["q"] = st.q;
        } else {
            js["sink"] = st.kind == PlanningState::Kind::Win ? "win" : "lose";
        }
        states.push_back(js);
        if (enc.goal(s))
            goals.push_back(s);
        json row = json::array();
        for (int a = 0; a < enc.num_actions(); ++a)
            row.push_back(enc.image(s, a));
        delta.push_back(row);
    }
    json doc{{"format", "hyperplan-encoding"},
             {"version", 1},
             {"variant", name(enc.variant())},
             {"paths", paths},
             {"actions", actions},
             {"initial", enc.initial()},
             {"state_space_size", enc.state_space_size()},
             {"states", states},
             {"goals", goals},
             {"delta", delta}};
    return doc.dump(2) + "\n";
}

} // namespace hyperplan
