#include "hyperplan/cli.hpp"

#include "hyperplan/automaton.hpp"
#include "hyperplan/encoding.hpp"
#include "hyperplan/errors.hpp"
#include "hyperplan/factored.hpp"
#include "hyperplan/pddl.hpp"
#include "hyperplan/solver.hpp"
#include "hyperplan/witness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hyperplan {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kNoPlan = "NO PLAN (inconclusive: encoding is sound but incomplete)";

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SemanticError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw SemanticError("cannot write " + path.string());
}

// Formula files may carry `#` comment lines.
std::string formula_text(const std::string& arg)
{
    std::error_code ec;
    if (!fs::is_regular_file(arg, ec))
        return arg;
    std::istringstream in(read_file(arg));
    std::string line, out;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first != std::string::npos && line[first] == '#')
            continue;
        out += line + "\n";
    }
    return out;
}

struct Problem {
    TransitionSystem ts;
    HyperFormula f;
    PrefixClass prefix;
    DetAutomaton aut;
    QDecPomdp enc;
    Variant variant;
};

Variant pick_variant(const HyperFormula& f, VariantChoice choice)
{
    const BodyClass cls = classify_body(f.body());
    switch (choice) {
    case VariantChoice::Reach:
        if (!in_reachability_fragment(f.body()))
            throw ClassificationError("body is not in the reachability fragment");
        return Variant::Reach;
    case VariantChoice::Safe:
        if (!in_safety_fragment(f.body()))
            throw ClassificationError("body is not in the safety fragment");
        return Variant::Safe;
    case VariantChoice::Auto: break;
    }
    if (cls == BodyClass::Neither)
        throw ClassificationError("body is neither a reachability nor a safety formula");
    return cls == BodyClass::Safety ? Variant::Safe : Variant::Reach;
}

Problem load(const RunConfig& cfg)
{
    auto ts = parse_ts(read_file(cfg.ts_path));
    auto f = parse_formula(formula_text(cfg.formula));
    if (cfg.negate)
        f = negate(f);
    const Variant v = pick_variant(f, cfg.variant);
    AutomatonOptions ao;
    ao.max_states = cfg.automaton_cap;
    auto aut = v == Variant::Safe ? build_safety_dsa(f.body(), ao) : build_reach_dfa(f.body(), ao);
    auto enc = v == Variant::Safe ? encode_safe(ts, f, aut) : encode_reach(ts, f, aut);
    const PrefixClass prefix = classify_prefix(f);
    return {std::move(ts), std::move(f), prefix, std::move(aut), std::move(enc), v};
}

json describe(const Problem& p, const RunConfig& cfg)
{
    return {{"system",
             {{"locations", p.ts.num_locations()},
              {"directions", p.ts.num_directions()},
              {"atoms", p.ts.num_atoms()}}},
            {"formula", to_string(p.f)},
            {"negated", cfg.negate},
            {"prefix_class", name(p.prefix)},
            {"body_class", name(classify_body(p.f.body()))},
            {"automaton",
             {{"kind", p.aut.kind() == AutomatonKind::Dfa ? "DFA" : "DSA"}, {"states", p.aut.num_states()}}},
            {"encoding",
             {{"variant", name(p.variant)},
              {"reachable_states", p.enc.num_states()},
              {"state_space_size", p.enc.state_space_size()},
              {"actions", p.enc.num_actions()}}}};
}

std::string describe_text(const json& d)
{
    std::ostringstream out;
    out << "formula: " << d["formula"].get<std::string>() << (d["negated"].get<bool>() ? "  (negated)" : "") << "\n";
    out << "system: " << d["system"]["locations"] << " locations, " << d["system"]["directions"] << " directions\n";
    out << "classes: prefix " << d["prefix_class"].get<std::string>() << ", body "
        << d["body_class"].get<std::string>() << "\n";
    out << "automaton: " << d["automaton"]["kind"].get<std::string>() << " with " << d["automaton"]["states"]
        << " states\n";
    out << "encoding: " << d["encoding"]["variant"].get<std::string>() << " variant, "
        << d["encoding"]["reachable_states"] << " reachable of " << d["encoding"]["state_space_size"]
        << " states, " << d["encoding"]["actions"] << " actions\n";
    return out.str();
}

Report finish(Report r, json doc, const std::string& command)
{
    doc["command"] = command;
    doc["status"] = r.status;
    doc["exit_code"] = r.exit;
    r.json = doc.dump(2) + "\n";
    return r;
}

// Maps library exceptions to the exit-code contract.
template <typename F>
Report guarded(const std::string& command, F&& body)
{
    Report r;
    int code = 0;
    std::string kind;
    try {
        return body();
    } catch (const ParseError& e) {
        code = exit_code::parse, kind = "PARSE ERROR", r.text = e.what();
    } catch (const SemanticError& e) {
        code = exit_code::parse, kind = "INPUT ERROR", r.text = e.what();
    } catch (const ClassificationError& e) {
        code = exit_code::classification, kind = "CLASSIFICATION ERROR", r.text = e.what();
    } catch (const UnsupportedError& e) {
        code = exit_code::unsupported, kind = "UNSUPPORTED", r.text = e.what();
    } catch (const ResourceError& e) {
        code = exit_code::resource, kind = "RESOURCE LIMIT", r.text = e.what();
    } catch (const IndeterminateError& e) {
        code = exit_code::no_plan, kind = "INDETERMINATE", r.text = e.what();
    }
    r.exit = code;
    r.status = kind;
    const std::string message = r.text;
    r.text = kind + ": " + message + "\n";
    return finish(std::move(r), json{{"error", message}}, command);
}

fs::path prepare_out(const RunConfig& cfg)
{
    fs::path dir(*cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw SemanticError("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

struct Solved {
    Verdict verdict;
    std::string solver;
};

Solved solve(const Problem& p, const RunConfig& cfg)
{
    SolverOptions so;
    so.belief_cap = cfg.belief_cap;
    const bool safe = p.variant == Variant::Safe;
    const bool fond = p.prefix == PrefixClass::ExistsOnly || p.prefix == PrefixClass::ForallExists;
    const PlanKind kind = safe ? PlanKind::StrongCyclic : PlanKind::Strong;
    SolverChoice c = cfg.solver;
    if (c == SolverChoice::Auto) {
        if (!fond)
            c = SolverChoice::Pond;
        else if (safe)
            c = SolverChoice::StrongCyclic;
        else
            c = p.prefix == PrefixClass::ExistsOnly ? SolverChoice::Classical : SolverChoice::Strong;
    }
    switch (c) {
    case SolverChoice::Classical: return {solve_classical(p.enc), "classical"};
    case SolverChoice::Strong:
        if (!fond)
            return {solve_pond(p.enc, PlanKind::Strong, so), "pond-strong"};
        return {solve_fond_strong(p.enc), "fond-strong"};
    case SolverChoice::StrongCyclic:
        if (!fond)
            return {solve_pond(p.enc, PlanKind::StrongCyclic, so), "pond-strong-cyclic"};
        return {solve_fond_strong_cyclic(p.enc), "fond-strong-cyclic"};
    case SolverChoice::Pond:
    case SolverChoice::Auto: break;
    }
    return {solve_pond(p.enc, kind, so), std::string("pond-") + (safe ? "strong-cyclic" : "strong")};
}

// Universal paths of the sample run always take direction 0.
std::vector<std::vector<int>> default_universal(const HyperFormula& f, int steps)
{
    return std::vector<std::vector<int>>(steps, std::vector<int>(f.universal_vars().size(), 0));
}

json paths_json(const Problem& p, const WitnessRun& run)
{
    json out = json::object();
    for (int q = 1; q <= p.f.num_paths(); ++q) {
        json seq = json::array();
        for (const auto& row : run.locations)
            seq.push_back(p.ts.locations()[row[q - 1]]);
        out[p.f.var_name(q)] = seq;
    }
    return out;
}

json validation_json(const Validation& v, int bound, const Problem& p)
{
    json u = json::array();
    for (const auto& row : v.universal) {
        json step = json::array();
        for (int d : row)
            step.push_back(p.ts.directions()[d]);
        u.push_back(step);
    }
    json out{{"status", name(v.status)}, {"bound", bound}, {"explored", v.explored}};
    if (!v.reason.empty())
        out["reason"] = v.reason;
    if (v.status == Validation::Status::Violation) {
        out["step"] = v.step;
        out["universal_directions"] = u;
    }
    return out;
}

} // namespace

Report cmd_verify(const RunConfig& cfg)
{
    return guarded("verify", [&] {
        const Problem p = load(cfg);
        json doc = describe(p, cfg);
        Report r;
        std::ostringstream text;
        text << describe_text(doc);
        if (p.prefix == PrefixClass::General)
            throw UnsupportedError(std::string("no in-tool solver for the ") + name(p.prefix) + " prefix class");

        const Solved s = solve(p, cfg);
        const Verdict& v = s.verdict;
        doc["solver"] = s.solver;
        doc["explored"] = v.explored;
        text << "solver: " << s.solver << ", " << v.explored << " nodes explored\n";
        if (v.status == Verdict::Status::Unsupported)
            throw UnsupportedError(v.reason);
        if (v.status == Verdict::Status::NoPlan) {
            r.exit = exit_code::no_plan;
            r.status = "NO PLAN";
            doc["message"] = kNoPlan;
            text << kNoPlan << "\n";
            if (!v.reason.empty())
                text << "reason: " << v.reason << "\n";
            r.text = text.str();
            return finish(std::move(r), doc, "verify");
        }

        const bool bounded_plan = v.kind == PlanKind::Strong;
        doc["plan"] = {{"kind", name(v.kind)}, {"controller_nodes", v.controller.nodes.size()}};
        if (bounded_plan)
            doc["plan"]["horizon"] = v.horizon;
        const SkolemWitness w = extract_skolem(v.controller, p.f, p.ts);
        ValidationOptions vo;
        vo.bound = cfg.bound;
        if (bounded_plan)
            vo.horizon = v.horizon;
        const Validation val = validate_witness(w, p.aut, vo);
        doc["validation"] = validation_json(val, cfg.bound, p);

        const int steps = bounded_plan ? std::max(v.horizon, 1) : std::min(cfg.bound, 8);
        const auto universal = default_universal(p.f, steps);
        const std::string trace = trace_table(w, p.aut, universal);
        doc["sample_run"] = paths_json(p, w.run(universal));

        text << "plan: " << name(v.kind) << ", " << v.controller.nodes.size() << " controller nodes";
        if (bounded_plan)
            text << ", horizon " << v.horizon;
        text << "\n";
        text << "witness validation: " << name(val.status) << " (bound " << cfg.bound << ", " << val.explored
             << " configurations)";
        if (!val.reason.empty())
            text << ": " << val.reason;
        text << "\n";

        if (val.status == Validation::Status::Violation) {
            r.exit = exit_code::plan_rejected;
            r.status = "PLAN REJECTED";
            text << "PLAN REJECTED: the extracted witness violates the body at step " << val.step << "\n";
        } else {
            r.exit = exit_code::verified;
            r.status = "VERIFIED";
            text << "VERIFIED";
            if (cfg.negate)
                text << ": the negated formula holds, so the original formula is violated";
            text << "\n";
        }
        text << "sample run" << (p.f.universal_vars().empty() ? "" : " (universal paths take direction 0)")
             << ":\n"
             << trace;
        r.text = text.str();
        if (cfg.out_dir) {
            const fs::path dir = prepare_out(cfg);
            write_file(dir / "policy.json", controller_to_json(v.controller, p.ts, p.f));
            write_file(dir / "trace.txt", trace);
        }
        return finish(std::move(r), doc, "verify");
    });
}

namespace {

std::string factored_to_json(const FactoredEncoding& fe)
{
    auto names = [&](const std::vector<int>& fluents) {
        json out = json::array();
        for (int fl : fluents)
            out.push_back(fe.fluent_name(fl));
        return out;
    };
    json fluents = json::array();
    for (int fl = 0; fl < fe.num_fluents(); ++fl)
        fluents.push_back(fe.fluent_name(fl));
    json actions = json::array();
    for (const auto& a : fe.actions) {
        json dirs = json::array();
        for (int d : a.dirs)
            dirs.push_back(fe.directions[d]);
        json outcomes = json::array();
        for (const auto& o : a.outcomes) {
            json effects = json::array();
            for (const auto& e : o)
                effects.push_back({{"when", names(e.when)}, {"add", names(e.add)}, {"del", names(e.del)}});
            outcomes.push_back(effects);
        }
        actions.push_back({{"directions", dirs}, {"outcomes", outcomes}});
    }
    json doc{{"format", "hyperplan-factored"},
             {"version", 1},
             {"variant", name(fe.variant)},
             {"fluents", fluents},
             {"init", names(fe.init)},
             {"goal", fe.fluent_name(fe.goal())},
             {"actions", actions}};
    return doc.dump(2) + "\n";
}

} // namespace

Report cmd_encode(const RunConfig& cfg)
{
    return guarded("encode", [&] {
        const Problem p = load(cfg);
        json doc = describe(p, cfg);
        const auto fe = encode_factored(p.ts, p.f, p.aut, p.variant);
        doc["factored"] = {{"fluents", fe.num_fluents()}, {"actions", fe.actions.size()}};
        Report r;
        r.status = "ENCODED";
        const std::string explicit_json = encoding_to_json(p.enc, p.ts, p.f);
        if (cfg.out_dir) {
            const fs::path dir = prepare_out(cfg);
            write_file(dir / "encoding.json", explicit_json);
            write_file(dir / "factored.json", factored_to_json(fe));
            r.text = describe_text(doc) + "factored: " + std::to_string(fe.num_fluents()) + " fluents\nwrote " +
                     (dir / "encoding.json").string() + " and " + (dir / "factored.json").string() + "\n";
        } else {
            r.text = explicit_json;
        }
        return finish(std::move(r), doc, "encode");
    });
}

Report cmd_emit_pddl(const RunConfig& cfg)
{
    return guarded("emit-pddl", [&] {
        if (!cfg.out_dir)
            throw SemanticError("emit-pddl needs --out DIR");
        const Problem p = load(cfg);
        json doc = describe(p, cfg);
        const auto docs = emit_pddl(encode_factored(p.ts, p.f, p.aut, p.variant), p.prefix);
        const auto problems = pddl_problems(docs.domain, docs.problem);
        if (!problems.empty())
            throw std::logic_error("emitted PDDL is not well-formed: " + problems.front());
        const fs::path dir = prepare_out(cfg);
        write_file(dir / "domain.pddl", docs.domain);
        write_file(dir / "problem.pddl", docs.problem);
        write_file(dir / "manifest.json", docs.manifest);
        doc["files"] = {"domain.pddl", "problem.pddl", "manifest.json"};
        Report r;
        r.status = "EMITTED";
        r.text = describe_text(doc) + "wrote domain.pddl, problem.pddl and manifest.json to " + dir.string() + "\n";
        return finish(std::move(r), doc, "emit-pddl");
    });
}

Report cmd_check(const RunConfig& cfg)
{
    return guarded("check", [&] {
        if (!cfg.policy_path)
            throw SemanticError("check needs --policy FILE");
        const Problem p = load(cfg);
        json doc = describe(p, cfg);
        const std::string text_policy = read_file(*cfg.policy_path);
        Controller c;
        if (cfg.manifest_path) {
            PddlDocuments docs;
            docs.manifest = read_file(*cfg.manifest_path);
            c = ingest_policy(text_policy, docs, p.ts, p.f);
        } else {
            c = controller_from_json(text_policy, p.ts, p.f);
        }
        const SkolemWitness w = extract_skolem(c, p.f, p.ts);
        const PlanKind kind = p.variant == Variant::Safe ? PlanKind::StrongCyclic : PlanKind::Strong;
        const bool executes = check_execution(p.enc, c, kind);
        ValidationOptions vo;
        vo.bound = cfg.bound;
        const Validation val = validate_witness(w, p.aut, vo);
        doc["execution"] = {{"kind", name(kind)}, {"ok", executes}};
        doc["validation"] = validation_json(val, cfg.bound, p);

        Report r;
        const bool ok = executes && val.status != Validation::Status::Violation;
        r.exit = ok ? exit_code::verified : exit_code::no_plan;
        r.status = ok ? "POLICY ACCEPTED" : "POLICY REJECTED";
        std::ostringstream text;
        text << describe_text(doc);
        text << "execution check (" << name(kind) << "): " << (executes ? "pass" : "fail") << "\n";
        text << "witness validation: " << name(val.status) << " (bound " << cfg.bound << ")";
        if (!val.reason.empty())
            text << ": " << val.reason;
        text << "\n" << r.status << "\n";
        r.text = text.str();
        return finish(std::move(r), doc, "check");
    });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"HyperLTL model checking by planning", "hyperplan"};
    app.require_subcommand(1);
    RunConfig cfg;
    bool as_json = false;
    std::string solver = "auto", variant = "auto";

    auto common = [&](CLI::App* sub) {
        sub->add_option("--ts", cfg.ts_path, "transition system file")->required()->check(CLI::ExistingFile);
        sub->add_option("--formula", cfg.formula, "formula file or formula text")->required();
        sub->add_flag("--negate", cfg.negate, "dualize the quantifiers and negate the body");
        sub->add_option("--variant", variant, "encoding variant")
            ->check(CLI::IsMember({"auto", "reach", "safe"}));
        sub->add_option("--bound", cfg.bound, "witness validation depth")->check(CLI::PositiveNumber);
        sub->add_option("--automaton-cap", cfg.automaton_cap, "automaton state limit")->check(CLI::PositiveNumber);
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_flag("--json", as_json, "print the JSON report instead of the text report");
    };
    auto* verify = app.add_subcommand("verify", "search for a plan and validate its witness");
    common(verify);
    verify->add_option("--solver", solver, "planner")
        ->check(CLI::IsMember({"auto", "strong", "strong-cyclic", "classical", "pond"}));
    verify->add_option("--belief-cap", cfg.belief_cap, "belief-space node limit")->check(CLI::PositiveNumber);
    auto* encode = app.add_subcommand("encode", "dump the explicit and factored encodings");
    common(encode);
    auto* emit = app.add_subcommand("emit-pddl", "write domain.pddl, problem.pddl and manifest.json");
    common(emit);
    emit->get_option("--out")->required();
    auto* check = app.add_subcommand("check", "check an external controller");
    common(check);
    check->add_option("--policy", cfg.policy_path, "controller JSON")->required()->check(CLI::ExistingFile);
    check->add_option("--manifest", cfg.manifest_path, "PDDL manifest naming the actions")
        ->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : exit_code::usage;
    }
    cfg.solver = solver == "strong"          ? SolverChoice::Strong
                 : solver == "strong-cyclic" ? SolverChoice::StrongCyclic
                 : solver == "classical"     ? SolverChoice::Classical
                 : solver == "pond"          ? SolverChoice::Pond
                                             : SolverChoice::Auto;
    cfg.variant = variant == "reach" ? VariantChoice::Reach
                  : variant == "safe" ? VariantChoice::Safe
                                      : VariantChoice::Auto;

    Report r;
    if (verify->parsed())
        r = cmd_verify(cfg);
    else if (encode->parsed())
        r = cmd_encode(cfg);
    else if (emit->parsed())
        r = cmd_emit_pddl(cfg);
    else
        r = cmd_check(cfg);

    if (cfg.out_dir && r.exit < exit_code::parse) {
        try {
            const fs::path dir = prepare_out(cfg);
            write_file(dir / "report.json", r.json);
            write_file(dir / "report.txt", r.text);
        } catch (const SemanticError& e) {
            err << e.what() << "\n";
            return exit_code::parse;
        }
    }
    (r.exit >= exit_code::unsupported && r.exit != exit_code::plan_rejected ? err : out)
        << (as_json ? r.json : r.text);
    return r.exit;
}

} // namespace hyperplan
