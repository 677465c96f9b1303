#include "hyperplan/system.hpp"

#include "hyperplan/errors.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace hyperplan {

bool is_identifier(std::string_view s)
{
    if (s.empty())
        return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front()))
        return false;
    return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

namespace {

std::optional<int> index_of(const std::vector<std::string>& names, std::string_view name)
{
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        return std::nullopt;
    return static_cast<int>(it - names.begin());
}

void check_unique(const std::vector<std::string>& names, const char* what)
{
    std::set<std::string_view> seen;
    for (const auto& n : names) {
        if (!is_identifier(n))
            throw SemanticError(std::string("invalid ") + what + " id '" + n + "'");
        if (!seen.insert(n).second)
            throw SemanticError(std::string("duplicate ") + what + " '" + n + "'");
    }
}

} // namespace

TransitionSystem::TransitionSystem(std::vector<std::string> atoms, std::vector<std::string> locations,
                                   std::vector<std::string> directions, int initial,
                                   std::vector<std::vector<int>> successors,
                                   std::vector<std::vector<int>> labels)
    : atoms_(std::move(atoms)), locations_(std::move(locations)), directions_(std::move(directions)),
      initial_(initial), successors_(std::move(successors)), labels_(std::move(labels))
{
    check_unique(atoms_, "atom");
    check_unique(locations_, "location");
    check_unique(directions_, "direction");
    if (locations_.empty())
        throw SemanticError("system has no locations");
    if (directions_.empty())
        throw SemanticError("system has no directions");
    if (initial_ < 0 || initial_ >= num_locations())
        throw SemanticError("initial location out of range");
    if (successors_.size() != locations_.size())
        throw SemanticError("transition function not total");
    for (const auto& row : successors_) {
        if (row.size() != directions_.size())
            throw SemanticError("transition function not total");
        for (int target : row)
            if (target < 0 || target >= num_locations())
                throw SemanticError("transition target out of range");
    }
    labels_.resize(locations_.size());
    for (auto& label : labels_) {
        std::sort(label.begin(), label.end());
        label.erase(std::unique(label.begin(), label.end()), label.end());
        for (int a : label)
            if (a < 0 || a >= num_atoms())
                throw SemanticError("label refers to an undeclared atom");
    }
}

bool TransitionSystem::holds(int location, int atom) const
{
    const auto& l = labels_[location];
    return std::binary_search(l.begin(), l.end(), atom);
}

std::optional<int> TransitionSystem::find_atom(std::string_view name) const { return index_of(atoms_, name); }
std::optional<int> TransitionSystem::find_location(std::string_view name) const { return index_of(locations_, name); }
std::optional<int> TransitionSystem::find_direction(std::string_view name) const { return index_of(directions_, name); }

int TransitionSystem::location_index(std::string_view name) const
{
    if (auto i = find_location(name))
        return *i;
    throw SemanticError("unknown location '" + std::string(name) + "'");
}

int TransitionSystem::direction_index(std::string_view name) const
{
    if (auto i = find_direction(name))
        return *i;
    throw SemanticError("unknown direction '" + std::string(name) + "'");
}

namespace {

struct Token {
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<std::vector<Token>> tokenize_lines(std::string_view text)
{
    std::vector<std::vector<Token>> lines;
    std::size_t line_no = 1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::vector<Token> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
                ++i;
                continue;
            }
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
                ++i;
            tokens.push_back({std::string(line.substr(start, i - start)), line_no, start + 1});
        }
        if (!tokens.empty())
            lines.push_back(std::move(tokens));
        pos = end + 1;
        ++line_no;
    }
    return lines;
}

[[noreturn]] void fail(const Token& at, const std::string& message)
{
    throw ParseError(message, at.line, at.column);
}

} // namespace

TransitionSystem parse_ts(std::string_view text)
{
    std::optional<std::vector<std::string>> atoms, locations, directions;
    std::optional<Token> init;
    std::vector<std::vector<Token>> label_lines, trans_lines;

    auto names_of = [](const std::vector<Token>& line) {
        std::vector<std::string> out;
        for (std::size_t i = 1; i < line.size(); ++i) {
            if (!is_identifier(line[i].text))
                fail(line[i], "invalid identifier '" + line[i].text + "'");
            out.push_back(line[i].text);
        }
        return out;
    };
    auto declare = [&](std::optional<std::vector<std::string>>& slot, const std::vector<Token>& line) {
        if (slot)
            throw SemanticError("duplicate definition of '" + line[0].text + "' (line " +
                                std::to_string(line[0].line) + ")");
        slot = names_of(line);
    };

    for (const auto& line : tokenize_lines(text)) {
        const std::string& kw = line[0].text;
        if (kw == "atoms") {
            declare(atoms, line);
        } else if (kw == "locations") {
            declare(locations, line);
        } else if (kw == "directions") {
            declare(directions, line);
        } else if (kw == "init") {
            if (line.size() != 2)
                fail(line[0], "'init' takes exactly one location");
            if (init)
                throw SemanticError("duplicate definition of 'init' (line " + std::to_string(line[0].line) + ")");
            init = line[1];
        } else if (kw == "label") {
            if (line.size() < 2)
                fail(line[0], "'label' needs a location");
            label_lines.push_back(line);
        } else if (kw == "trans") {
            if (line.size() != 4)
                fail(line[0], "'trans' takes a location, a direction and a location");
            trans_lines.push_back(line);
        } else {
            fail(line[0], "unknown keyword '" + kw + "'");
        }
    }

    if (!atoms)
        throw SemanticError("missing 'atoms' section");
    if (!locations)
        throw SemanticError("missing 'locations' section");
    if (!directions)
        throw SemanticError("missing 'directions' section");
    if (!init)
        throw SemanticError("missing 'init' section");

    auto lookup = [](const std::vector<std::string>& names, const Token& tok, const char* what) {
        if (auto i = index_of(names, tok.text))
            return *i;
        throw SemanticError(std::string("undeclared ") + what + " '" + tok.text + "' (line " +
                            std::to_string(tok.line) + ")");
    };

    const int initial = lookup(*locations, *init, "location");

    std::vector<std::vector<int>> labels(locations->size());
    std::vector<bool> labelled(locations->size(), false);
    for (const auto& line : label_lines) {
        int loc = lookup(*locations, line[1], "location");
        if (labelled[loc])
            throw SemanticError("duplicate label for location '" + line[1].text + "'");
        labelled[loc] = true;
        for (std::size_t i = 2; i < line.size(); ++i)
            labels[loc].push_back(lookup(*atoms, line[i], "atom"));
    }

    std::vector<std::vector<int>> successors(locations->size(), std::vector<int>(directions->size(), -1));
    for (const auto& line : trans_lines) {
        int from = lookup(*locations, line[1], "location");
        int dir = lookup(*directions, line[2], "direction");
        int to = lookup(*locations, line[3], "location");
        if (successors[from][dir] != -1)
            throw SemanticError("duplicate transition for (" + line[1].text + ", " + line[2].text + ")");
        successors[from][dir] = to;
    }
    for (std::size_t l = 0; l < successors.size(); ++l)
        for (std::size_t d = 0; d < successors[l].size(); ++d)
            if (successors[l][d] == -1)
                throw SemanticError("transition function not total: missing (" + (*locations)[l] + ", " +
                                    (*directions)[d] + ")");

    return TransitionSystem(std::move(*atoms), std::move(*locations), std::move(*directions), initial,
                            std::move(successors), std::move(labels));
}

std::string serialize_ts(const TransitionSystem& ts)
{
    std::ostringstream out;
    auto list = [&](const char* kw, const std::vector<std::string>& names) {
        out << kw;
        for (const auto& n : names)
            out << ' ' << n;
        out << '\n';
    };
    list("atoms", ts.atoms());
    list("locations", ts.locations());
    list("directions", ts.directions());
    out << "init " << ts.locations()[ts.initial()] << '\n';
    for (int l = 0; l < ts.num_locations(); ++l) {
        if (ts.label(l).empty())
            continue;
        out << "label " << ts.locations()[l];
        for (int a : ts.label(l))
            out << ' ' << ts.atoms()[a];
        out << '\n';
    }
    for (int l = 0; l < ts.num_locations(); ++l)
        for (int d = 0; d < ts.num_directions(); ++d)
            out << "trans " << ts.locations()[l] << ' ' << ts.directions()[d] << ' '
                << ts.locations()[ts.next(l, d)] << '\n';
    return out.str();
}

std::vector<int> run_prefix(const TransitionSystem& ts, std::span<const int> directions)
{
    std::vector<int> run{ts.initial()};
    run.reserve(directions.size() + 1);
    for (int d : directions) {
        if (d < 0 || d >= ts.num_directions())
            throw SemanticError("unknown direction index " + std::to_string(d));
        run.push_back(ts.next(run.back(), d));
    }
    return run;
}

std::vector<std::string> run_prefix(const TransitionSystem& ts, std::span<const std::string> directions)
{
    std::vector<int> dirs;
    dirs.reserve(directions.size());
    for (const auto& d : directions)
        dirs.push_back(ts.direction_index(d));
    std::vector<std::string> out;
    for (int l : run_prefix(ts, std::span<const int>(dirs)))
        out.push_back(ts.locations()[l]);
    return out;
}

} // namespace hyperplan
