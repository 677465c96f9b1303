#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperplan {

/// True iff `s` matches `[A-Za-z_][A-Za-z0-9_]*`.
bool is_identifier(std::string_view s);

/// Finite-state system with explicit directions. Every (location, direction)
/// pair has exactly one successor; ids are kept in declaration order.
///
/// Locations, directions and atoms are addressed by their dense index into the
/// corresponding name vector.
class TransitionSystem {
public:
    /// `successors[loc][dir]` is the image of `loc` under `dir`; `labels[loc]`
    /// lists atom indices. Throws SemanticError when an invariant fails.
    TransitionSystem(std::vector<std::string> atoms, std::vector<std::string> locations,
                     std::vector<std::string> directions, int initial,
                     std::vector<std::vector<int>> successors, std::vector<std::vector<int>> labels);

    const std::vector<std::string>& atoms() const { return atoms_; }
    const std::vector<std::string>& locations() const { return locations_; }
    const std::vector<std::string>& directions() const { return directions_; }

    int num_locations() const { return static_cast<int>(locations_.size()); }
    int num_directions() const { return static_cast<int>(directions_.size()); }
    int num_atoms() const { return static_cast<int>(atoms_.size()); }
    int initial() const { return initial_; }

    int next(int location, int direction) const { return successors_[location][direction]; }
    /// Sorted atom indices holding in `location`.
    const std::vector<int>& label(int location) const { return labels_[location]; }
    bool holds(int location, int atom) const;

    std::optional<int> find_atom(std::string_view name) const;
    std::optional<int> find_location(std::string_view name) const;
    std::optional<int> find_direction(std::string_view name) const;

    /// Index lookups that throw SemanticError for unknown names.
    int location_index(std::string_view name) const;
    int direction_index(std::string_view name) const;

private:
    std::vector<std::string> atoms_;
    std::vector<std::string> locations_;
    std::vector<std::string> directions_;
    int initial_;
    std::vector<std::vector<int>> successors_;
    std::vector<std::vector<int>> labels_;
};

/// Parses the line-oriented TS format:
///
///     atoms a b
///     locations lA lB
///     directions dA dB
///     init lA
///     label lA a
///     trans lA dA lA
///
/// `#` starts a comment. Throws ParseError or SemanticError.
TransitionSystem parse_ts(std::string_view text);

/// Inverse of parse_ts up to comments and whitespace.
std::string serialize_ts(const TransitionSystem& ts);

/// Locations visited from the initial location when following `directions`;
/// the result has `directions.size() + 1` entries.
std::vector<int> run_prefix(const TransitionSystem& ts, std::span<const int> directions);

/// Name-based overload; throws SemanticError on an unknown direction.
std::vector<std::string> run_prefix(const TransitionSystem& ts, std::span<const std::string> directions);

} // namespace hyperplan
