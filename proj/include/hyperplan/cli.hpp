#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hyperplan {

/// Exit codes shared by every command.
namespace exit_code {
inline constexpr int verified = 0;
inline constexpr int no_plan = 1;  ///< also: policy rejected by `check`
inline constexpr int unsupported = 2;
inline constexpr int plan_rejected = 3;  ///< a found plan failed witness validation
inline constexpr int parse = 10;         ///< malformed or inconsistent input
inline constexpr int classification = 11;
inline constexpr int resource = 12;
inline constexpr int usage = 64;
} // namespace exit_code

enum class SolverChoice { Auto, Strong, StrongCyclic, Classical, Pond };
enum class VariantChoice { Auto, Reach, Safe };

struct RunConfig {
    std::string ts_path;
    /// A file name if such a file exists, otherwise the formula text itself.
    std::string formula;
    bool negate = false;
    VariantChoice variant = VariantChoice::Auto;
    SolverChoice solver = SolverChoice::Auto;
    int bound = 10;
    std::size_t belief_cap = 1'000'000;
    std::size_t automaton_cap = 10'000;
    std::optional<std::string> out_dir;
    std::optional<std::string> policy_path;    ///< check
    std::optional<std::string> manifest_path;  ///< check, optional
};

/// `text` is the human report, `json` the machine report; both are
/// deterministic for identical inputs. Files are written only with out_dir.
struct Report {
    int exit = 0;
    std::string status;
    std::string text;
    std::string json;
};

Report cmd_verify(const RunConfig& cfg);
Report cmd_encode(const RunConfig& cfg);
Report cmd_emit_pddl(const RunConfig& cfg);
Report cmd_check(const RunConfig& cfg);

/// `hyperplan verify|encode|emit-pddl|check ...`; prints the human report
/// (or the JSON one with --json) and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hyperplan
