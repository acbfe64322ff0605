#pragma once
#include <string>
#include <vector>

namespace coarse {

// Parsed command-line configuration shared by all subcommands. Numeric fields
// keep their documented defaults unless a flag overrides them.
struct RunConfig {
    std::string command;            // gen | embed | certify | bracket | profile
    std::string space_arg;          // generator spec ("cycle:64") or a space file path
    std::string family = "doubling";// subexp | uniform_volume | doubling
    std::string kind = "expander";  // certify: expander|tree_cp|laakso_cp|skew_cube|file:...
    double p = 2.0;
    double rate_a = 0.5;
    double rate_b = 0.0;
    std::vector<int> scales;        // override for the auto dyadic selection
    std::vector<int> cube;          // skew_cube corner map
    int base = 0;
    std::string out_dir = ".";
    std::string out_file;           // gen -o target
    std::uint64_t seed = 1;
    double tol = 1e-4;
};

struct CommandResult {
    int exit_code = 0;
    std::vector<std::string> failures; // machine-readable audit failures
    std::string summary;               // human text printed to stdout
};

CommandResult cmd_gen(const RunConfig& cfg);
CommandResult cmd_embed(const RunConfig& cfg);
CommandResult cmd_certify(const RunConfig& cfg);
CommandResult cmd_bracket(const RunConfig& cfg);
CommandResult cmd_profile(const RunConfig& cfg);

CommandResult run_command(const RunConfig& cfg);

// "[\"...\", ...]" line appended to stdout when audits fail
std::string format_failures(const std::vector<std::string>& failures);

} // namespace coarse
