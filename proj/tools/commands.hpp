#ifndef PERMA_CLI_COMMANDS_HPP
#define PERMA_CLI_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace perma::cli {

/// Exit codes: 0 pass/certified, 1 mathematical violation or failed check,
/// 2 usage, I/O or parse problems.
inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
    double alpha = 1.0;
    double epsilon = 1e-8;       // pmf table mass-deficit target
    std::uint64_t n_draws = 1'000'000;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string suite = "all";   // all | exact | mc | sym
    std::string format = "json"; // json | text
    std::string out_path;
    std::string witness_dir = ".";
};

/// Runs the full command line (excluding argv[0]); writes to the given
/// streams.  Never throws: failures map to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace perma::cli

#endif
