#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace filterlab::cli {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2 };

/// Everything a run depends on. The manifest records the canonical command
/// line built from these fields, so a manifest is enough to repeat a run.
struct RunConfig {
    std::string subcommand;
    std::string model = "xor";  ///< xor | noisy-xor | pair-chain | rwrs | <model file>
    double eps = 0.3;
    std::size_t n = 100;
    long J = 2000;
    std::size_t replicates = 10000;
    std::string horizons;  ///< comma separated; empty means the subcommand default
    double delta = 0.0;
    std::size_t min_overlap = 25;
    std::uint64_t seed = 1;
    std::string out;       ///< empty: standard output
    std::string manifest;  ///< empty: <out>.manifest.json, or standard error without --out
    std::size_t threads = 0;

    std::string kappa = "square";
    std::string f;  ///< statistic values, comma separated; XOR models default to current-bit-0
    std::string prior = "mu";
    std::string prior2 = "truth";
    std::string cylinder = "1=0";
    std::size_t min_atom_count = 30;
    std::string input;
    std::string input2;
    std::string eps_list = "0.1,0.3,1,10";
    long stopping_times = -1;
};

/// Runs one command line (args excludes the program name). Tables go to
/// `out` unless --out names a file; diagnostics and, without --out, the
/// manifest go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace filterlab::cli
