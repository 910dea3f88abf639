#pragma once

#include "dopkey/experiments.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dopkey {

/// Parameter grids of the individual experiments.
struct ExperimentGrids {
    std::vector<int> fig4_pilot_lengths{10, 20, 50};
    int fig4_bins = 50;
    std::vector<int> fig5_pilot_lengths{2, 5, 10, 20, 50};
    std::vector<int> fig6_pilot_lengths{10, 20, 50};
    std::vector<double> fig6_gammas{0.02, 0.05, 0.1, 0.2, 0.35, 0.5};
    double single_run_gamma = 0.2;
    int quadrature_order = 100;
};

struct RunConfig {
    Scenario scenario;
    ExperimentGrids grids;
    std::string source;              // path or "<defaults>"
    std::uint64_t content_hash = 0;  // FNV-1a of the file bytes
};

/// Parses flat `key = value` text; `#` starts a comment. Unknown or repeated
/// keys, malformed values and invariant violations are all collected and
/// reported in one ConfigError.
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");

/// Reads and parses a config file. Throws IoError when it cannot be read.
RunConfig load_config(const std::string& path);

/// Re-validates after command-line overrides; throws ConfigError listing all problems.
void validate_config(const RunConfig& cfg);

/// Documented keys, in the order of the shipped config.
const std::vector<std::string>& config_keys();

std::uint64_t fnv1a64(const std::string& bytes);

} // namespace dopkey
