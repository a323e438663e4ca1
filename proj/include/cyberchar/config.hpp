#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cyberchar/eval.hpp"

namespace cyberchar {

/// Everything an experiment depends on. Serialises to flat `section.key = value` text.
struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::string catalog = "default";  // "default" or a catalog JSON path
    std::string output_dir = "out";
    std::string created = "1970-01-01T00:00:00Z";  // stamped into manifests
    std::size_t jobs = 1;
    bool roc = false;

    UseCaseConfig use_case;
    ArchitectureParams architecture = ArchitectureParams::defaults();
    CombinedParams combined = CombinedParams::defaults();
    SweepGrid sweep = SweepGrid::desk();
    OutOfTrainingConfig out_of_training;
    /// Per-level FDI target signal names; empty lists keep the nested console defaults.
    std::array<std::vector<std::string>, 3> fdi_targets;

    /// Loads a non-default catalog and maps FDI target names onto it.
    void resolve(const std::string& base_dir = "");
    void validate() const;
};

/// Parses flat key-value text (`#` comments, blank lines ignored) on top of the
/// defaults. Unknown keys and bad values raise ConfigError naming the line.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "config");

/// JSON alternative: nested objects flatten to dotted keys, arrays to comma lists.
ExperimentConfig parse_config_json(std::string_view text, const std::string& source = "config");

/// Reads a file, choosing the JSON parser for `.json` paths. Relative catalog
/// paths are resolved against the config file's directory.
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);

/// Applies one assignment, as if it were a config line.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

}  // namespace cyberchar
