#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cyberchar/config.hpp"

namespace cyberchar::cli {

namespace fs = std::filesystem;

struct GlobalOptions {
    std::string config_path;               // empty: built-in defaults
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> jobs;
    std::vector<std::string> set;          // extra "key=value" overrides
    bool verbose = false;
    bool plots = false;
};

/// Defaults or the config file, then --set overrides, then --seed/--out/--jobs.
ExperimentConfig resolve_config(const GlobalOptions& g);

/// Writes the 14 datasets and manifest.json to the output directory.
fs::path cmd_generate(const GlobalOptions& g);

/// Trains the three-level classifier on a bundle directory; writes a model directory.
fs::path cmd_train(const GlobalOptions& g, const fs::path& bundle_dir);

/// level{1,2,3}_cm.csv, overall_cm.csv and metrics.csv (plus the
/// out-of-training files when requested). The training config stored with the
/// model is used unless --config is given.
fs::path cmd_eval(const GlobalOptions& g, const fs::path& model_dir, const fs::path& bundle_dir,
                  bool out_of_training = false);

/// sweep.csv ranked by validation F1; sweep_timing.csv only with `timings`,
/// since wall-times differ between runs.
fs::path cmd_sweep(const GlobalOptions& g, const fs::path& bundle_dir, bool timings = false);

/// One line per window: end time, l1, l2, l3 and the fused class name.
std::size_t cmd_classify(const GlobalOptions& g, const fs::path& model_dir, const fs::path& ot_csv,
                         const std::optional<fs::path>& it_csv, const std::optional<fs::path>& catalog,
                         std::ostream& out);

/// Text summary of an eval and/or sweep directory; SVG curves with --plots.
fs::path cmd_report(const GlobalOptions& g, const fs::path& results_dir, std::ostream& out);

std::string binary_cm_csv(const ConfusionMatrix& cm);
std::string overall_cm_csv(const ConfusionMatrix& cm);
std::string metrics_csv(const EvaluationReport& r);
std::string sweep_csv(const SweepReport& r);
SweepReport parse_sweep_csv(std::string_view text);
std::string sweep_timing_csv(const SweepReport& r);

/// Entry point shared by the executable: parses argv, runs the verb, maps
/// errors onto exit codes (2 config, 3 data, 4 invariant).
int run(int argc, char** argv);

}  // namespace cyberchar::cli
