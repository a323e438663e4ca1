#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cyberchar/architecture.hpp"
#include "cyberchar/metrics.hpp"

namespace cyberchar {

struct LevelReport {
    int level = 1;
    ConfusionMatrix cm;
    MetricsReport metrics;
    std::optional<RocCurve> roc;
};

struct EvaluationReport {
    std::string scenario;
    std::array<LevelReport, 3> levels;
    ConfusionMatrix overall{kFusedClassCount};
    double overall_accuracy = 0.0;
};

/// Scores one level on a labeled window set; ROC only when both classes are present.
LevelReport evaluate_level(const LevelModel& model, const WindowSet& test, int level, bool with_roc = false);

/// Per-level test sets of a bundle the classifier was not trained on: each
/// level pool rebalanced at the level's evaluation ratio.
std::array<WindowSet, 3> level_test_sets(const UseCaseBundle& bundle, const ArchitectureParams& params,
                                         std::uint64_t seed);

/// One 6-class decision per OT window of `frame`, with its aligned IT window.
struct FrameDecisions {
    std::vector<int> truth;  // true_class of each window's state
    std::vector<ClassifiedWindow> decisions;
    std::vector<double> end_time;
};

FrameDecisions classify_frame(const ThreeLevelClassifier& clf, const TelemetryFrame& frame);

/// DoS applied over normal OT data, which is the only way to present the DoS-only class.
std::vector<DatasetRecord> dos_probes(const UseCaseBundle& bundle, const UseCaseConfig& config, std::uint64_t seed);

/// 6-class confusion over every window of the given datasets.
ConfusionMatrix evaluate_overall(const ThreeLevelClassifier& clf, const std::vector<DatasetRecord>& datasets);

/// Level reports from the given test sets plus the overall matrix of `overall_sets`.
EvaluationReport evaluate(const ThreeLevelClassifier& clf, const std::array<WindowSet, 3>& test_sets,
                          const std::vector<DatasetRecord>& overall_sets, bool with_roc = false);

/// Channel 3 and 4 falsification plus a traffic flood on a fresh trip-unavailable
/// period; Level 3 negatives are fresh baseline windows.
struct OutOfTrainingConfig {
    std::vector<std::string> fdi_signals = {"ch3_cps", "ch4_cps"};
    DosLevel dos = DosLevel::Low;
    int fdi_level = 2;
};

EvaluationReport out_of_training_eval(const ThreeLevelClassifier& clf, const UseCaseConfig& config,
                                      const OutOfTrainingConfig& oot, std::uint64_t seed);

/// Axes of the parameter sweep. Empty axes fall back to the level's base value.
struct SweepGrid {
    int level = 1;
    std::vector<std::size_t> window_len;
    std::vector<std::size_t> window_step;
    std::vector<double> train_ratio;
    std::vector<ScalingMethod> scaling;
    std::vector<Algorithm> algorithm;
    std::vector<SplitSpec> split;
    std::vector<double> abnormal_fraction;  // share of pool positives kept
    std::size_t budget = 0;                 // 0: every combination
    std::size_t n_jobs = 1;
    std::optional<std::size_t> n_trees;     // overrides the forest size for every row

    /// Two values per axis, 64 combinations.
    static SweepGrid desk();
    /// Window {5,10,15,20,30}, step {1,2,3,4,5}, ratio {1,3,5,10,20,30}, both scalings,
    /// all five algorithms, splits {60/20/20, 70/15/15, 80/10/10}.
    static SweepGrid full();
    std::size_t size() const;
};

struct SweepRow {
    std::size_t index = 0;  // position in the full grid enumeration
    std::size_t window_len = 0;
    std::size_t window_step = 0;
    double train_ratio = 0.0;
    ScalingMethod scaling = ScalingMethod::Standard;
    Algorithm algorithm = Algorithm::RandomForest;
    SplitSpec split;
    double abnormal_fraction = 1.0;
    std::uint64_t seed = 0;
    ConfusionMatrix validation;
    MetricsReport metrics;
    double fit_seconds = 0.0;
};

struct SweepReport {
    int level = 1;
    std::size_t grid_size = 0;
    std::vector<SweepRow> rows;  // validation F1 descending, grid order among ties
};

SweepReport sweep(const UseCaseBundle& bundle, const SweepGrid& grid, const ArchitectureParams& base,
                  std::uint64_t seed);

/// Mean validation F1 per value of one axis, for sensitivity plots.
struct SensitivityCurve {
    std::string axis;
    std::vector<std::string> labels;
    std::vector<double> x;
    std::vector<double> mean_f1;
};

std::vector<SensitivityCurve> sensitivity_curves(const SweepReport& report);
std::string render_svg(const SensitivityCurve& curve);

}  // namespace cyberchar
