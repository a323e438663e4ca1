#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cyberchar/attacks.hpp"
#include "cyberchar/metrics.hpp"
#include "cyberchar/ml.hpp"
#include "cyberchar/pipeline.hpp"

namespace cyberchar {

struct WindowGeometry {
    std::size_t window_len = 20;
    std::size_t step = 1;
    bool operator==(const WindowGeometry&) const = default;
};

/// Training recipe of one binary level.
struct LevelConfig {
    Hyperparams hp;
    WindowGeometry geometry;
    ScalingMethod scaling = ScalingMethod::Standard;
    double train_ratio = 20.0;  // negatives per positive in the training partition
    double eval_ratio = 30.0;   // negatives per positive in validation and test partitions
    SplitSpec split;
    /// Optional alternatives; the one with the best validation F1 is kept.
    std::vector<Algorithm> candidates;
};

struct ArchitectureParams {
    LevelConfig level1;
    LevelConfig level2;
    LevelConfig level3;
    CleanPolicy clean;
    LabelRule label_rule = LabelRule::AnyAbnormal;

    /// Random forest, 20-sample windows, step 1, standard scaling, 60/20/20,
    /// training ratio 20 and test ratio 30 for Levels 1-2, 1/3 for Level 3.
    static ArchitectureParams defaults();
    void validate() const;
    const LevelConfig& level(int k) const;
    LevelConfig& level(int k);
};

/// A fitted level: scaler + model + the geometry and target it was trained for.
struct LevelModel {
    TrainedModel model;
    ScalerParams scaler;
    WindowGeometry geometry;
    Stream stream = Stream::OT;
    Target target = Target::TripUnavailable;
    std::size_t n_signals = 0;

    std::size_t feature_width() const noexcept { return geometry.window_len * n_signals; }
    /// Scales a copy of the raw window and scores it.
    double score(std::span<const double> raw_window) const;
    std::vector<double> score(const Matrix& raw_windows) const;
    std::vector<std::uint8_t> predict(const Matrix& raw_windows) const;
};

struct ClassifiedWindow {
    LevelOutputs levels;
    FusedClass fused = FusedClass::Normal;
};

struct ThreeLevelClassifier {
    LevelModel level1;  // OT: normal vs trip-unavailable
    LevelModel level2;  // IT: DoS vs not
    LevelModel level3;  // OT: FDI vs other abnormal
    ArchitectureParams params;
    std::uint64_t seed = 0;
    std::uint64_t bundle_fingerprint = 0;

    const LevelModel& level(int k) const;

    /// Levels 1 and 2 always run; Level 3 runs only when Level 1 fires.
    ClassifiedWindow classify_window(std::span<const double> ot_window,
                                     std::span<const double> it_window) const;
    std::vector<ClassifiedWindow> classify_batch(const Matrix& ot_windows, const Matrix& it_windows) const;
};

/// Train / validation / test partitions of one level after rebalancing.
struct LevelPartitions {
    std::array<WindowSet, 3> parts;
    std::size_t pool_positives = 0;
    std::size_t pool_negatives = 0;
};

/// Datasets feeding each level: negatives then positives.
struct LevelPools {
    std::vector<std::string> negatives;
    std::vector<std::string> positives;
};
LevelPools level_pools(int level);

/// Windowed, labeled pool of one level drawn from `bundle` (cleaned frames).
WindowSet level_pool(const UseCaseBundle& bundle, int level, const ArchitectureParams& params,
                     std::optional<WindowGeometry> geometry = std::nullopt);

/// Deterministic split + per-partition rebalancing of a level pool.
LevelPartitions partition_level(const WindowSet& pool, const LevelConfig& cfg, std::uint64_t seed);

struct LevelFit {
    LevelModel model;
    ConfusionMatrix validation;
    Algorithm chosen = Algorithm::RandomForest;
};

/// Fits scaler + model on partitions[0], scores partitions[1].
LevelFit fit_level(const LevelPartitions& partitions, const LevelConfig& cfg, Stream stream,
                   Target target, std::uint64_t seed);

struct ArchitectureTraining {
    ThreeLevelClassifier classifier;
    std::array<LevelPartitions, 3> partitions;
    std::array<ConfusionMatrix, 3> validation;
};

ArchitectureTraining train_architecture_full(const UseCaseBundle& bundle, const ArchitectureParams& params,
                                             std::uint64_t seed);
ThreeLevelClassifier train_architecture(const UseCaseBundle& bundle, const ArchitectureParams& params,
                                        std::uint64_t seed);

/// Content hash of every dataset in the bundle (values, labels, ids).
std::uint64_t bundle_fingerprint(const UseCaseBundle& bundle);

/// IT resampled onto the OT clock by hold-last-observation (samples before the
/// first IT observation take that first observation). Output columns: OT then IT.
/// The result is a frame whose OT matrix holds all signals and whose IT stream is empty.
TelemetryFrame align_ot_it(const TelemetryFrame& frame);

struct CombinedParams {
    LevelConfig level;

    /// Random forest over 20-sample windows of the 78 aligned signals, ratio 1.
    static CombinedParams defaults();
};

struct CombinedClassifier {
    LevelModel model;
    std::uint64_t seed = 0;

    std::uint8_t classify(std::span<const double> window) const;
};

struct CombinedTraining {
    CombinedClassifier classifier;
    LevelPartitions partitions;
    ConfusionMatrix validation;
};

WindowSet combined_pool(const UseCaseBundle& bundle, const CombinedParams& params, const CleanPolicy& clean);
CombinedTraining train_combined_full(const UseCaseBundle& bundle, const CombinedParams& params,
                                     const CleanPolicy& clean, std::uint64_t seed);
CombinedClassifier train_combined(const UseCaseBundle& bundle, const CombinedParams& params, std::uint64_t seed);
std::uint8_t classify_combined(const CombinedClassifier& clf, std::span<const double> window);

}  // namespace cyberchar
