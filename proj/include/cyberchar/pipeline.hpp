#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cyberchar/matrix.hpp"
#include "cyberchar/telemetry.hpp"

namespace cyberchar {

struct CleanPolicy {
    bool clip_outliers = false;
    double mad_k = 5.0;  // clip to median +/- k * 1.4826 * MAD when enabled
};

/// Hold-last imputation of nulls on both streams (leading nulls take the first
/// valid value), optionally followed by MAD clipping. Throws AllNull when a
/// signal has no valid sample.
TelemetryFrame clean(const TelemetryFrame& frame, const CleanPolicy& policy = {});
void clean_matrix(Matrix& values, const CleanPolicy& policy = {});

enum class ScalingMethod : std::uint8_t { MinMax, Standard };
std::string_view to_string(ScalingMethod m) noexcept;
ScalingMethod parse_scaling(std::string_view text);

/// Per-signal affine map x -> (x - center) / scale. Features of a flattened
/// window are time-major, so feature k belongs to signal k % n_signals.
struct ScalerParams {
    ScalingMethod method = ScalingMethod::Standard;
    std::vector<double> center;
    std::vector<double> scale;

    std::size_t n_signals() const noexcept { return center.size(); }
    void apply(std::span<double> features) const;
    void apply(Matrix& features) const;
    Matrix transformed(const Matrix& features) const;
    void invert(Matrix& features) const;

    bool operator==(const ScalerParams&) const = default;
};

inline constexpr double kStdFloor = 1e-12;

/// Statistics pooled over every window position of each signal.
ScalerParams fit_scaler(const Matrix& features, std::size_t n_signals, ScalingMethod method);

enum class LabelRule : std::uint8_t { AnyAbnormal, LastTimestep };

/// Which state component makes a timestep positive for a binary task.
enum class Target : std::uint8_t {
    Abnormal,         // anything but the normal state
    TripUnavailable,  // Level 1
    Dos,              // Level 2
    Fdi,              // Level 3
};

bool is_positive(Target target, const ScenarioState& s) noexcept;
std::string_view to_string(Target t) noexcept;

struct WindowOrigin {
    std::uint32_t frame = 0;
    std::uint32_t start = 0;

    bool operator==(const WindowOrigin&) const = default;
};

struct WindowSet {
    Matrix features;
    std::vector<std::uint8_t> labels;
    std::vector<ScenarioState> states;  // most recent non-normal state inside the window
    std::vector<WindowOrigin> origin;
    std::vector<double> end_time;       // timestamp of the last sample in the window
    std::size_t window_len = 0;
    std::size_t step = 1;
    std::size_t n_signals = 0;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t positives() const noexcept;
    std::size_t negatives() const noexcept { return size() - positives(); }

    WindowSet subset(const std::vector<std::size_t>& rows) const;
    void append(const WindowSet& other);
};

/// floor((T - W) / step) + 1 for T >= W, else 0.
std::size_t window_count(std::size_t T, std::size_t window_len, std::size_t step);

/// Sliding windows over all columns of `values`; each row flattens samples
/// [i*step, i*step + W) time-major.
WindowSet windowize(const Matrix& values, const std::vector<ScenarioState>& states,
                    const std::vector<double>& times, std::size_t window_len, std::size_t step,
                    Target target, LabelRule rule = LabelRule::AnyAbnormal, std::uint32_t frame_id = 0);

WindowSet windowize(const TelemetryFrame& frame, Stream stream, std::size_t window_len,
                    std::size_t step, Target target, LabelRule rule = LabelRule::AnyAbnormal,
                    std::uint32_t frame_id = 0);

/// One IT window per OT window of the same frame: the `it_window_len` IT samples
/// ending at the last IT timestamp not after the OT window's end; missing
/// history is padded with the earliest IT sample.
WindowSet aligned_it_windows(const TelemetryFrame& frame, std::size_t ot_window_len,
                             std::size_t ot_step, std::size_t it_window_len, Target target,
                             LabelRule rule = LabelRule::AnyAbnormal, std::uint32_t frame_id = 0);

/// Indices kept when negatives are subsampled to llround(ratio * n_positive).
/// Throws InsufficientDataError with the achievable ratio when too few negatives exist.
std::vector<std::size_t> rebalance_indices(const std::vector<std::uint8_t>& labels, double ratio,
                                           std::uint64_t seed);
WindowSet rebalance(const WindowSet& windows, double ratio, std::uint64_t seed);

/// Like rebalance, but first subsamples positives to the largest count whose
/// ratio the available negatives can honor.
WindowSet rebalance_within_budget(const WindowSet& windows, double ratio, std::uint64_t seed);

struct SplitSpec {
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;
    std::uint64_t seed = 0;
    bool shuffle = true;  // false: contiguous blocks in time order per class

    void validate() const;
    static SplitSpec parse(std::string_view text);  // "60/20/20" or "0.6/0.2/0.2"
    std::string to_text() const;
};

/// Stratified split; returns index lists for train, validation and test.
std::array<std::vector<std::size_t>, 3> split_indices(const std::vector<std::uint8_t>& labels,
                                                      const SplitSpec& spec);
std::array<WindowSet, 3> split(const WindowSet& windows, const SplitSpec& spec);

}  // namespace cyberchar
