#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cyberchar/signals.hpp"
#include "cyberchar/telemetry.hpp"

namespace cyberchar {

struct ScheduleSegment {
    double target_power_percent = 0.0;
    double duration_s = 0.0;
    bool ends_in_trip = false;

    bool operator==(const ScheduleSegment&) const = default;
};

struct OpSchedule {
    std::vector<ScheduleSegment> segments;

    void validate() const;
    std::size_t total_timesteps() const;

    /// Text form "P:D[:trip],P:D,...", e.g. "50:600,100:900:trip,0:300".
    static OpSchedule parse(std::string_view text);
    std::string to_text() const;

    bool operator==(const OpSchedule&) const = default;
};

/// Four hours of mixed power levels with four trips and roughly a fifth of the
/// time in shutdown.
OpSchedule default_normal_schedule();

struct ArtifactConfig {
    double outlier_rate = 4.82e-4;
    double outlier_operating_share = 0.9802;
    double null_rate = 7.8e-3;
    double null_cluster_mean_len = 30.0;
    double outlier_min_scale = 5.0;
    double outlier_max_scale = 50.0;
    /// Per-signal noise scales, OT columns then IT columns; empty = catalog defaults.
    std::vector<double> noise_scales;
    /// Multiplier applied to the catalog defaults when noise_scales is empty.
    double noise_gain = 1.0;

    void validate(const SignalCatalog& catalog) const;
    double noise_scale(const SignalCatalog& catalog, Stream s, std::size_t col) const;

    /// Configuration that leaves frames untouched: no outliers, nulls or noise.
    static ArtifactConfig none();
};

/// Plant dynamics knobs. Values are plausible rather than fitted.
struct DynamicsConfig {
    double power_lag_s = 30.0;
    double prompt_fraction = 0.06;  // fraction of power left right after rod insertion
    double decay_time_s = 40.0;     // e-folding time of power after shutdown
    double temperature_lag_s = 600.0;
    double rate_smoothing = 0.3;    // EMA weight for channel change-rate signals
    double it_rate_hz = 900.0 / 1560.0;
    double it_noise_correlation = 0.8;

    void validate() const;
};

/// Normal-operation OT/IT telemetry following `schedule`, labeled with the normal
/// state. Noise comes from `artifacts.noise_scales`; outliers and nulls are added
/// separately by inject_artifacts.
TelemetryFrame generate_normal(const SignalCatalog& catalog, const OpSchedule& schedule,
                               const ArtifactConfig& artifacts, std::uint64_t seed,
                               const DynamicsConfig& dynamics = {});

/// Adds single-sample outlier spikes and shutdown-only null clusters to the OT
/// stream, recording each modified cell (with its clean value) in frame.mask.
TelemetryFrame inject_artifacts(const TelemetryFrame& frame, const SignalCatalog& catalog,
                                const ArtifactConfig& artifacts, std::uint64_t seed);

/// Row indices where the trip button reads 1.
std::vector<std::size_t> trip_rows(const TelemetryFrame& frame, const SignalCatalog& catalog);

struct TripTemplate {
    std::size_t trip_ordinal = 0;  // index among usable trips of the source frame
    std::size_t trip_row = 0;
    std::size_t signal = 0;        // OT column
    std::vector<double> samples;   // 2*half_window+1 values centred on the trip

    std::size_t center() const noexcept { return samples.size() / 2; }
};

struct TemplateSet {
    std::vector<TripTemplate> templates;
    std::size_t trips_used = 0;
    std::size_t trips_skipped = 0;  // trips closer than half_window to a frame edge

    const TripTemplate* find(std::size_t trip_ordinal, std::size_t signal) const noexcept;
};

TemplateSet extract_trip_templates(const TelemetryFrame& frame, const SignalCatalog& catalog,
                                   const std::vector<std::size_t>& targets,
                                   std::size_t half_window = 60);

}  // namespace cyberchar
