#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cyberchar/simulator.hpp"

namespace cyberchar {

struct FdiSpec {
    int level = 1;
    std::size_t half_window_s = 60;
    std::vector<std::size_t> targets;  // OT columns overwritten by trip templates

    /// Nested console targets: {ch1 cps}, {+ ch1 rate}, {+ ch2 cps}.
    static FdiSpec defaults(int level, const SignalCatalog& catalog);
    void validate(const SignalCatalog& catalog) const;
};

/// Throws InvalidArgument unless targets(level k) is a strict subset of targets(level k+1).
void validate_fdi_nesting(const std::vector<FdiSpec>& specs);

struct DosSpec {
    DosLevel intensity = DosLevel::Low;
    double mean_rate = 870.0;  // packets/s
    double start_s = 0.0;
    double end_s = 1560.0;
    double rate_noise = 0.04;     // relative fluctuation of the flood rate
    double it_sample_loss = 0.0;  // fraction of in-interval IT samples dropped

    static DosSpec defaults(DosLevel intensity, double start_s, double end_s);
    void validate(double baseline_rate) const;
};

/// Trip-button cadence: one pulse every `pulse_period_s` over `duration_s`.
std::vector<std::size_t> pulse_rows(double pulse_period_s, double duration_s);

/// Centres of `n_trips` evenly spaced trip events over `duration_s`
/// (duration/n apart, first one half a spacing in).
std::vector<std::size_t> trip_event_rows(double duration_s, std::size_t n_trips);

/// Sets the trip-button indication on the pulse cadence over the first
/// `duration_s` seconds while leaving every other signal untouched, and labels
/// those timesteps trip-unavailable with the given cause.
TelemetryFrame emulate_trip_unavailable(const TelemetryFrame& frame, const SignalCatalog& catalog,
                                        TripCause cause, double pulse_period_s = 20.0,
                                        double duration_s = 1560.0, std::size_t n_trips = 13);

/// Splices trip templates over [t - h, t + h) of each target signal around every
/// trip row; records each overwritten cell as a Falsified mask entry.
TelemetryFrame inject_fdi(const TelemetryFrame& frame, const FdiSpec& spec,
                          const TemplateSet& templates, const std::vector<std::size_t>& trip_rows);

/// Redraws the IT packet rate around spec.mean_rate inside the interval and
/// raises the dependent IT signals; OT values are left bit-identical.
TelemetryFrame apply_dos(const TelemetryFrame& frame, const SignalCatalog& catalog,
                         const DosSpec& spec, std::uint64_t seed);

struct UseCaseConfig {
    SignalCatalog catalog = default_catalog();
    OpSchedule normal_schedule = default_normal_schedule();
    ArtifactConfig artifacts;
    DynamicsConfig dynamics;

    double abnormal_power_percent = 60.0;
    double abnormal_duration_s = 1560.0;
    double pulse_period_s = 20.0;
    std::size_t n_trips = 13;
    std::size_t half_window_s = 60;
    /// Power levels of the reserve trips whose windows become FDI templates.
    std::vector<double> reserve_trip_powers = {100, 90, 80, 30, 20, 100, 85, 95, 25, 15, 100, 90, 35, 80};
    double reserve_hold_s = 300.0;
    double reserve_shutdown_s = 200.0;

    double dos_low_rate = 870.0;
    double dos_high_rate = 24000.0;
    double dos_start_s = 0.0;
    std::optional<double> dos_end_s;  // default: end of the abnormal period
    double dos_rate_noise = 0.04;
    double dos_it_sample_loss = 0.0;

    /// Per-level FDI targets; empty entries take FdiSpec::defaults.
    std::array<std::vector<std::size_t>, 3> fdi_targets;

    void validate() const;
    FdiSpec fdi_spec(int level) const;
    DosSpec dos_spec(DosLevel intensity) const;
    OpSchedule reserve_schedule() const;
    OpSchedule abnormal_schedule() const;
};

struct DatasetRecord {
    std::string id;
    ScenarioState state;
    std::uint64_t seed = 0;
    std::string description;
    TelemetryFrame frame;
};

struct UseCaseBundle {
    SignalCatalog catalog;
    std::uint64_t seed = 0;
    std::vector<DatasetRecord> datasets;

    const DatasetRecord& get(const std::string& id) const;
    const DatasetRecord* find(const std::string& id) const noexcept;
    const DatasetRecord* find(const ScenarioState& state) const noexcept;

    /// Checks the 14-entry shape and per-timestep label consistency.
    void validate() const;
};

/// Stable identifiers of the 14 use-case datasets.
namespace dataset_ids {
inline constexpr const char* kNormal = "normal";
inline constexpr const char* kCyberBaseline = "trip_unavailable_cyber";
inline constexpr const char* kMalfunction = "trip_unavailable_malfunction";
}  // namespace dataset_ids

std::string dataset_id(const ScenarioState& state);

/// Normal operation data, the reserve frame for FDI templates and the
/// trip-unavailable base period. Exposed so related scenarios (for instance
/// out-of-training attacks) can be built from the same ingredients.
struct UseCaseIngredients {
    TelemetryFrame normal;
    TelemetryFrame reserve;
    TelemetryFrame cyber_baseline;
    std::vector<std::size_t> trip_rows;
};

UseCaseIngredients build_ingredients(const UseCaseConfig& config, std::uint64_t seed);

/// All 14 datasets. The malfunction dataset carries the cyber baseline's content
/// relabeled with a malfunction cause; DoS datasets sit on the cyber baseline.
UseCaseBundle build_use_case(const UseCaseConfig& config, std::uint64_t seed);

}  // namespace cyberchar
