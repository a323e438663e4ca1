#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cyberchar/core_model.hpp"
#include "cyberchar/matrix.hpp"

namespace cyberchar {

enum class Mode : std::uint8_t { Operating, Shutdown };
enum class Stream : std::uint8_t { OT, IT };

enum class MaskKind : std::uint8_t { Outlier, Null, Falsified };

struct MaskEntry {
    Stream stream = Stream::OT;
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    MaskKind kind = MaskKind::Outlier;
    double original = 0.0;  // clean value before the cell was modified

    bool operator==(const MaskEntry&) const = default;
};

/// Time-indexed OT and IT matrices (rows = samples, columns = signals) with
/// per-sample state and mode labels. NaN cells are nulls.
struct TelemetryFrame {
    std::vector<double> ot_times;
    Matrix ot;
    std::vector<ScenarioState> ot_state;
    std::vector<Mode> ot_mode;

    std::vector<double> it_times;
    Matrix it;
    std::vector<ScenarioState> it_state;
    std::vector<Mode> it_mode;

    std::vector<MaskEntry> mask;

    std::size_t timesteps() const noexcept { return ot_times.size(); }
    std::size_t it_samples() const noexcept { return it_times.size(); }
    std::size_t ot_points() const noexcept { return ot.rows() * ot.cols(); }
    std::size_t it_points() const noexcept { return it.rows() * it.cols(); }

    const Matrix& values(Stream s) const noexcept { return s == Stream::OT ? ot : it; }
    const std::vector<double>& times(Stream s) const noexcept {
        return s == Stream::OT ? ot_times : it_times;
    }
    const std::vector<ScenarioState>& states(Stream s) const noexcept {
        return s == Stream::OT ? ot_state : it_state;
    }

    /// Mask entries of one kind.
    std::vector<MaskEntry> mask_of(MaskKind kind) const;

    /// Checks shape consistency of all parallel arrays; throws InvariantViolation.
    void validate() const;

    bool operator==(const TelemetryFrame& other) const;
};

/// Copy of rows [first, first+count) of the OT stream and the IT samples whose
/// timestamps fall in the same interval; times are re-based to start at zero.
TelemetryFrame slice_frame(const TelemetryFrame& frame, std::size_t first, std::size_t count);

std::string_view to_string(Mode m) noexcept;
Mode parse_mode(std::string_view text);
std::string_view to_string(MaskKind k) noexcept;
MaskKind parse_mask_kind(std::string_view text);

}  // namespace cyberchar
