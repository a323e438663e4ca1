#include "cyberchar/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cyberchar/error.hpp"

namespace cyberchar {

std::vector<MaskEntry> TelemetryFrame::mask_of(MaskKind kind) const {
    std::vector<MaskEntry> out;
    for (const auto& e : mask) {
        if (e.kind == kind) out.push_back(e);
    }
    return out;
}

void TelemetryFrame::validate() const {
    auto check = [](bool ok, const char* what) {
        require(ok, ErrorCode::InvariantViolation, std::string("telemetry frame: ") + what);
    };
    check(ot.rows() == ot_times.size(), "OT row count differs from time axis");
    check(ot_state.size() == ot_times.size(), "OT state labels differ from time axis");
    check(ot_mode.size() == ot_times.size(), "OT mode labels differ from time axis");
    check(it.rows() == it_times.size(), "IT row count differs from time axis");
    check(it_state.size() == it_times.size(), "IT state labels differ from time axis");
    check(it_mode.size() == it_times.size(), "IT mode labels differ from time axis");
    for (std::size_t k = 1; k < ot_times.size(); ++k) {
        check(ot_times[k] - ot_times[k - 1] == 1.0, "OT clock is not uniform 1 s");
    }
    for (std::size_t k = 1; k < it_times.size(); ++k) {
        check(it_times[k] > it_times[k - 1], "IT clock is not strictly increasing");
    }
}

bool TelemetryFrame::operator==(const TelemetryFrame& other) const {
    return ot_times == other.ot_times && ot.bitwise_equal(other.ot) &&
           ot_state == other.ot_state && ot_mode == other.ot_mode &&
           it_times == other.it_times && it.bitwise_equal(other.it) &&
           it_state == other.it_state && it_mode == other.it_mode && mask == other.mask;
}

TelemetryFrame slice_frame(const TelemetryFrame& frame, std::size_t first, std::size_t count) {
    require(first + count <= frame.timesteps(), ErrorCode::IntervalOutsideFrame,
            "slice exceeds frame length");
    TelemetryFrame out;
    const double t0 = count ? frame.ot_times[first] : 0.0;
    out.ot = Matrix(count, frame.ot.cols());
    for (std::size_t r = 0; r < count; ++r) {
        out.ot_times.push_back(frame.ot_times[first + r] - t0);
        std::copy_n(frame.ot.row(first + r).begin(), frame.ot.cols(), out.ot.row(r).begin());
        out.ot_state.push_back(frame.ot_state[first + r]);
        out.ot_mode.push_back(frame.ot_mode[first + r]);
    }
    const double t_end = t0 + static_cast<double>(count);
    std::vector<std::size_t> it_rows;
    std::vector<std::uint32_t> it_new_index(frame.it_samples(), UINT32_MAX);
    for (std::size_t r = 0; r < frame.it_samples(); ++r) {
        if (frame.it_times[r] >= t0 && frame.it_times[r] < t_end) {
            it_new_index[r] = static_cast<std::uint32_t>(it_rows.size());
            it_rows.push_back(r);
        }
    }
    out.it = Matrix(it_rows.size(), frame.it.cols());
    for (std::size_t k = 0; k < it_rows.size(); ++k) {
        const std::size_t r = it_rows[k];
        out.it_times.push_back(frame.it_times[r] - t0);
        std::copy_n(frame.it.row(r).begin(), frame.it.cols(), out.it.row(k).begin());
        out.it_state.push_back(frame.it_state[r]);
        out.it_mode.push_back(frame.it_mode[r]);
    }
    for (const auto& e : frame.mask) {
        if (e.stream == Stream::OT) {
            if (e.row >= first && e.row < first + count) {
                MaskEntry m = e;
                m.row = static_cast<std::uint32_t>(e.row - first);
                out.mask.push_back(m);
            }
        } else if (it_new_index[e.row] != UINT32_MAX) {
            MaskEntry m = e;
            m.row = it_new_index[e.row];
            out.mask.push_back(m);
        }
    }
    return out;
}

std::string_view to_string(Mode m) noexcept {
    return m == Mode::Operating ? "operating" : "shutdown";
}

Mode parse_mode(std::string_view text) {
    if (text == "operating") return Mode::Operating;
    if (text == "shutdown") return Mode::Shutdown;
    fail(ErrorCode::FormatError, "unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(MaskKind k) noexcept {
    switch (k) {
        case MaskKind::Outlier: return "outlier";
        case MaskKind::Null: return "null";
        case MaskKind::Falsified: return "falsified";
    }
    return "?";
}

MaskKind parse_mask_kind(std::string_view text) {
    if (text == "outlier") return MaskKind::Outlier;
    if (text == "null") return MaskKind::Null;
    if (text == "falsified") return MaskKind::Falsified;
    fail(ErrorCode::FormatError, "unknown mask kind '" + std::string(text) + "'");
}

}  // namespace cyberchar
