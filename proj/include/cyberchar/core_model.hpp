#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cyberchar {

enum class TripCause : std::uint8_t { None, Cyber, Malfunction };
enum class DosLevel : std::uint8_t { None, Low, High };

/// System condition at one instant: trip availability/cause, FDI depth and DoS intensity.
///
/// Valid states satisfy: trip available exactly when there is no trip cause, and
/// falsification only happens in the cyber branch (fdi_level > 0 implies a cyber cause).
struct ScenarioState {
    bool trip_available = true;
    TripCause trip_cause = TripCause::None;
    int fdi_level = 0;
    DosLevel dos_level = DosLevel::None;

    static constexpr ScenarioState normal() noexcept { return {}; }

    bool is_valid() const noexcept;
    bool is_normal() const noexcept {
        return trip_available && fdi_level == 0 && dos_level == DosLevel::None;
    }

    /// Short stable identifier, e.g. "cyber-fdi2-doslow".
    std::string key() const;

    auto operator<=>(const ScenarioState&) const = default;
};

/// Builds a state and validates it, throwing InvalidArgument on violation.
ScenarioState make_state(TripCause cause, int fdi_level, DosLevel dos);

struct LevelOutputs {
    std::uint8_t l1 = 0;
    std::uint8_t l2 = 0;
    std::uint8_t l3 = 0;
    bool l3_evaluated = false;

    bool operator==(const LevelOutputs&) const = default;
};

enum class FusedClass : std::uint8_t {
    Normal = 0,
    Other = 1,
    Fdi = 2,
    Dos = 3,
    OtherDos = 4,
    FdiDos = 5,
};

inline constexpr int kFusedClassCount = 6;

std::string_view class_name(FusedClass c) noexcept;
constexpr int to_int(FusedClass c) noexcept { return static_cast<int>(c); }
FusedClass fused_class_from_int(int value);

std::string_view to_string(TripCause c) noexcept;
std::string_view to_string(DosLevel d) noexcept;
TripCause parse_trip_cause(std::string_view text);
DosLevel parse_dos_level(std::string_view text);

/// The 14 use-case states: normal, two trip-unavailable baselines, three FDI depths,
/// two DoS intensities and the six FDI x DoS combinations.
std::vector<ScenarioState> enumerate_states();

/// Truth-table fusion of the three level verdicts. Codes [0 0 1] and [0 1 1]
/// cannot arise under Level-3 gating and raise ErrorCode::Unreachable.
FusedClass fuse_levels(const LevelOutputs& lo);
FusedClass fuse_bits(int l1, int l2, int l3);

/// Ground-truth event class of a state, used to score the fused classifier.
FusedClass true_class(const ScenarioState& s);

}  // namespace cyberchar
