#include "cyberchar/core_model.hpp"

#include "cyberchar/error.hpp"

namespace cyberchar {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::InsufficientShutdown: return "InsufficientShutdown";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::FrameTooShort: return "FrameTooShort";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::AllNull: return "AllNull";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::NaNFeature: return "NaNFeature";
        case ErrorCode::OverlappingWindows: return "OverlappingWindows";
        case ErrorCode::MissingTemplate: return "MissingTemplate";
        case ErrorCode::IntervalOutsideFrame: return "IntervalOutsideFrame";
        case ErrorCode::MissingDataset: return "MissingDataset";
        case ErrorCode::UndefinedAuc: return "UndefinedAuc";
        case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::DisjointTimeRanges: return "DisjointTimeRanges";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::EmptyGrid:
            return 2;
        case ErrorCode::InvariantViolation:
        case ErrorCode::Unreachable:
            return 4;
        default:
            return 3;
    }
}

bool ScenarioState::is_valid() const noexcept {
    if (trip_available != (trip_cause == TripCause::None)) return false;
    if (fdi_level < 0 || fdi_level > 3) return false;
    if (fdi_level > 0 && trip_cause != TripCause::Cyber) return false;
    return true;
}

std::string ScenarioState::key() const {
    std::string k;
    switch (trip_cause) {
        case TripCause::None: k = "trip-ok"; break;
        case TripCause::Cyber: k = "cyber"; break;
        case TripCause::Malfunction: k = "malfunction"; break;
    }
    if (fdi_level > 0) k += "-fdi" + std::to_string(fdi_level);
    if (dos_level != DosLevel::None) k += "-dos" + std::string(to_string(dos_level));
    return k;
}

ScenarioState make_state(TripCause cause, int fdi_level, DosLevel dos) {
    ScenarioState s{cause == TripCause::None, cause, fdi_level, dos};
    require(s.is_valid(), ErrorCode::InvalidArgument, "invalid scenario state " + s.key());
    return s;
}

std::string_view class_name(FusedClass c) noexcept {
    switch (c) {
        case FusedClass::Normal: return "Normal";
        case FusedClass::Other: return "Other";
        case FusedClass::Fdi: return "FDI";
        case FusedClass::Dos: return "DoS";
        case FusedClass::OtherDos: return "Other+DoS";
        case FusedClass::FdiDos: return "FDI+DoS";
    }
    return "?";
}

FusedClass fused_class_from_int(int value) {
    require(value >= 0 && value < kFusedClassCount, ErrorCode::LabelOutOfRange,
            "fused class out of range: " + std::to_string(value));
    return static_cast<FusedClass>(value);
}

std::string_view to_string(TripCause c) noexcept {
    switch (c) {
        case TripCause::None: return "none";
        case TripCause::Cyber: return "cyber";
        case TripCause::Malfunction: return "malfunction";
    }
    return "?";
}

std::string_view to_string(DosLevel d) noexcept {
    switch (d) {
        case DosLevel::None: return "none";
        case DosLevel::Low: return "low";
        case DosLevel::High: return "high";
    }
    return "?";
}

TripCause parse_trip_cause(std::string_view text) {
    if (text == "none") return TripCause::None;
    if (text == "cyber") return TripCause::Cyber;
    if (text == "malfunction") return TripCause::Malfunction;
    fail(ErrorCode::FormatError, "unknown trip cause '" + std::string(text) + "'");
}

DosLevel parse_dos_level(std::string_view text) {
    if (text == "none") return DosLevel::None;
    if (text == "low") return DosLevel::Low;
    if (text == "high") return DosLevel::High;
    fail(ErrorCode::FormatError, "unknown DoS level '" + std::string(text) + "'");
}

std::vector<ScenarioState> enumerate_states() {
    std::vector<ScenarioState> states;
    states.reserve(14);
    states.push_back(ScenarioState::normal());
    states.push_back(make_state(TripCause::Malfunction, 0, DosLevel::None));
    states.push_back(make_state(TripCause::Cyber, 0, DosLevel::None));
    for (int fdi = 1; fdi <= 3; ++fdi) {
        states.push_back(make_state(TripCause::Cyber, fdi, DosLevel::None));
    }
    for (DosLevel dos : {DosLevel::Low, DosLevel::High}) {
        states.push_back(make_state(TripCause::Cyber, 0, dos));
    }
    for (int fdi = 1; fdi <= 3; ++fdi) {
        for (DosLevel dos : {DosLevel::Low, DosLevel::High}) {
            states.push_back(make_state(TripCause::Cyber, fdi, dos));
        }
    }
    return states;
}

FusedClass fuse_bits(int l1, int l2, int l3) {
    require((l1 == 0 || l1 == 1) && (l2 == 0 || l2 == 1) && (l3 == 0 || l3 == 1),
            ErrorCode::InvalidArgument, "level outputs must be bits");
    const int code = (l1 << 2) | (l2 << 1) | l3;
    switch (code) {
        case 0b000: return FusedClass::Normal;
        case 0b100: return FusedClass::Other;
        case 0b101: return FusedClass::Fdi;
        case 0b010: return FusedClass::Dos;
        case 0b110: return FusedClass::OtherDos;
        case 0b111: return FusedClass::FdiDos;
        default: break;
    }
    fail(ErrorCode::Unreachable, "level code [" + std::to_string(l1) + " " + std::to_string(l2) +
                                     " " + std::to_string(l3) +
                                     "] is unreachable: Level 3 runs only when Level 1 fires");
}

FusedClass fuse_levels(const LevelOutputs& lo) {
    require(lo.l1 == 1 || !lo.l3_evaluated, ErrorCode::Unreachable,
            "Level 3 reported as evaluated while Level 1 is normal");
    return fuse_bits(lo.l1, lo.l2, lo.l3);
}

FusedClass true_class(const ScenarioState& s) {
    require(s.is_valid(), ErrorCode::InvalidArgument, "invalid scenario state " + s.key());
    const bool dos = s.dos_level != DosLevel::None;
    if (s.is_normal()) return FusedClass::Normal;
    if (s.fdi_level > 0) return dos ? FusedClass::FdiDos : FusedClass::Fdi;
    if (s.trip_available) return FusedClass::Dos;
    return dos ? FusedClass::OtherDos : FusedClass::Other;
}

}  // namespace cyberchar
