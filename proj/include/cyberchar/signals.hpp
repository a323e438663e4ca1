#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cyberchar {

enum class SignalKind : std::uint8_t { OT, IT };
enum class ValueKind : std::uint8_t { Continuous, Count, Binary };

/// What physical or network quantity a signal tracks; selects its generator.
enum class SignalRole : std::uint8_t {
    ChannelCounts,
    ChannelRate,
    LinearPower,
    LogPower,
    PoolTemperature,
    TripButton,
    MagnetCurrent,
    MagnetContact,
    RodPosition,
    RodBottom,
    CoolantFlow,
    RadiationMonitor,
    ProcessVariable,
    PacketRate,
    ByteRate,
    Latency,
    Jitter,
    CpuUtil,
    MemUtil,
    Retransmits,
    Connections,
    ProcessCount,
    ServiceCount,
    InterfaceErrors,
};

enum class NoiseModel : std::uint8_t { Multiplicative, Additive };

struct SignalDef {
    int id = 0;
    std::string name;
    SignalKind kind = SignalKind::OT;
    std::string unit;
    ValueKind value_kind = ValueKind::Continuous;
    bool console_displayed = false;

    SignalRole role = SignalRole::ProcessVariable;
    double offset = 0.0;  // value at zero drive (background counts, idle level)
    double gain = 0.0;    // increment at full drive
    double noise = 0.0;   // default noise scale (relative or absolute per noise_model)
    NoiseModel noise_model = NoiseModel::Additive;
    int source = -1;      // OT column feeding a derived signal (channel rate)
};

class SignalCatalog {
public:
    SignalCatalog() = default;
    SignalCatalog(std::vector<SignalDef> ot, std::vector<SignalDef> it);

    const std::vector<SignalDef>& ot() const noexcept { return ot_; }
    const std::vector<SignalDef>& it() const noexcept { return it_; }
    std::size_t ot_count() const noexcept { return ot_.size(); }
    std::size_t it_count() const noexcept { return it_.size(); }
    std::size_t total() const noexcept { return ot_.size() + it_.size(); }

    /// Column of a named OT / IT signal; throws InvalidArgument if absent.
    std::size_t ot_index(std::string_view name) const;
    std::size_t it_index(std::string_view name) const;
    std::size_t trip_button() const;
    std::size_t packet_rate() const;

    /// OT columns flagged as shown on the operator console.
    std::vector<std::size_t> console_signals() const;

    bool operator==(const SignalCatalog&) const;

private:
    std::vector<SignalDef> ot_;
    std::vector<SignalDef> it_;
};

namespace signal_names {
inline constexpr std::string_view kCh1Cps = "ch1_cps";
inline constexpr std::string_view kCh1Rate = "ch1_rate";
inline constexpr std::string_view kCh2Cps = "ch2_cps";
inline constexpr std::string_view kCh3Cps = "ch3_cps";
inline constexpr std::string_view kCh4Cps = "ch4_cps";
inline constexpr std::string_view kTripButton = "trip_button";
inline constexpr std::string_view kPacketRate = "packet_rate";
}  // namespace signal_names

/// 67 OT and 11 IT signals modelled on a pool-type research reactor console.
const SignalCatalog& default_catalog();

std::string_view to_string(SignalRole role) noexcept;
SignalRole parse_signal_role(std::string_view text);
std::string_view to_string(ValueKind kind) noexcept;
ValueKind parse_value_kind(std::string_view text);

}  // namespace cyberchar
