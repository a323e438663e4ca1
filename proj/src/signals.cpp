#include "cyberchar/signals.hpp"

#include <cstdio>

#include "cyberchar/error.hpp"

namespace cyberchar {

namespace {

SignalDef ot(std::string name, std::string unit, ValueKind vk, SignalRole role, double offset,
             double gain, double noise, NoiseModel nm, bool console = false, int source = -1) {
    SignalDef d;
    d.name = std::move(name);
    d.kind = SignalKind::OT;
    d.unit = std::move(unit);
    d.value_kind = vk;
    d.console_displayed = console;
    d.role = role;
    d.offset = offset;
    d.gain = gain;
    d.noise = noise;
    d.noise_model = nm;
    d.source = source;
    return d;
}

SignalDef it(std::string name, std::string unit, ValueKind vk, SignalRole role, double offset,
             double noise) {
    SignalDef d;
    d.name = std::move(name);
    d.kind = SignalKind::IT;
    d.unit = std::move(unit);
    d.value_kind = vk;
    d.role = role;
    d.offset = offset;
    d.noise = noise;
    d.noise_model = NoiseModel::Multiplicative;
    return d;
}

SignalCatalog build_default_catalog() {
    using VK = ValueKind;
    using R = SignalRole;
    using NM = NoiseModel;
    std::vector<SignalDef> o;
    o.push_back(ot("ch1_cps", "counts/s", VK::Count, R::ChannelCounts, 5.0, 2.0e6, 0.01, NM::Multiplicative, true));
    o.push_back(ot("ch1_rate", "dpm", VK::Continuous, R::ChannelRate, 0.0, 0.0, 0.0, NM::Additive, true, 0));
    o.push_back(ot("ch2_cps", "counts/s", VK::Count, R::ChannelCounts, 3.0, 1.5e5, 0.012, NM::Multiplicative, true));
    o.push_back(ot("ch3_cps", "counts/s", VK::Count, R::ChannelCounts, 2.0, 8.0e4, 0.015, NM::Multiplicative));
    o.push_back(ot("ch4_cps", "counts/s", VK::Count, R::ChannelCounts, 2.0, 6.0e4, 0.015, NM::Multiplicative));
    o.push_back(ot("ch2_rate", "dpm", VK::Continuous, R::ChannelRate, 0.0, 0.0, 0.0, NM::Additive, false, 2));
    o.push_back(ot("linear_power", "%", VK::Continuous, R::LinearPower, 0.0, 100.0, 0.006, NM::Multiplicative));
    o.push_back(ot("log_power", "log10 W", VK::Continuous, R::LogPower, 0.0, 1000.0, 0.004, NM::Additive));
    o.push_back(ot("pool_temp_top", "degC", VK::Continuous, R::PoolTemperature, 22.0, 6.0, 0.03, NM::Additive));
    o.push_back(ot("pool_temp_bottom", "degC", VK::Continuous, R::PoolTemperature, 21.0, 3.0, 0.03, NM::Additive));
    o.push_back(ot("pool_temp_outlet", "degC", VK::Continuous, R::PoolTemperature, 23.0, 7.5, 0.04, NM::Additive));
    o.push_back(ot("trip_button", "", VK::Binary, R::TripButton, 0.0, 0.0, 0.0, NM::Additive));
    for (const char* rod : {"ss1", "ss2", "rr"}) {
        o.push_back(ot(std::string("magnet_current_") + rod, "A", VK::Continuous, R::MagnetCurrent, 0.0, 0.85, 0.004, NM::Additive));
    }
    for (const char* rod : {"ss1", "ss2", "rr"}) {
        o.push_back(ot(std::string("magnet_contact_") + rod, "", VK::Binary, R::MagnetContact, 0.0, 1.0, 0.0, NM::Additive));
    }
    double rod_gain = 40.0;
    for (const char* rod : {"ss1", "ss2", "rr"}) {
        o.push_back(ot(std::string("rod_position_") + rod, "%", VK::Continuous, R::RodPosition, 18.0, rod_gain, 0.05, NM::Additive));
        rod_gain += 5.0;
    }
    for (const char* rod : {"ss1", "ss2", "rr"}) {
        o.push_back(ot(std::string("rod_bottom_") + rod, "", VK::Binary, R::RodBottom, 0.0, 1.0, 0.0, NM::Additive));
    }
    o.push_back(ot("primary_flow", "L/min", VK::Continuous, R::CoolantFlow, 20.0, 80.0, 0.5, NM::Additive));
    o.push_back(ot("secondary_flow", "L/min", VK::Continuous, R::CoolantFlow, 15.0, 55.0, 0.5, NM::Additive));
    o.push_back(ot("purification_flow", "L/min", VK::Continuous, R::CoolantFlow, 12.0, 0.0, 0.2, NM::Additive));
    const double rad_gain[] = {4.0, 9.0, 15.0, 22.0, 2.5, 6.0};
    for (int k = 0; k < 6; ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "area_radiation_%d", k + 1);
        o.push_back(ot(name, "mR/h", VK::Continuous, R::RadiationMonitor, 0.2 + 0.05 * k, rad_gain[k], 0.03, NM::Multiplicative));
    }
    o.push_back(ot("pool_conductivity", "uS/cm", VK::Continuous, R::ProcessVariable, 1.1, 0.05, 0.01, NM::Additive));
    o.push_back(ot("pool_level", "cm", VK::Continuous, R::ProcessVariable, 502.0, 0.0, 0.2, NM::Additive));
    o.push_back(ot("pool_ph", "pH", VK::Continuous, R::ProcessVariable, 6.2, 0.0, 0.02, NM::Additive));
    o.push_back(ot("heat_exchanger_dp", "kPa", VK::Continuous, R::ProcessVariable, 35.0, 4.0, 0.3, NM::Additive));
    o.push_back(ot("n16_monitor", "cps", VK::Count, R::RadiationMonitor, 1.0, 400.0, 0.04, NM::Multiplicative));
    o.push_back(ot("stack_monitor", "cps", VK::Count, R::RadiationMonitor, 12.0, 6.0, 0.05, NM::Multiplicative));
    // Remaining console points: auxiliary process temperatures, pressures and indications.
    int k = 1;
    while (o.size() < 67) {
        char name[32];
        std::snprintf(name, sizeof(name), "aux_process_%02d", k);
        const double offset = 10.0 + 3.0 * k;
        const double gain = static_cast<double>(k % 5) * 1.5;
        o.push_back(ot(name, "au", VK::Continuous, R::ProcessVariable, offset, gain, 0.05 + 0.01 * (k % 3), NM::Additive));
        ++k;
    }

    std::vector<SignalDef> i;
    i.push_back(it("packet_rate", "packets/s", VK::Continuous, R::PacketRate, 30.0, 0.1));
    i.push_back(it("byte_rate", "bytes/s", VK::Continuous, R::ByteRate, 30.0 * 180.0, 0.12));
    i.push_back(it("latency", "ms", VK::Continuous, R::Latency, 1.6, 0.08));
    i.push_back(it("jitter", "ms", VK::Continuous, R::Jitter, 0.3, 0.15));
    i.push_back(it("cpu_util", "%", VK::Continuous, R::CpuUtil, 12.0, 0.06));
    i.push_back(it("mem_util", "%", VK::Continuous, R::MemUtil, 41.0, 0.01));
    i.push_back(it("tcp_retransmits", "1/s", VK::Continuous, R::Retransmits, 0.05, 0.5));
    i.push_back(it("active_connections", "", VK::Count, R::Connections, 6.0, 0.05));
    i.push_back(it("process_count", "", VK::Count, R::ProcessCount, 182.0, 0.005));
    i.push_back(it("service_count", "", VK::Count, R::ServiceCount, 47.0, 0.002));
    i.push_back(it("interface_errors", "1/s", VK::Continuous, R::InterfaceErrors, 0.01, 0.5));
    return SignalCatalog(std::move(o), std::move(i));
}

}  // namespace

SignalCatalog::SignalCatalog(std::vector<SignalDef> ot, std::vector<SignalDef> it)
    : ot_(std::move(ot)), it_(std::move(it)) {
    require(!ot_.empty(), ErrorCode::InvalidArgument, "catalog has no OT signals");
    for (std::size_t c = 0; c < ot_.size(); ++c) {
        ot_[c].id = static_cast<int>(c);
        ot_[c].kind = SignalKind::OT;
    }
    for (std::size_t c = 0; c < it_.size(); ++c) {
        it_[c].id = static_cast<int>(1000 + c);
        it_[c].kind = SignalKind::IT;
    }
    for (const auto& d : ot_) {
        require(d.role != SignalRole::ChannelRate ||
                    (d.source >= 0 && static_cast<std::size_t>(d.source) < ot_.size()),
                ErrorCode::InvalidArgument, "rate signal '" + d.name + "' has no valid source");
    }
}

std::size_t SignalCatalog::ot_index(std::string_view name) const {
    for (std::size_t c = 0; c < ot_.size(); ++c) {
        if (ot_[c].name == name) return c;
    }
    fail(ErrorCode::InvalidArgument, "no OT signal named '" + std::string(name) + "'");
}

std::size_t SignalCatalog::it_index(std::string_view name) const {
    for (std::size_t c = 0; c < it_.size(); ++c) {
        if (it_[c].name == name) return c;
    }
    fail(ErrorCode::InvalidArgument, "no IT signal named '" + std::string(name) + "'");
}

std::size_t SignalCatalog::trip_button() const { return ot_index(signal_names::kTripButton); }
std::size_t SignalCatalog::packet_rate() const { return it_index(signal_names::kPacketRate); }

std::vector<std::size_t> SignalCatalog::console_signals() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < ot_.size(); ++c) {
        if (ot_[c].console_displayed) out.push_back(c);
    }
    return out;
}

bool SignalCatalog::operator==(const SignalCatalog& other) const {
    auto same = [](const std::vector<SignalDef>& a, const std::vector<SignalDef>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a[k].name != b[k].name || a[k].role != b[k].role || a[k].unit != b[k].unit ||
                a[k].value_kind != b[k].value_kind || a[k].offset != b[k].offset ||
                a[k].gain != b[k].gain || a[k].noise != b[k].noise ||
                a[k].noise_model != b[k].noise_model || a[k].source != b[k].source ||
                a[k].console_displayed != b[k].console_displayed) {
                return false;
            }
        }
        return true;
    };
    return same(ot_, other.ot_) && same(it_, other.it_);
}

const SignalCatalog& default_catalog() {
    static const SignalCatalog catalog = build_default_catalog();
    return catalog;
}

namespace {
constexpr std::pair<SignalRole, std::string_view> kRoleNames[] = {
    {SignalRole::ChannelCounts, "channel_counts"},
    {SignalRole::ChannelRate, "channel_rate"},
    {SignalRole::LinearPower, "linear_power"},
    {SignalRole::LogPower, "log_power"},
    {SignalRole::PoolTemperature, "pool_temperature"},
    {SignalRole::TripButton, "trip_button"},
    {SignalRole::MagnetCurrent, "magnet_current"},
    {SignalRole::MagnetContact, "magnet_contact"},
    {SignalRole::RodPosition, "rod_position"},
    {SignalRole::RodBottom, "rod_bottom"},
    {SignalRole::CoolantFlow, "coolant_flow"},
    {SignalRole::RadiationMonitor, "radiation_monitor"},
    {SignalRole::ProcessVariable, "process_variable"},
    {SignalRole::PacketRate, "packet_rate"},
    {SignalRole::ByteRate, "byte_rate"},
    {SignalRole::Latency, "latency"},
    {SignalRole::Jitter, "jitter"},
    {SignalRole::CpuUtil, "cpu_util"},
    {SignalRole::MemUtil, "mem_util"},
    {SignalRole::Retransmits, "retransmits"},
    {SignalRole::Connections, "connections"},
    {SignalRole::ProcessCount, "process_count"},
    {SignalRole::ServiceCount, "service_count"},
    {SignalRole::InterfaceErrors, "interface_errors"},
};
}  // namespace

std::string_view to_string(SignalRole role) noexcept {
    for (const auto& [r, n] : kRoleNames) {
        if (r == role) return n;
    }
    return "?";
}

SignalRole parse_signal_role(std::string_view text) {
    for (const auto& [r, n] : kRoleNames) {
        if (n == text) return r;
    }
    fail(ErrorCode::FormatError, "unknown signal role '" + std::string(text) + "'");
}

std::string_view to_string(ValueKind kind) noexcept {
    switch (kind) {
        case ValueKind::Continuous: return "continuous";
        case ValueKind::Count: return "count";
        case ValueKind::Binary: return "binary";
    }
    return "?";
}

ValueKind parse_value_kind(std::string_view text) {
    if (text == "continuous") return ValueKind::Continuous;
    if (text == "count") return ValueKind::Count;
    if (text == "binary") return ValueKind::Binary;
    fail(ErrorCode::FormatError, "unknown value kind '" + std::string(text) + "'");
}

}  // namespace cyberchar
