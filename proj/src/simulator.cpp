#include "cyberchar/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <unordered_set>

#include "cyberchar/error.hpp"
#include "cyberchar/random.hpp"

namespace cyberchar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    require(ec == std::errc() && p == end, ErrorCode::ConfigError,
            "bad number '" + std::string(s) + "' in " + std::string(what));
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double noise_sd(NoiseModel model, double scale, double value) {
    return model == NoiseModel::Multiplicative ? scale * std::fabs(value) : scale;
}

}  // namespace

void OpSchedule::validate() const {
    require(!segments.empty(), ErrorCode::ConfigError, "schedule has no segments");
    for (const auto& s : segments) {
        require(std::isfinite(s.duration_s) && std::llround(s.duration_s) >= 1, ErrorCode::ConfigError,
                "schedule segment duration must be at least 1 s");
        require(s.target_power_percent >= 0.0 && s.target_power_percent <= 100.0,
                ErrorCode::ConfigError, "schedule power must lie in [0, 100] percent");
    }
}

std::size_t OpSchedule::total_timesteps() const {
    std::size_t t = 0;
    for (const auto& s : segments) t += static_cast<std::size_t>(std::llround(s.duration_s));
    return t;
}

OpSchedule OpSchedule::parse(std::string_view text) {
    OpSchedule out;
    for (auto item : split(text, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto parts = split(item, ':');
        require(parts.size() == 2 || parts.size() == 3, ErrorCode::ConfigError,
                "schedule segment '" + std::string(item) + "' is not P:D[:trip]");
        ScheduleSegment seg;
        seg.target_power_percent = parse_double(trim(parts[0]), "schedule power");
        seg.duration_s = parse_double(trim(parts[1]), "schedule duration");
        if (parts.size() == 3) {
            require(trim(parts[2]) == "trip", ErrorCode::ConfigError,
                    "schedule segment flag must be 'trip'");
            seg.ends_in_trip = true;
        }
        out.segments.push_back(seg);
    }
    out.validate();
    return out;
}

std::string OpSchedule::to_text() const {
    std::string out;
    char buf[64];
    for (std::size_t k = 0; k < segments.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%s%.17g:%.17g%s", k ? "," : "",
                      segments[k].target_power_percent, segments[k].duration_s,
                      segments[k].ends_in_trip ? ":trip" : "");
        out += buf;
    }
    return out;
}

OpSchedule default_normal_schedule() {
    return OpSchedule::parse(
        "0:900,25:1200,50:1200,100:1500:trip,0:900,75:1200,10:900:trip,0:600,"
        "60:1200,90:1200:trip,0:600,40:1200,100:1500:trip,0:300");
}

void ArtifactConfig::validate(const SignalCatalog& catalog) const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(unit(outlier_rate) && unit(outlier_operating_share) && unit(null_rate),
            ErrorCode::ConfigError, "artifact rates must lie in [0, 1]");
    require(null_cluster_mean_len >= 1.0, ErrorCode::ConfigError,
            "null cluster mean length must be at least 1");
    require(outlier_min_scale > 0.0 && outlier_max_scale >= outlier_min_scale,
            ErrorCode::ConfigError, "outlier scale range is empty");
    require(noise_scales.empty() || noise_scales.size() == catalog.total(), ErrorCode::ConfigError,
            "noise_scales must list one value per OT and IT signal");
    require(noise_gain >= 0.0, ErrorCode::ConfigError, "noise gain must be non-negative");
    for (double s : noise_scales) {
        require(s >= 0.0 && std::isfinite(s), ErrorCode::ConfigError,
                "noise scales must be finite and non-negative");
    }
}

double ArtifactConfig::noise_scale(const SignalCatalog& catalog, Stream s, std::size_t col) const {
    const std::size_t flat = s == Stream::OT ? col : catalog.ot_count() + col;
    if (!noise_scales.empty()) return noise_scales[flat];
    const auto& def = s == Stream::OT ? catalog.ot()[col] : catalog.it()[col];
    return def.noise * noise_gain;
}

ArtifactConfig ArtifactConfig::none() {
    ArtifactConfig a;
    a.outlier_rate = 0.0;
    a.null_rate = 0.0;
    a.noise_gain = 0.0;
    return a;
}

void DynamicsConfig::validate() const {
    require(power_lag_s > 0 && decay_time_s > 0 && temperature_lag_s > 0, ErrorCode::ConfigError,
            "dynamics time constants must be positive");
    require(prompt_fraction >= 0 && prompt_fraction <= 1, ErrorCode::ConfigError,
            "prompt fraction must lie in [0, 1]");
    require(rate_smoothing > 0 && rate_smoothing <= 1, ErrorCode::ConfigError,
            "rate smoothing must lie in (0, 1]");
    require(it_rate_hz > 0 && it_rate_hz <= 1000, ErrorCode::ConfigError,
            "IT sampling rate must lie in (0, 1000] Hz");
    require(it_noise_correlation >= 0 && it_noise_correlation < 1, ErrorCode::ConfigError,
            "IT noise correlation must lie in [0, 1)");
}

namespace {

struct PlantTrace {
    std::vector<double> power;        // fraction of full power
    std::vector<double> thermal;      // lagged power driving temperatures
    std::vector<double> rod_target;   // segment target while rods are out, 0 when in
    std::vector<std::uint8_t> trip;   // trip-button pulse
    std::vector<std::uint8_t> rods_in;
    std::vector<std::uint8_t> magnets_on;
};

PlantTrace run_plant(const OpSchedule& schedule, const DynamicsConfig& dyn) {
    PlantTrace tr;
    const std::size_t T = schedule.total_timesteps();
    tr.power.reserve(T);
    const double lag = 1.0 - std::exp(-1.0 / dyn.power_lag_s);
    const double decay = std::exp(-1.0 / dyn.decay_time_s);
    const double tlag = 1.0 - std::exp(-1.0 / dyn.temperature_lag_s);

    double p = schedule.segments.front().target_power_percent / 100.0;
    double th = p;
    for (const auto& seg : schedule.segments) {
        const auto n = static_cast<std::size_t>(std::llround(seg.duration_s));
        const double target = seg.target_power_percent / 100.0;
        for (std::size_t k = 0; k < n; ++k) {
            const bool trip_now = seg.ends_in_trip && k + 1 == n;
            const bool inserted = target <= 0.0 || trip_now;
            if (trip_now) {
                p *= dyn.prompt_fraction;
            } else if (inserted) {
                p *= decay;
            } else {
                p += (target - p) * lag;
            }
            th += (p - th) * tlag;
            tr.power.push_back(p);
            tr.thermal.push_back(th);
            tr.rod_target.push_back(inserted ? 0.0 : target);
            tr.trip.push_back(trip_now ? 1 : 0);
            tr.rods_in.push_back(inserted ? 1 : 0);
            tr.magnets_on.push_back(trip_now ? 0 : 1);
        }
    }
    return tr;
}

}  // namespace

TelemetryFrame generate_normal(const SignalCatalog& catalog, const OpSchedule& schedule,
                               const ArtifactConfig& artifacts, std::uint64_t seed,
                               const DynamicsConfig& dynamics) {
    require(catalog.ot_count() > 0, ErrorCode::ConfigError, "catalog has no OT signals");
    schedule.validate();
    artifacts.validate(catalog);
    dynamics.validate();

    const PlantTrace plant = run_plant(schedule, dynamics);
    const std::size_t T = plant.power.size();
    const std::size_t n_ot = catalog.ot_count();

    TelemetryFrame f;
    f.ot = Matrix(T, n_ot);
    f.ot_times.resize(T);
    f.ot_state.assign(T, ScenarioState::normal());
    f.ot_mode.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        f.ot_times[t] = static_cast<double>(t);
        f.ot_mode[t] = plant.rods_in[t] ? Mode::Shutdown : Mode::Operating;
    }

    Rng rng(derive_seed(seed, "normal-ot"));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> scale(n_ot);
    for (std::size_t c = 0; c < n_ot; ++c) scale[c] = artifacts.noise_scale(catalog, Stream::OT, c);

    // Pass 1: signals driven directly by the plant state.
    for (std::size_t t = 0; t < T; ++t) {
        const double p = plant.power[t];
        const double th = plant.thermal[t];
        const bool operating = f.ot_mode[t] == Mode::Operating;
        for (std::size_t c = 0; c < n_ot; ++c) {
            const SignalDef& d = catalog.ot()[c];
            const double eps = gauss(rng);
            double v = 0.0;
            switch (d.role) {
                case SignalRole::ChannelCounts:
                case SignalRole::RadiationMonitor:
                case SignalRole::LinearPower: {
                    const double clean = d.offset + d.gain * p;
                    v = std::max(0.0, clean + noise_sd(d.noise_model, scale[c], clean) * eps);
                    break;
                }
                case SignalRole::LogPower: {
                    const double clean = std::log10(std::max(d.gain * p, 1e-3));
                    v = clean + noise_sd(d.noise_model, scale[c], clean) * eps;
                    break;
                }
                case SignalRole::PoolTemperature:
                case SignalRole::ProcessVariable: {
                    const double clean = d.offset + d.gain * th;
                    v = clean + noise_sd(d.noise_model, scale[c], clean) * eps;
                    break;
                }
                case SignalRole::TripButton:
                    v = plant.trip[t];
                    break;
                case SignalRole::MagnetCurrent:
                    v = plant.magnets_on[t] ? d.gain + noise_sd(d.noise_model, scale[c], d.gain) * eps
                                            : 0.0;
                    break;
                case SignalRole::MagnetContact:
                    v = plant.magnets_on[t];
                    break;
                case SignalRole::RodPosition: {
                    const double clean = plant.rods_in[t] ? 0.0 : d.offset + d.gain * plant.rod_target[t];
                    v = plant.rods_in[t] ? 0.0
                                         : std::max(0.0, clean + noise_sd(d.noise_model, scale[c], clean) * eps);
                    break;
                }
                case SignalRole::RodBottom:
                    v = plant.rods_in[t];
                    break;
                case SignalRole::CoolantFlow: {
                    const double clean = d.offset + (operating ? d.gain : 0.0);
                    v = std::max(0.0, clean + noise_sd(d.noise_model, scale[c], clean) * eps);
                    break;
                }
                default:
                    v = d.offset;
                    break;
            }
            if (d.value_kind == ValueKind::Count) v = std::round(v);
            f.ot(t, c) = v;
        }
    }

    // Pass 2: change-rate signals derived from their source channel, in decades/min.
    for (std::size_t c = 0; c < n_ot; ++c) {
        const SignalDef& d = catalog.ot()[c];
        if (d.role != SignalRole::ChannelRate) continue;
        const auto src = static_cast<std::size_t>(d.source);
        double r = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            if (t > 0) {
                const double now = std::max(f.ot(t, src), 1.0);
                const double prev = std::max(f.ot(t - 1, src), 1.0);
                r += dynamics.rate_smoothing * (60.0 * std::log10(now / prev) - r);
            }
            f.ot(t, c) = r;
        }
    }

    // IT stream: independent AR(1) fluctuation per signal around its baseline.
    const std::size_t n_it = catalog.it_count();
    const std::size_t n_samples =
        static_cast<std::size_t>(std::ceil(static_cast<double>(T) * dynamics.it_rate_hz - 1e-9));
    f.it = Matrix(n_samples, n_it);
    f.it_times.resize(n_samples);
    f.it_state.assign(n_samples, ScenarioState::normal());
    f.it_mode.resize(n_samples);
    Rng it_rng(derive_seed(seed, "normal-it"));
    const double rho = dynamics.it_noise_correlation;
    const double innov = std::sqrt(1.0 - rho * rho);
    std::vector<double> eta(n_it);
    for (auto& e : eta) e = gauss(it_rng);
    for (std::size_t j = 0; j < n_samples; ++j) {
        const double t = static_cast<double>(j) / dynamics.it_rate_hz;
        f.it_times[j] = t;
        const auto ot_row = std::min(static_cast<std::size_t>(t), T - 1);
        f.it_mode[j] = f.ot_mode[ot_row];
        for (std::size_t c = 0; c < n_it; ++c) {
            if (j > 0) eta[c] = rho * eta[c] + innov * gauss(it_rng);
            const SignalDef& d = catalog.it()[c];
            const double sd = noise_sd(d.noise_model, artifacts.noise_scale(catalog, Stream::IT, c), d.offset);
            double v = std::max(0.0, d.offset + sd * eta[c]);
            if (d.value_kind == ValueKind::Count) v = std::round(v);
            f.it(j, c) = v;
        }
    }
    return f;
}

TelemetryFrame inject_artifacts(const TelemetryFrame& frame, const SignalCatalog& catalog,
                                const ArtifactConfig& artifacts, std::uint64_t seed) {
    artifacts.validate(catalog);
    require(frame.ot_mode.size() == frame.timesteps(), ErrorCode::InvalidArgument,
            "frame lacks mode labels");
    require(frame.ot.cols() == catalog.ot_count(), ErrorCode::DimensionMismatch,
            "frame width differs from catalog");

    TelemetryFrame out = frame;
    const std::size_t T = out.timesteps();
    const std::size_t C = out.ot.cols();
    const std::size_t cells = T * C;
    if (cells == 0) return out;

    std::vector<std::size_t> op_rows, sd_rows;
    for (std::size_t t = 0; t < T; ++t) {
        (out.ot_mode[t] == Mode::Operating ? op_rows : sd_rows).push_back(t);
    }

    // Nulls first: clustered runs along time inside shutdown stretches.
    Rng null_rng(derive_seed(seed, "nulls"));
    const auto n_null = static_cast<std::size_t>(std::llround(artifacts.null_rate * static_cast<double>(cells)));
    const std::size_t shutdown_cells = sd_rows.size() * C;
    if (n_null > shutdown_cells) {
        fail(ErrorCode::InsufficientShutdown,
             "null rate needs " + std::to_string(n_null) + " shutdown cells but only " +
                 std::to_string(shutdown_cells) + " exist");
    }
    std::vector<std::uint8_t> is_null(cells, 0);
    for (std::size_t k = 0; k < cells; ++k) is_null[k] = std::isnan(out.ot.data()[k]) ? 1 : 0;
    if (n_null > 0) {
        std::geometric_distribution<std::size_t> extra(1.0 / artifacts.null_cluster_mean_len);
        std::uniform_int_distribution<std::size_t> pick_row(0, sd_rows.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_col(0, C - 1);
        std::size_t placed = 0;
        std::size_t attempts = 0;
        const std::size_t max_attempts = 50 * n_null + 1000;
        auto place = [&](std::size_t t, std::size_t c) {
            const std::size_t flat = t * C + c;
            if (is_null[flat]) return;
            is_null[flat] = 1;
            out.mask.push_back({Stream::OT, static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(c),
                                MaskKind::Null, out.ot(t, c)});
            out.ot(t, c) = kNaN;
            ++placed;
        };
        while (placed < n_null && attempts < max_attempts) {
            ++attempts;
            const std::size_t c = pick_col(null_rng);
            std::size_t t = sd_rows[pick_row(null_rng)];
            std::size_t len = 1 + extra(null_rng);
            while (len-- > 0 && placed < n_null && t < T && out.ot_mode[t] == Mode::Shutdown) {
                place(t, c);
                ++t;
            }
        }
        // Dense requests: fill whatever shutdown cells remain in order.
        for (std::size_t k = 0; placed < n_null && k < sd_rows.size(); ++k) {
            for (std::size_t c = 0; c < C && placed < n_null; ++c) place(sd_rows[k], c);
        }
    }

    // Outliers: binomial count, split between operating and shutdown rows.
    Rng out_rng(derive_seed(seed, "outliers"));
    std::binomial_distribution<std::size_t> n_dist(cells, artifacts.outlier_rate);
    const std::size_t n_out = artifacts.outlier_rate > 0 ? n_dist(out_rng) : 0;
    std::size_t n_shut = 0;
    if (n_out > 0 && !sd_rows.empty()) {
        std::binomial_distribution<std::size_t> s_dist(n_out, 1.0 - artifacts.outlier_operating_share);
        n_shut = s_dist(out_rng);
    }
    if (op_rows.empty()) n_shut = n_out;
    std::vector<std::size_t> spike_cols;
    for (std::size_t c = 0; c < C; ++c) {
        if (catalog.ot()[c].value_kind != ValueKind::Binary) spike_cols.push_back(c);
    }
    if (n_out > 0 && !spike_cols.empty()) {
        std::unordered_set<std::size_t> chosen;
        std::uniform_int_distribution<std::size_t> pick_col(0, spike_cols.size() - 1);
        std::uniform_real_distribution<double> magnitude(artifacts.outlier_min_scale, artifacts.outlier_max_scale);
        auto spike_in = [&](const std::vector<std::size_t>& rows, std::size_t count) {
            if (rows.empty()) return;
            std::uniform_int_distribution<std::size_t> pick_row(0, rows.size() - 1);
            const std::size_t capacity = rows.size() * spike_cols.size();
            std::size_t done = 0;
            std::size_t attempts = 0;
            while (done < count && attempts < 100 * count + 1000 && done < capacity) {
                ++attempts;
                const std::size_t t = rows[pick_row(out_rng)];
                const std::size_t c = spike_cols[pick_col(out_rng)];
                const std::size_t flat = t * C + c;
                if (is_null[flat] || !chosen.insert(flat).second) continue;
                const SignalDef& d = catalog.ot()[c];
                const double v = out.ot(t, c);
                const double sd = noise_sd(d.noise_model, artifacts.noise_scale(catalog, Stream::OT, c), v);
                const double local = std::max({sd, 0.01 * std::fabs(v), 1e-3});
                out.mask.push_back({Stream::OT, static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(c),
                                    MaskKind::Outlier, v});
                out.ot(t, c) = v + magnitude(out_rng) * local;
                ++done;
            }
        };
        spike_in(op_rows, n_out - n_shut);
        spike_in(sd_rows, n_shut);
    }

    std::sort(out.mask.begin(), out.mask.end(), [](const MaskEntry& a, const MaskEntry& b) {
        if (a.stream != b.stream) return a.stream < b.stream;
        if (a.row != b.row) return a.row < b.row;
        if (a.col != b.col) return a.col < b.col;
        return a.kind < b.kind;
    });
    return out;
}

std::vector<std::size_t> trip_rows(const TelemetryFrame& frame, const SignalCatalog& catalog) {
    const std::size_t col = catalog.trip_button();
    std::vector<std::size_t> rows;
    for (std::size_t t = 0; t < frame.timesteps(); ++t) {
        if (frame.ot(t, col) == 1.0) rows.push_back(t);
    }
    return rows;
}

const TripTemplate* TemplateSet::find(std::size_t trip_ordinal, std::size_t signal) const noexcept {
    for (const auto& t : templates) {
        if (t.trip_ordinal == trip_ordinal && t.signal == signal) return &t;
    }
    return nullptr;
}

TemplateSet extract_trip_templates(const TelemetryFrame& frame, const SignalCatalog& catalog,
                                   const std::vector<std::size_t>& targets,
                                   std::size_t half_window) {
    for (std::size_t s : targets) {
        require(s < frame.ot.cols(), ErrorCode::InvalidArgument, "template target out of range");
    }
    TemplateSet set;
    const std::size_t T = frame.timesteps();
    for (std::size_t row : trip_rows(frame, catalog)) {
        if (row < half_window || row + half_window >= T) {
            ++set.trips_skipped;
            continue;
        }
        for (std::size_t s : targets) {
            TripTemplate tpl;
            tpl.trip_ordinal = set.trips_used;
            tpl.trip_row = row;
            tpl.signal = s;
            tpl.samples.reserve(2 * half_window + 1);
            for (std::size_t t = row - half_window; t <= row + half_window; ++t) {
                tpl.samples.push_back(frame.ot(t, s));
            }
            set.templates.push_back(std::move(tpl));
        }
        ++set.trips_used;
    }
    return set;
}

}  // namespace cyberchar
