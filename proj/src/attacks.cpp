#include "cyberchar/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "cyberchar/error.hpp"
#include "cyberchar/random.hpp"

namespace cyberchar {

FdiSpec FdiSpec::defaults(int level, const SignalCatalog& catalog) {
    require(level >= 1 && level <= 3, ErrorCode::InvalidArgument, "FDI level must be 1, 2 or 3");
    FdiSpec s;
    s.level = level;
    s.targets.push_back(catalog.ot_index(signal_names::kCh1Cps));
    if (level >= 2) s.targets.push_back(catalog.ot_index(signal_names::kCh1Rate));
    if (level >= 3) s.targets.push_back(catalog.ot_index(signal_names::kCh2Cps));
    return s;
}

void FdiSpec::validate(const SignalCatalog& catalog) const {
    require(level >= 1 && level <= 3, ErrorCode::InvalidArgument, "FDI level must be 1, 2 or 3");
    require(half_window_s >= 1, ErrorCode::InvalidArgument, "FDI half window must be positive");
    require(!targets.empty(), ErrorCode::InvalidArgument, "FDI spec has no target signals");
    std::set<std::size_t> seen;
    for (std::size_t t : targets) {
        require(t < catalog.ot_count(), ErrorCode::InvalidArgument, "FDI target out of range");
        require(seen.insert(t).second, ErrorCode::InvalidArgument, "FDI target listed twice");
    }
}

void validate_fdi_nesting(const std::vector<FdiSpec>& specs) {
    for (std::size_t k = 1; k < specs.size(); ++k) {
        const std::set<std::size_t> lo(specs[k - 1].targets.begin(), specs[k - 1].targets.end());
        const std::set<std::size_t> hi(specs[k].targets.begin(), specs[k].targets.end());
        const bool subset = std::includes(hi.begin(), hi.end(), lo.begin(), lo.end());
        require(subset && hi.size() > lo.size(), ErrorCode::InvalidArgument,
                "FDI level " + std::to_string(specs[k - 1].level) +
                    " targets are not a strict subset of level " + std::to_string(specs[k].level));
    }
}

DosSpec DosSpec::defaults(DosLevel intensity, double start_s, double end_s) {
    require(intensity != DosLevel::None, ErrorCode::InvalidArgument, "DoS intensity must be low or high");
    DosSpec s;
    s.intensity = intensity;
    s.mean_rate = intensity == DosLevel::Low ? 870.0 : 24000.0;
    s.start_s = start_s;
    s.end_s = end_s;
    return s;
}

void DosSpec::validate(double baseline_rate) const {
    require(intensity != DosLevel::None, ErrorCode::InvalidArgument, "DoS intensity must be low or high");
    require(end_s > start_s, ErrorCode::InvalidArgument, "DoS interval must have positive length");
    require(mean_rate > baseline_rate, ErrorCode::InvalidArgument,
            "DoS mean rate must exceed the baseline packet rate");
    require(rate_noise >= 0.0 && rate_noise < 1.0, ErrorCode::InvalidArgument,
            "DoS rate noise must lie in [0, 1)");
    require(it_sample_loss >= 0.0 && it_sample_loss < 1.0, ErrorCode::InvalidArgument,
            "IT sample loss must lie in [0, 1)");
}

std::vector<std::size_t> pulse_rows(double pulse_period_s, double duration_s) {
    require(pulse_period_s >= 1.0, ErrorCode::InvalidArgument, "pulse period must be at least 1 s");
    std::vector<std::size_t> rows;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * pulse_period_s;
        if (t >= duration_s - 1e-9) break;
        rows.push_back(static_cast<std::size_t>(std::llround(t)));
    }
    return rows;
}

std::vector<std::size_t> trip_event_rows(double duration_s, std::size_t n_trips) {
    require(n_trips >= 1, ErrorCode::InvalidArgument, "at least one trip event is required");
    const double spacing = duration_s / static_cast<double>(n_trips);
    require(spacing >= 1.0, ErrorCode::InvalidArgument, "too many trip events for the duration");
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < n_trips; ++k) {
        rows.push_back(static_cast<std::size_t>(std::llround(spacing / 2 + spacing * static_cast<double>(k))));
    }
    return rows;
}

TelemetryFrame emulate_trip_unavailable(const TelemetryFrame& frame, const SignalCatalog& catalog,
                                        TripCause cause, double pulse_period_s, double duration_s,
                                        std::size_t n_trips) {
    require(cause != TripCause::None, ErrorCode::InvalidArgument, "trip-unavailable needs a cause");
    (void)trip_event_rows(duration_s, n_trips);
    const auto span = static_cast<std::size_t>(std::llround(duration_s));
    require(frame.timesteps() >= span && span > 0, ErrorCode::FrameTooShort,
            "frame has " + std::to_string(frame.timesteps()) + " timesteps, needs " +
                std::to_string(span));
    const std::size_t col = catalog.trip_button();
    for (std::size_t t = 0; t < span; ++t) {
        require(frame.ot_state[t].is_normal() && frame.ot_mode[t] == Mode::Operating &&
                    frame.ot(t, col) == 0.0,
                ErrorCode::InvalidArgument,
                "trip-unavailable emulation needs normal, trip-free operating data");
    }
    TelemetryFrame out = frame;
    for (std::size_t r : pulse_rows(pulse_period_s, duration_s)) out.ot(r, col) = 1.0;
    ScenarioState st = make_state(cause, 0, DosLevel::None);
    for (std::size_t t = 0; t < span; ++t) out.ot_state[t] = st;
    for (std::size_t j = 0; j < out.it_samples(); ++j) {
        if (out.it_times[j] < static_cast<double>(span)) out.it_state[j] = st;
    }
    return out;
}

TelemetryFrame inject_fdi(const TelemetryFrame& frame, const FdiSpec& spec,
                          const TemplateSet& templates, const std::vector<std::size_t>& trip_rows) {
    require(spec.level >= 1 && spec.level <= 3, ErrorCode::InvalidArgument,
            "FDI level must be 1, 2 or 3");
    require(!spec.targets.empty(), ErrorCode::InvalidArgument, "FDI spec has no target signals");
    const std::size_t h = spec.half_window_s;
    const std::size_t T = frame.timesteps();
    std::vector<std::size_t> rows = trip_rows;
    std::sort(rows.begin(), rows.end());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        require(rows[k] >= h && rows[k] + h <= T, ErrorCode::IntervalOutsideFrame,
                "FDI window around row " + std::to_string(rows[k]) + " leaves the frame");
        if (k > 0) {
            require(rows[k] - rows[k - 1] >= 2 * h, ErrorCode::OverlappingWindows,
                    "FDI windows around rows " + std::to_string(rows[k - 1]) + " and " +
                        std::to_string(rows[k]) + " overlap");
        }
    }
    for (std::size_t s : spec.targets) require(s < frame.ot.cols(), ErrorCode::InvalidArgument,
                                               "FDI target out of range");

    TelemetryFrame out = frame;
    std::vector<std::uint8_t> touched(T * frame.ot.cols(), 0);
    std::vector<MaskEntry> added;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t t0 = rows[k] - h;
        for (std::size_t s : spec.targets) {
            const TripTemplate* tpl = templates.find(k, s);
            if (!tpl) {
                fail(ErrorCode::MissingTemplate, "no template for trip " + std::to_string(k) +
                                                     ", signal " + std::to_string(s));
            }
            require(tpl->samples.size() >= 2 * h + 1 || tpl->samples.size() == 2 * h,
                    ErrorCode::MissingTemplate, "template shorter than the FDI window");
            const std::size_t first = tpl->center() - h;
            for (std::size_t i = 0; i < 2 * h; ++i) {
                const std::size_t r = t0 + i;
                touched[r * frame.ot.cols() + s] = 1;
                added.push_back({Stream::OT, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(s),
                                 MaskKind::Falsified, frame.ot(r, s)});
                out.ot(r, s) = tpl->samples[first + i];
            }
        }
        for (std::size_t i = 0; i < 2 * h; ++i) {
            ScenarioState& st = out.ot_state[t0 + i];
            require(st.trip_cause == TripCause::Cyber, ErrorCode::InvalidArgument,
                    "FDI requires a cyber trip-unavailable frame");
            st.fdi_level = spec.level;
        }
        const double lo = frame.ot_times[t0];
        const double hi = lo + static_cast<double>(2 * h);
        for (std::size_t j = 0; j < out.it_samples(); ++j) {
            if (out.it_times[j] >= lo && out.it_times[j] < hi) out.it_state[j].fdi_level = spec.level;
        }
    }
    // Overwritten cells lose any earlier artifact record; the falsification is what is observed now.
    std::vector<MaskEntry> kept;
    kept.reserve(out.mask.size() + added.size());
    for (const auto& e : out.mask) {
        if (e.stream == Stream::OT && touched[e.row * frame.ot.cols() + e.col]) continue;
        kept.push_back(e);
    }
    kept.insert(kept.end(), added.begin(), added.end());
    std::sort(kept.begin(), kept.end(), [](const MaskEntry& a, const MaskEntry& b) {
        if (a.stream != b.stream) return a.stream < b.stream;
        if (a.row != b.row) return a.row < b.row;
        if (a.col != b.col) return a.col < b.col;
        return a.kind < b.kind;
    });
    out.mask = std::move(kept);
    return out;
}

namespace {

/// IT signal level as a function of load u = packet rate / baseline packet rate.
double load_response(const SignalDef& d, double u) {
    const double excess = u - 1.0;
    switch (d.role) {
        case SignalRole::ByteRate: return d.offset * u;
        case SignalRole::Latency: return d.offset * (1.0 + 0.1 * excess);
        case SignalRole::Jitter: return d.offset * (1.0 + 0.08 * excess);
        case SignalRole::CpuUtil: return d.offset + 80.0 * (1.0 - std::exp(-excess / 300.0));
        case SignalRole::MemUtil: return d.offset + 15.0 * (1.0 - std::exp(-excess / 300.0));
        case SignalRole::Retransmits: return d.offset + 0.01 * excess;
        case SignalRole::Connections: return d.offset + 4.0 * std::log10(u);
        case SignalRole::InterfaceErrors: return d.offset + 0.002 * excess;
        default: return d.offset;
    }
}

}  // namespace

TelemetryFrame apply_dos(const TelemetryFrame& frame, const SignalCatalog& catalog,
                         const DosSpec& spec, std::uint64_t seed) {
    const std::size_t pr = catalog.packet_rate();
    const double baseline = catalog.it()[pr].offset;
    spec.validate(baseline);
    const double duration = static_cast<double>(frame.timesteps());
    require(spec.start_s >= 0.0 && spec.end_s <= duration + 1e-9, ErrorCode::IntervalOutsideFrame,
            "DoS interval lies outside the frame");

    TelemetryFrame out = frame;
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double rho = 0.8;
    const double innov = std::sqrt(1.0 - rho * rho);
    double eta = gauss(rng);
    std::vector<std::uint8_t> drop(out.it_samples(), 0);
    bool first = true;
    for (std::size_t j = 0; j < out.it_samples(); ++j) {
        const double t = out.it_times[j];
        if (t < spec.start_s || t >= spec.end_s) continue;
        if (!first) eta = rho * eta + innov * gauss(rng);
        first = false;
        const double rate = std::max(baseline, spec.mean_rate * (1.0 + spec.rate_noise * eta));
        const double u = rate / baseline;
        for (std::size_t c = 0; c < catalog.it_count(); ++c) {
            const SignalDef& d = catalog.it()[c];
            double v = c == pr ? rate : out.it(j, c) + load_response(d, u) - load_response(d, 1.0);
            v = std::max(0.0, v);
            if (d.value_kind == ValueKind::Count) v = std::round(v);
            out.it(j, c) = v;
        }
        out.it_state[j].dos_level = spec.intensity;
        if (spec.it_sample_loss > 0.0 && unif(rng) < spec.it_sample_loss) drop[j] = 1;
    }
    for (std::size_t t = 0; t < out.timesteps(); ++t) {
        if (out.ot_times[t] >= spec.start_s && out.ot_times[t] < spec.end_s) {
            out.ot_state[t].dos_level = spec.intensity;
        }
    }
    if (std::find(drop.begin(), drop.end(), 1) != drop.end()) {
        TelemetryFrame kept = out;
        std::size_t n = 0;
        for (std::size_t j = 0; j < out.it_samples(); ++j) n += drop[j] ? 0 : 1;
        kept.it = Matrix(n, out.it.cols());
        kept.it_times.clear();
        kept.it_state.clear();
        kept.it_mode.clear();
        std::size_t k = 0;
        for (std::size_t j = 0; j < out.it_samples(); ++j) {
            if (drop[j]) continue;
            std::copy_n(out.it.row(j).begin(), out.it.cols(), kept.it.row(k++).begin());
            kept.it_times.push_back(out.it_times[j]);
            kept.it_state.push_back(out.it_state[j]);
            kept.it_mode.push_back(out.it_mode[j]);
        }
        std::erase_if(kept.mask, [](const MaskEntry& e) { return e.stream == Stream::IT; });
        return kept;
    }
    return out;
}

void UseCaseConfig::validate() const {
    normal_schedule.validate();
    artifacts.validate(catalog);
    dynamics.validate();
    require(abnormal_power_percent > 0.0 && abnormal_power_percent <= 100.0, ErrorCode::ConfigError,
            "abnormal power must lie in (0, 100] percent");
    require(abnormal_duration_s >= 1.0, ErrorCode::ConfigError, "abnormal duration must be positive");
    require(reserve_trip_powers.size() >= n_trips, ErrorCode::ConfigError,
            "reserve_trip_powers must provide at least n_trips trips");
    for (double p : reserve_trip_powers) {
        require(p > 0.0 && p <= 100.0, ErrorCode::ConfigError, "reserve trip powers must lie in (0, 100]");
    }
    require(reserve_hold_s > static_cast<double>(half_window_s) &&
                reserve_shutdown_s > static_cast<double>(half_window_s),
            ErrorCode::ConfigError, "reserve hold and shutdown must exceed the FDI half window");
    require(dos_low_rate > 0 && dos_high_rate > dos_low_rate, ErrorCode::ConfigError,
            "DoS rates must satisfy 0 < low < high");
    std::vector<FdiSpec> specs;
    for (int level = 1; level <= 3; ++level) {
        specs.push_back(fdi_spec(level));
        specs.back().validate(catalog);
    }
    validate_fdi_nesting(specs);
    dos_spec(DosLevel::Low).validate(catalog.it()[catalog.packet_rate()].offset);
    dos_spec(DosLevel::High).validate(catalog.it()[catalog.packet_rate()].offset);
}

FdiSpec UseCaseConfig::fdi_spec(int level) const {
    FdiSpec s = FdiSpec::defaults(level, catalog);
    if (!fdi_targets[static_cast<std::size_t>(level - 1)].empty()) {
        s.targets = fdi_targets[static_cast<std::size_t>(level - 1)];
    }
    s.half_window_s = half_window_s;
    return s;
}

DosSpec UseCaseConfig::dos_spec(DosLevel intensity) const {
    DosSpec s = DosSpec::defaults(intensity, dos_start_s, dos_end_s.value_or(abnormal_duration_s));
    s.mean_rate = intensity == DosLevel::Low ? dos_low_rate : dos_high_rate;
    s.rate_noise = dos_rate_noise;
    s.it_sample_loss = dos_it_sample_loss;
    return s;
}

OpSchedule UseCaseConfig::reserve_schedule() const {
    OpSchedule s;
    for (double p : reserve_trip_powers) {
        s.segments.push_back({p, reserve_hold_s, true});
        s.segments.push_back({0.0, reserve_shutdown_s, false});
    }
    return s;
}

OpSchedule UseCaseConfig::abnormal_schedule() const {
    OpSchedule s;
    s.segments.push_back({abnormal_power_percent, abnormal_duration_s, false});
    return s;
}

const DatasetRecord* UseCaseBundle::find(const std::string& id) const noexcept {
    for (const auto& d : datasets) {
        if (d.id == id) return &d;
    }
    return nullptr;
}

const DatasetRecord* UseCaseBundle::find(const ScenarioState& state) const noexcept {
    for (const auto& d : datasets) {
        if (d.state == state) return &d;
    }
    return nullptr;
}

const DatasetRecord& UseCaseBundle::get(const std::string& id) const {
    const DatasetRecord* d = find(id);
    if (!d) fail(ErrorCode::MissingDataset, "bundle has no dataset '" + id + "'");
    return *d;
}

void UseCaseBundle::validate() const {
    require(datasets.size() == 14, ErrorCode::MissingDataset,
            "bundle holds " + std::to_string(datasets.size()) + " datasets, expected 14");
    for (const ScenarioState& s : enumerate_states()) {
        require(find(s) != nullptr, ErrorCode::MissingDataset, "bundle lacks state " + s.key());
    }
    for (const auto& d : datasets) {
        d.frame.validate();
        require(d.frame.ot.cols() == catalog.ot_count() && d.frame.it.cols() == catalog.it_count(),
                ErrorCode::DimensionMismatch, "dataset '" + d.id + "' width differs from catalog");
        bool seen = false;
        // A timestep may show a partial version of the dataset's state (for instance
        // outside a shortened DoS interval) but never a foreign component.
        auto within = [&](const ScenarioState& st) {
            if (st.is_normal()) return true;
            return st.trip_cause == d.state.trip_cause &&
                   (st.fdi_level == 0 || st.fdi_level == d.state.fdi_level) &&
                   (st.dos_level == DosLevel::None || st.dos_level == d.state.dos_level);
        };
        for (const auto& st : d.frame.ot_state) {
            require(within(st), ErrorCode::InvariantViolation,
                    "dataset '" + d.id + "' carries foreign state " + st.key());
            seen = seen || st == d.state;
        }
        require(seen, ErrorCode::InvariantViolation, "dataset '" + d.id + "' never shows its state");
        for (const auto& e : d.frame.mask) {
            if (e.kind == MaskKind::Falsified) {
                require(d.frame.ot_state[e.row].fdi_level > 0, ErrorCode::InvariantViolation,
                        "falsified cell on a timestep without an FDI label");
            }
        }
    }
}

std::string dataset_id(const ScenarioState& state) {
    if (state.is_normal()) return dataset_ids::kNormal;
    std::string id;
    if (state.fdi_level > 0) {
        id = "fdi" + std::to_string(state.fdi_level);
    } else if (state.dos_level == DosLevel::None) {
        return state.trip_cause == TripCause::Malfunction ? dataset_ids::kMalfunction
                                                           : dataset_ids::kCyberBaseline;
    }
    if (state.dos_level != DosLevel::None) {
        if (!id.empty()) id += "_";
        id += "dos_" + std::string(to_string(state.dos_level));
    }
    if (state.trip_cause == TripCause::Malfunction) id = "malfunction_" + id;
    return id;
}

UseCaseIngredients build_ingredients(const UseCaseConfig& config, std::uint64_t seed) {
    config.validate();
    const SignalCatalog& cat = config.catalog;
    UseCaseIngredients ing;

    ing.normal = inject_artifacts(
        generate_normal(cat, config.normal_schedule, config.artifacts, derive_seed(seed, "normal"), config.dynamics),
        cat, config.artifacts, derive_seed(seed, "normal-artifacts"));

    // Reserve trips and the abnormal period contain no shutdown stretch that should
    // carry nulls: both keep outliers and noise only.
    ArtifactConfig no_nulls = config.artifacts;
    no_nulls.null_rate = 0.0;
    ing.reserve = inject_artifacts(
        generate_normal(cat, config.reserve_schedule(), config.artifacts, derive_seed(seed, "reserve"), config.dynamics),
        cat, no_nulls, derive_seed(seed, "reserve-artifacts"));

    TelemetryFrame base = inject_artifacts(
        generate_normal(cat, config.abnormal_schedule(), config.artifacts, derive_seed(seed, "abnormal"), config.dynamics),
        cat, no_nulls, derive_seed(seed, "abnormal-artifacts"));
    ing.cyber_baseline = emulate_trip_unavailable(base, cat, TripCause::Cyber, config.pulse_period_s,
                                                  config.abnormal_duration_s, config.n_trips);
    ing.trip_rows = trip_event_rows(config.abnormal_duration_s, config.n_trips);
    return ing;
}

UseCaseBundle build_use_case(const UseCaseConfig& config, std::uint64_t seed) {
    const UseCaseIngredients ing = build_ingredients(config, seed);
    const SignalCatalog& cat = config.catalog;

    std::vector<std::size_t> all_targets;
    for (int level = 1; level <= 3; ++level) {
        for (std::size_t s : config.fdi_spec(level).targets) {
            if (std::find(all_targets.begin(), all_targets.end(), s) == all_targets.end()) all_targets.push_back(s);
        }
    }
    const TemplateSet templates = extract_trip_templates(ing.reserve, cat, all_targets, config.half_window_s);
    require(templates.trips_used >= config.n_trips, ErrorCode::MissingTemplate,
            "reserve frame yields " + std::to_string(templates.trips_used) + " usable trips, need " +
                std::to_string(config.n_trips));

    UseCaseBundle bundle;
    bundle.catalog = cat;
    bundle.seed = seed;
    auto add = [&](const ScenarioState& st, TelemetryFrame frame, std::uint64_t ds_seed, std::string desc) {
        bundle.datasets.push_back({dataset_id(st), st, ds_seed, std::move(desc), std::move(frame)});
    };

    add(ScenarioState::normal(), ing.normal, derive_seed(seed, "normal"), "normal operation");
    add(make_state(TripCause::Cyber, 0, DosLevel::None), ing.cyber_baseline, derive_seed(seed, "abnormal"),
        "trip indicated without trip response");

    TelemetryFrame malfunction = ing.cyber_baseline;
    const ScenarioState mal = make_state(TripCause::Malfunction, 0, DosLevel::None);
    for (auto& s : malfunction.ot_state) {
        if (!s.is_normal()) s = mal;
    }
    for (auto& s : malfunction.it_state) {
        if (!s.is_normal()) s = mal;
    }
    add(mal, std::move(malfunction), derive_seed(seed, "abnormal"),
        "trip-unavailable baseline relabeled as malfunction");

    std::vector<TelemetryFrame> fdi_frames;
    for (int level = 1; level <= 3; ++level) {
        fdi_frames.push_back(inject_fdi(ing.cyber_baseline, config.fdi_spec(level), templates, ing.trip_rows));
        add(make_state(TripCause::Cyber, level, DosLevel::None), fdi_frames.back(), derive_seed(seed, "abnormal"),
            "trip windows spliced over " + std::to_string(config.fdi_spec(level).targets.size()) +
                " console signal(s)");
    }
    for (DosLevel dos : {DosLevel::Low, DosLevel::High}) {
        const ScenarioState st = make_state(TripCause::Cyber, 0, dos);
        const std::uint64_t s = derive_seed(seed, dataset_id(st));
        add(st, apply_dos(ing.cyber_baseline, cat, config.dos_spec(dos), s), s,
            std::string(to_string(dos)) + "-intensity traffic flood on the trip-unavailable baseline");
    }
    for (int level = 1; level <= 3; ++level) {
        for (DosLevel dos : {DosLevel::Low, DosLevel::High}) {
            const ScenarioState st = make_state(TripCause::Cyber, level, dos);
            const std::uint64_t s = derive_seed(seed, dataset_id(st));
            add(st, apply_dos(fdi_frames[static_cast<std::size_t>(level - 1)], cat, config.dos_spec(dos), s), s,
                "FDI level " + std::to_string(level) + " with " + std::string(to_string(dos)) +
                    "-intensity traffic flood");
        }
    }
    bundle.validate();
    return bundle;
}

}  // namespace cyberchar
