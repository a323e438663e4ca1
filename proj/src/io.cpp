#include "cyberchar/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cyberchar/error.hpp"

namespace cyberchar {

using json = nlohmann::json;

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorCode::IoError, "cannot write " + path.string());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        require(static_cast<bool>(out), ErrorCode::IoError, "write failed for " + path.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    require(!ec, ErrorCode::IoError, "cannot move " + tmp.string() + " into place: " + ec.message());
}

namespace {

void put_double(std::string& out, double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, r.ptr);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = line.find(sep, start);
        if (p == line.npos) {
            f.push_back(line.substr(start));
            break;
        }
        f.push_back(line.substr(start, p - start));
        start = p + 1;
    }
    return f;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t p = text.find('\n', start);
        if (p == text.npos) p = text.size();
        std::string_view l = text.substr(start, p - start);
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        if (!l.empty()) lines.push_back(l);
        start = p + 1;
    }
    return lines;
}

[[noreturn]] void bad_cell(const std::string& source, std::size_t line, std::string_view what, std::string_view cell) {
    fail(ErrorCode::FormatError, source + " line " + std::to_string(line) + ": bad " + std::string(what) + " '" +
                                     std::string(cell) + "'");
}

double parse_double(std::string_view cell, const std::string& source, std::size_t line) {
    double v = 0.0;
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) bad_cell(source, line, "number", cell);
    return v;
}

template <typename Int>
Int parse_int(std::string_view cell, const std::string& source, std::size_t line) {
    Int v{};
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) bad_cell(source, line, "integer", cell);
    return v;
}

const std::vector<SignalDef>& defs(const SignalCatalog& c, Stream s) { return s == Stream::OT ? c.ot() : c.it(); }

std::string_view stream_name(Stream s) { return s == Stream::OT ? "ot" : "it"; }

Stream parse_stream(std::string_view s) {
    if (s == "ot") return Stream::OT;
    if (s == "it") return Stream::IT;
    fail(ErrorCode::FormatError, "unknown stream '" + std::string(s) + "'");
}

Target parse_target(std::string_view s) {
    for (Target t : {Target::Abnormal, Target::TripUnavailable, Target::Dos, Target::Fdi}) {
        if (to_string(t) == s) return t;
    }
    fail(ErrorCode::FormatError, "unknown target '" + std::string(s) + "'");
}

}  // namespace

std::string frame_csv(const TelemetryFrame& frame, const SignalCatalog& catalog, Stream stream) {
    const auto& sig = defs(catalog, stream);
    const Matrix& values = frame.values(stream);
    const auto& times = frame.times(stream);
    const auto& states = frame.states(stream);
    const auto& modes = stream == Stream::OT ? frame.ot_mode : frame.it_mode;
    require(values.cols() == sig.size(), ErrorCode::DimensionMismatch, "frame width differs from the catalog");

    std::string out;
    out.reserve(values.rows() * (values.cols() * 12 + 40));
    out += 't';
    for (const auto& d : sig) {
        out += ',';
        out += d.name;
    }
    out += ",state_trip,state_cause,state_fdi,state_dos,mode\n";
    for (std::size_t r = 0; r < values.rows(); ++r) {
        put_double(out, times[r]);
        for (double v : values.row(r)) {
            out += ',';
            if (!std::isnan(v)) put_double(out, v);
        }
        const ScenarioState& s = states[r];
        out += s.trip_available ? ",1," : ",0,";
        out += to_string(s.trip_cause);
        out += ',';
        out += std::to_string(s.fdi_level);
        out += ',';
        out += to_string(s.dos_level);
        out += ',';
        out += to_string(modes[r]);
        out += '\n';
    }
    return out;
}

void parse_frame_csv(std::string_view text, const SignalCatalog& catalog, Stream stream, TelemetryFrame& frame,
                     const std::string& source) {
    const auto& sig = defs(catalog, stream);
    const auto lines = split_lines(text);
    require(!lines.empty(), ErrorCode::FormatError, source + ": empty file");
    const auto header = split_fields(lines[0]);
    const std::size_t C = sig.size();
    require(header.size() == C + 6, ErrorCode::FormatError,
            source + " line 1: expected " + std::to_string(C + 6) + " columns, found " + std::to_string(header.size()));
    require(header[0] == "t", ErrorCode::FormatError, source + " line 1: first column must be 't'");
    for (std::size_t c = 0; c < C; ++c) {
        require(header[c + 1] == sig[c].name, ErrorCode::FormatError,
                source + " line 1: column " + std::to_string(c + 2) + " is '" + std::string(header[c + 1]) +
                    "', catalog expects '" + sig[c].name + "'");
    }
    const char* tail[] = {"state_trip", "state_cause", "state_fdi", "state_dos", "mode"};
    for (std::size_t k = 0; k < 5; ++k) {
        require(header[C + 1 + k] == tail[k], ErrorCode::FormatError,
                source + " line 1: expected column '" + std::string(tail[k]) + "'");
    }

    const std::size_t n = lines.size() - 1;
    std::vector<double> times(n);
    Matrix values(n, C);
    std::vector<ScenarioState> states(n);
    std::vector<Mode> modes(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t ln = r + 2;
        const auto f = split_fields(lines[r + 1]);
        require(f.size() == C + 6, ErrorCode::FormatError,
                source + " line " + std::to_string(ln) + ": expected " + std::to_string(C + 6) + " fields, found " +
                    std::to_string(f.size()));
        times[r] = parse_double(f[0], source, ln);
        auto row = values.row(r);
        for (std::size_t c = 0; c < C; ++c) {
            row[c] = f[c + 1].empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(f[c + 1], source, ln);
        }
        ScenarioState s;
        if (f[C + 1] != "0" && f[C + 1] != "1") bad_cell(source, ln, "trip flag", f[C + 1]);
        s.trip_available = f[C + 1] == "1";
        try {
            s.trip_cause = parse_trip_cause(f[C + 2]);
            s.fdi_level = parse_int<int>(f[C + 3], source, ln);
            s.dos_level = parse_dos_level(f[C + 4]);
            modes[r] = parse_mode(f[C + 5]);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::FormatError) throw;
            fail(ErrorCode::FormatError, source + " line " + std::to_string(ln) + ": " + e.what());
        }
        if (!s.is_valid()) bad_cell(source, ln, "state", s.key());
        states[r] = s;
    }
    if (stream == Stream::OT) {
        frame.ot_times = std::move(times);
        frame.ot = std::move(values);
        frame.ot_state = std::move(states);
        frame.ot_mode = std::move(modes);
    } else {
        frame.it_times = std::move(times);
        frame.it = std::move(values);
        frame.it_state = std::move(states);
        frame.it_mode = std::move(modes);
    }
}

std::string mask_csv(const std::vector<MaskEntry>& mask) {
    std::string out = "stream,row,col,kind,original\n";
    for (const auto& m : mask) {
        out += stream_name(m.stream);
        out += ',';
        out += std::to_string(m.row);
        out += ',';
        out += std::to_string(m.col);
        out += ',';
        out += to_string(m.kind);
        out += ',';
        if (!std::isnan(m.original)) put_double(out, m.original);
        out += '\n';
    }
    return out;
}

std::vector<MaskEntry> parse_mask_csv(std::string_view text, const std::string& source) {
    const auto lines = split_lines(text);
    require(!lines.empty() && lines[0] == "stream,row,col,kind,original", ErrorCode::FormatError,
            source + " line 1: unexpected mask header");
    std::vector<MaskEntry> mask;
    mask.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_fields(lines[i]);
        require(f.size() == 5, ErrorCode::FormatError, source + " line " + std::to_string(i + 1) + ": expected 5 fields");
        MaskEntry m;
        try {
            m.stream = parse_stream(f[0]);
            m.kind = parse_mask_kind(f[3]);
        } catch (const Error& e) {
            fail(ErrorCode::FormatError, source + " line " + std::to_string(i + 1) + ": " + e.what());
        }
        m.row = parse_int<std::uint32_t>(f[1], source, i + 1);
        m.col = parse_int<std::uint32_t>(f[2], source, i + 1);
        m.original = f[4].empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(f[4], source, i + 1);
        mask.push_back(m);
    }
    return mask;
}

namespace {

json signal_json(const SignalDef& d) {
    return {{"id", d.id},
            {"name", d.name},
            {"unit", d.unit},
            {"value_kind", to_string(d.value_kind)},
            {"console", d.console_displayed},
            {"role", to_string(d.role)},
            {"offset", d.offset},
            {"gain", d.gain},
            {"noise", d.noise},
            {"noise_model", d.noise_model == NoiseModel::Multiplicative ? "multiplicative" : "additive"},
            {"source", d.source}};
}

SignalDef signal_from_json(const json& j, SignalKind kind) {
    SignalDef d;
    d.kind = kind;
    d.id = j.at("id").get<int>();
    d.name = j.at("name").get<std::string>();
    d.unit = j.value("unit", "");
    d.value_kind = parse_value_kind(j.at("value_kind").get<std::string>());
    d.console_displayed = j.value("console", false);
    d.role = parse_signal_role(j.at("role").get<std::string>());
    d.offset = j.value("offset", 0.0);
    d.gain = j.value("gain", 0.0);
    d.noise = j.value("noise", 0.0);
    const std::string nm = j.value("noise_model", "additive");
    require(nm == "additive" || nm == "multiplicative", ErrorCode::FormatError, "unknown noise model '" + nm + "'");
    d.noise_model = nm == "additive" ? NoiseModel::Additive : NoiseModel::Multiplicative;
    d.source = j.value("source", -1);
    return d;
}

template <typename F>
auto json_guard(std::string_view what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        fail(ErrorCode::FormatError, std::string(what) + ": " + e.what());
    }
}

}  // namespace

std::string catalog_json(const SignalCatalog& catalog) {
    json j;
    j["ot"] = json::array();
    j["it"] = json::array();
    for (const auto& d : catalog.ot()) j["ot"].push_back(signal_json(d));
    for (const auto& d : catalog.it()) j["it"].push_back(signal_json(d));
    return j.dump(1) + "\n";
}

SignalCatalog parse_catalog_json(std::string_view text) {
    return json_guard("catalog", [&] {
        const json j = json::parse(text);
        std::vector<SignalDef> ot, it;
        for (const auto& s : j.at("ot")) ot.push_back(signal_from_json(s, SignalKind::OT));
        for (const auto& s : j.at("it")) it.push_back(signal_from_json(s, SignalKind::IT));
        return SignalCatalog(std::move(ot), std::move(it));
    });
}

namespace {

json state_json(const ScenarioState& s) {
    return {{"trip_available", s.trip_available},
            {"trip_cause", to_string(s.trip_cause)},
            {"fdi_level", s.fdi_level},
            {"dos_level", to_string(s.dos_level)}};
}

ScenarioState state_from_json(const json& j) {
    ScenarioState s;
    s.trip_available = j.at("trip_available").get<bool>();
    s.trip_cause = parse_trip_cause(j.at("trip_cause").get<std::string>());
    s.fdi_level = j.at("fdi_level").get<int>();
    s.dos_level = parse_dos_level(j.at("dos_level").get<std::string>());
    require(s.is_valid(), ErrorCode::FormatError, "manifest holds invalid state " + s.key());
    return s;
}

}  // namespace

std::string manifest_json(const DatasetManifest& m) {
    json j;
    j["format"] = "cyberchar-bundle v1";
    j["bundle_seed"] = m.bundle_seed;
    j["created"] = m.created;
    j["catalog_file"] = m.catalog_file;
    j["datasets"] = json::array();
    for (const auto& d : m.datasets) {
        j["datasets"].push_back({{"id", d.id},
                                 {"state", state_json(d.state)},
                                 {"seed", d.seed},
                                 {"description", d.description},
                                 {"ot_points", d.ot_points},
                                 {"it_points", d.it_points},
                                 {"ot_file", d.ot_file},
                                 {"it_file", d.it_file},
                                 {"mask_file", d.mask_file}});
    }
    return j.dump(1) + "\n";
}

DatasetManifest parse_manifest_json(std::string_view text) {
    return json_guard("manifest", [&] {
        const json j = json::parse(text);
        require(j.value("format", "") == "cyberchar-bundle v1", ErrorCode::FormatError,
                "manifest is not a cyberchar bundle manifest");
        DatasetManifest m;
        m.bundle_seed = j.at("bundle_seed").get<std::uint64_t>();
        m.created = j.value("created", "");
        m.catalog_file = j.at("catalog_file").get<std::string>();
        for (const auto& d : j.at("datasets")) {
            ManifestEntry e;
            e.id = d.at("id").get<std::string>();
            e.state = state_from_json(d.at("state"));
            e.seed = d.at("seed").get<std::uint64_t>();
            e.description = d.value("description", "");
            e.ot_points = d.at("ot_points").get<std::size_t>();
            e.it_points = d.at("it_points").get<std::size_t>();
            e.ot_file = d.at("ot_file").get<std::string>();
            e.it_file = d.at("it_file").get<std::string>();
            e.mask_file = d.at("mask_file").get<std::string>();
            m.datasets.push_back(std::move(e));
        }
        return m;
    });
}

DatasetManifest save_bundle(const fs::path& dir, const UseCaseBundle& bundle, const std::string& created) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec && fs::is_directory(dir), ErrorCode::IoError, "cannot create output directory " + dir.string());
    DatasetManifest m;
    m.bundle_seed = bundle.seed;
    m.created = created;
    m.catalog_file = "catalog.json";
    write_text(dir / m.catalog_file, catalog_json(bundle.catalog));
    for (const auto& d : bundle.datasets) {
        ManifestEntry e;
        e.id = d.id;
        e.state = d.state;
        e.seed = d.seed;
        e.description = d.description;
        e.ot_points = d.frame.ot_points();
        e.it_points = d.frame.it_points();
        e.ot_file = d.id + "_ot.csv";
        e.it_file = d.id + "_it.csv";
        e.mask_file = d.id + "_mask.csv";
        write_text(dir / e.ot_file, frame_csv(d.frame, bundle.catalog, Stream::OT));
        write_text(dir / e.it_file, frame_csv(d.frame, bundle.catalog, Stream::IT));
        write_text(dir / e.mask_file, mask_csv(d.frame.mask));
        m.datasets.push_back(std::move(e));
    }
    write_text(dir / "manifest.json", manifest_json(m));
    return m;
}

UseCaseBundle load_bundle(const fs::path& dir) {
    require(fs::is_directory(dir), ErrorCode::IoError, "bundle directory " + dir.string() + " does not exist");
    const DatasetManifest m = parse_manifest_json(read_text(dir / "manifest.json"));
    UseCaseBundle b;
    b.seed = m.bundle_seed;
    b.catalog = parse_catalog_json(read_text(dir / m.catalog_file));
    std::size_t csv_files = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() > 7 && name.ends_with("_ot.csv")) ++csv_files;
    }
    require(csv_files == m.datasets.size(), ErrorCode::FormatError,
            "manifest lists " + std::to_string(m.datasets.size()) + " datasets but the directory holds " +
                std::to_string(csv_files) + " OT files");
    for (const auto& e : m.datasets) {
        DatasetRecord d;
        d.id = e.id;
        d.state = e.state;
        d.seed = e.seed;
        d.description = e.description;
        parse_frame_csv(read_text(dir / e.ot_file), b.catalog, Stream::OT, d.frame, e.ot_file);
        parse_frame_csv(read_text(dir / e.it_file), b.catalog, Stream::IT, d.frame, e.it_file);
        d.frame.mask = parse_mask_csv(read_text(dir / e.mask_file), e.mask_file);
        require(d.frame.ot_points() == e.ot_points && d.frame.it_points() == e.it_points, ErrorCode::FormatError,
                "dataset " + e.id + ": point counts disagree with the manifest (OT " +
                    std::to_string(d.frame.ot_points()) + " vs " + std::to_string(e.ot_points) + ", IT " +
                    std::to_string(d.frame.it_points()) + " vs " + std::to_string(e.it_points) + ")");
        try {
            d.frame.validate();
        } catch (const Error& err) {
            fail(ErrorCode::FormatError, "dataset " + e.id + ": " + err.what());
        }
        b.datasets.push_back(std::move(d));
    }
    b.validate();
    return b;
}

std::string scaler_text(const ScalerParams& s) {
    std::string out = "cyberchar-scaler v1\nmethod ";
    out += to_string(s.method);
    out += "\nn " + std::to_string(s.n_signals()) + "\ncenter";
    for (double v : s.center) {
        out += ' ';
        put_double(out, v);
    }
    out += "\nscale";
    for (double v : s.scale) {
        out += ' ';
        put_double(out, v);
    }
    out += "\nend\n";
    return out;
}

ScalerParams parse_scaler_text(std::string_view text) {
    const auto lines = split_lines(text);
    require(lines.size() == 6 && lines[0] == "cyberchar-scaler v1" && lines[5] == "end", ErrorCode::FormatError,
            "not a cyberchar scaler file");
    ScalerParams s;
    auto fields = [&](std::size_t i, std::string_view key) {
        auto f = split_fields(lines[i], ' ');
        require(!f.empty() && f[0] == key, ErrorCode::FormatError,
                "scaler line " + std::to_string(i + 1) + ": expected '" + std::string(key) + "'");
        f.erase(f.begin());
        return f;
    };
    const auto m = fields(1, "method");
    require(m.size() == 1, ErrorCode::FormatError, "scaler line 2: expected one method");
    s.method = parse_scaling(m[0]);
    const auto n = fields(2, "n");
    require(n.size() == 1, ErrorCode::FormatError, "scaler line 3: expected a count");
    const auto count = parse_int<std::size_t>(n[0], "scaler", 3);
    for (auto f : fields(3, "center")) s.center.push_back(parse_double(f, "scaler", 4));
    for (auto f : fields(4, "scale")) s.scale.push_back(parse_double(f, "scaler", 5));
    require(s.center.size() == count && s.scale.size() == count, ErrorCode::FormatError,
            "scaler vectors differ from the declared count");
    for (double v : s.scale) require(v > 0.0, ErrorCode::FormatError, "scaler holds a non-positive scale");
    return s;
}

namespace {

constexpr std::string_view kArchFormat = "cyberchar-architecture v1";

json level_json(const LevelModel& m, const LevelConfig& cfg, int k) {
    const std::string base = "level" + std::to_string(k);
    return {{"level", k},
            {"stream", stream_name(m.stream)},
            {"target", to_string(m.target)},
            {"window_len", m.geometry.window_len},
            {"step", m.geometry.step},
            {"n_signals", m.n_signals},
            {"train_ratio", cfg.train_ratio},
            {"eval_ratio", cfg.eval_ratio},
            {"split", cfg.split.to_text()},
            {"split_shuffle", cfg.split.shuffle},
            {"model_file", base + ".model"},
            {"scaler_file", base + ".scaler"}};
}

}  // namespace

void save_classifier(const fs::path& dir, const ThreeLevelClassifier& clf, const std::string& config_text) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec && fs::is_directory(dir), ErrorCode::IoError, "cannot create model directory " + dir.string());
    json j;
    j["format"] = kArchFormat;
    j["seed"] = clf.seed;
    char fp[24];
    std::snprintf(fp, sizeof(fp), "%016llx", static_cast<unsigned long long>(clf.bundle_fingerprint));
    j["bundle_fingerprint"] = fp;
    j["label_rule"] = clf.params.label_rule == LabelRule::AnyAbnormal ? "any_abnormal" : "last_timestep";
    j["clean"] = {{"clip_outliers", clf.params.clean.clip_outliers}, {"mad_k", clf.params.clean.mad_k}};
    j["levels"] = json::array();
    for (int k = 1; k <= 3; ++k) {
        const LevelModel& m = clf.level(k);
        const json lj = level_json(m, clf.params.level(k), k);
        write_text(dir / lj["model_file"].get<std::string>(), serialize_model(m.model));
        write_text(dir / lj["scaler_file"].get<std::string>(), scaler_text(m.scaler));
        j["levels"].push_back(lj);
    }
    j["config"] = config_text;
    write_text(dir / "manifest.json", j.dump(1) + "\n");
}

ThreeLevelClassifier load_classifier(const fs::path& dir, std::string* config_text) {
    require(fs::is_directory(dir), ErrorCode::IoError, "model directory " + dir.string() + " does not exist");
    return json_guard("model manifest", [&] {
        const json j = json::parse(read_text(dir / "manifest.json"));
        require(j.value("format", "") == kArchFormat, ErrorCode::FormatError,
                "manifest is not a cyberchar architecture manifest");
        ThreeLevelClassifier clf;
        clf.params = ArchitectureParams::defaults();
        clf.seed = j.at("seed").get<std::uint64_t>();
        clf.bundle_fingerprint = std::stoull(j.at("bundle_fingerprint").get<std::string>(), nullptr, 16);
        const std::string rule = j.at("label_rule").get<std::string>();
        require(rule == "any_abnormal" || rule == "last_timestep", ErrorCode::FormatError,
                "unknown label rule '" + rule + "'");
        clf.params.label_rule = rule == "any_abnormal" ? LabelRule::AnyAbnormal : LabelRule::LastTimestep;
        clf.params.clean.clip_outliers = j.at("clean").at("clip_outliers").get<bool>();
        clf.params.clean.mad_k = j.at("clean").at("mad_k").get<double>();
        const auto& levels = j.at("levels");
        require(levels.size() == 3, ErrorCode::FormatError, "model manifest must list three levels");
        std::array<LevelModel*, 3> slots{&clf.level1, &clf.level2, &clf.level3};
        for (std::size_t i = 0; i < 3; ++i) {
            const json& lj = levels[i];
            const int k = lj.at("level").get<int>();
            require(k == static_cast<int>(i) + 1, ErrorCode::FormatError, "model manifest levels out of order");
            LevelModel& m = *slots[i];
            m.stream = parse_stream(lj.at("stream").get<std::string>());
            m.target = parse_target(lj.at("target").get<std::string>());
            m.geometry = {lj.at("window_len").get<std::size_t>(), lj.at("step").get<std::size_t>()};
            m.n_signals = lj.at("n_signals").get<std::size_t>();
            m.model = deserialize_model(read_text(dir / lj.at("model_file").get<std::string>()));
            m.scaler = parse_scaler_text(read_text(dir / lj.at("scaler_file").get<std::string>()));
            require(m.model.n_features() == m.feature_width(), ErrorCode::FormatError,
                    "level " + std::to_string(k) + " model width differs from its window geometry");
            require(m.scaler.n_signals() == m.n_signals, ErrorCode::FormatError,
                    "level " + std::to_string(k) + " scaler width differs from its signal count");
            LevelConfig& cfg = clf.params.level(k);
            cfg.hp = m.model.hyperparams();
            cfg.geometry = m.geometry;
            cfg.scaling = m.scaler.method;
            cfg.train_ratio = lj.at("train_ratio").get<double>();
            cfg.eval_ratio = lj.at("eval_ratio").get<double>();
            cfg.split = SplitSpec::parse(lj.at("split").get<std::string>());
            cfg.split.shuffle = lj.value("split_shuffle", true);
        }
        require(clf.level1.geometry == clf.level3.geometry, ErrorCode::FormatError,
                "levels 1 and 3 must share the OT window geometry");
        if (config_text) *config_text = j.value("config", "");
        return clf;
    });
}

}  // namespace cyberchar
