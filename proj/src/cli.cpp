#include "cyberchar/cli.hpp"

#include <charconv>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "cyberchar/error.hpp"
#include "cyberchar/io.hpp"
#include "cyberchar/random.hpp"

namespace cyberchar::cli {

namespace {

void log(const GlobalOptions& g, const std::string& msg) {
    if (g.verbose) std::cerr << msg << '\n';
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

fs::path ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    require(!ec && fs::is_directory(p), ErrorCode::IoError, "cannot create output directory " + p.string());
    return p;
}

std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = line.find(',', start);
        f.push_back(line.substr(start, p == line.npos ? line.npos : p - start));
        if (p == line.npos) break;
        start = p + 1;
    }
    return f;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t p = text.find('\n', start);
        if (p == text.npos) p = text.size();
        auto l = text.substr(start, p - start);
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        if (!l.empty()) out.push_back(l);
        start = p + 1;
    }
    return out;
}

std::uint64_t holdout_seed(std::uint64_t seed) { return derive_seed(seed, "holdout"); }

}  // namespace

ExperimentConfig resolve_config(const GlobalOptions& g) {
    ExperimentConfig c = g.config_path.empty() ? parse_config("", "defaults") : load_config(g.config_path);
    for (const auto& kv : g.set) {
        const auto eq = kv.find('=');
        require(eq != std::string::npos, ErrorCode::ConfigError, "--set expects key=value, got '" + kv + "'");
        apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed) c.seed = *g.seed;
    if (g.out) c.output_dir = *g.out;
    if (g.jobs) c.jobs = *g.jobs;
    require(c.jobs >= 1, ErrorCode::ConfigError, "--jobs must be at least 1");
    for (int k = 1; k <= 3; ++k) c.architecture.level(k).hp.forest.n_jobs = c.jobs;
    c.combined.level.hp.forest.n_jobs = c.jobs;
    c.sweep.n_jobs = c.jobs;
    return c;
}

fs::path cmd_generate(const GlobalOptions& g) {
    const ExperimentConfig c = resolve_config(g);
    log(g, "building use case with seed " + std::to_string(c.seed));
    const UseCaseBundle bundle = build_use_case(c.use_case, c.seed);
    const fs::path out = c.output_dir;
    save_bundle(out, bundle, c.created);
    log(g, "wrote " + std::to_string(bundle.datasets.size()) + " datasets to " + out.string());
    return out;
}

fs::path cmd_train(const GlobalOptions& g, const fs::path& bundle_dir) {
    const ExperimentConfig c = resolve_config(g);
    const UseCaseBundle bundle = load_bundle(bundle_dir);
    log(g, "training three-level classifier");
    const ArchitectureTraining t = train_architecture_full(bundle, c.architecture, c.seed);
    const fs::path out = c.output_dir;
    save_classifier(out, t.classifier, to_text(c));
    std::string v = "level,accuracy,precision,recall,f1,tp,fn,fp,tn,train_windows,val_windows,test_windows\n";
    for (int k = 0; k < 3; ++k) {
        const auto& cm = t.validation[static_cast<std::size_t>(k)];
        const auto m = metrics(cm);
        const auto& parts = t.partitions[static_cast<std::size_t>(k)].parts;
        v += std::to_string(k + 1) + "," + fmt(m.accuracy) + "," + fmt(m.precision) + "," + fmt(m.recall) + "," +
             fmt(m.f1) + "," + std::to_string(cm.tp()) + "," + std::to_string(cm.fn()) + "," + std::to_string(cm.fp()) +
             "," + std::to_string(cm.tn()) + "," + std::to_string(parts[0].size()) + "," +
             std::to_string(parts[1].size()) + "," + std::to_string(parts[2].size()) + "\n";
        log(g, "level " + std::to_string(k + 1) + " validation F1 " + fmt(m.f1));
    }
    write_text(out / "validation.csv", v);
    return out;
}

std::string binary_cm_csv(const ConfusionMatrix& cm) {
    require(cm.k == 2, ErrorCode::InvalidArgument, "binary confusion matrix expected");
    return "actual,predicted_0,predicted_1\n0," + std::to_string(cm.tn()) + "," + std::to_string(cm.fp()) + "\n1," +
           std::to_string(cm.fn()) + "," + std::to_string(cm.tp()) + "\n";
}

std::string overall_cm_csv(const ConfusionMatrix& cm) {
    std::string s = "actual";
    for (int p = 0; p < kFusedClassCount; ++p) s += "," + std::string(class_name(static_cast<FusedClass>(p)));
    s += '\n';
    for (std::size_t a = 0; a < cm.k; ++a) {
        s += class_name(static_cast<FusedClass>(a));
        for (std::size_t p = 0; p < cm.k; ++p) s += "," + std::to_string(cm.at(a, p));
        s += '\n';
    }
    return s;
}

std::string metrics_csv(const EvaluationReport& r) {
    std::string s = "scope,accuracy,precision,recall,f1,tp,fn,fp,tn,auc\n";
    for (const auto& l : r.levels) {
        s += "level" + std::to_string(l.level) + "," + fmt(l.metrics.accuracy) + "," + fmt(l.metrics.precision) + "," +
             fmt(l.metrics.recall) + "," + fmt(l.metrics.f1) + "," + std::to_string(l.cm.tp()) + "," +
             std::to_string(l.cm.fn()) + "," + std::to_string(l.cm.fp()) + "," + std::to_string(l.cm.tn()) + "," +
             (l.roc ? fmt(l.roc->auc) : std::string()) + "\n";
    }
    s += "overall," + fmt(r.overall_accuracy) + ",,,,,,,,\n";
    return s;
}

namespace {

std::string roc_csv(const RocCurve& c) {
    std::string s = "threshold,fpr,tpr\n";
    for (const auto& p : c.points) s += (std::isinf(p.threshold) ? "inf" : num(p.threshold)) + "," + num(p.fpr) + "," + num(p.tpr) + "\n";
    return s;
}

void write_report(const fs::path& dir, const EvaluationReport& r, const std::string& prefix) {
    for (const auto& l : r.levels) {
        write_text(dir / (prefix + "level" + std::to_string(l.level) + "_cm.csv"), binary_cm_csv(l.cm));
        if (l.roc) write_text(dir / (prefix + "level" + std::to_string(l.level) + "_roc.csv"), roc_csv(*l.roc));
    }
    write_text(dir / (prefix + "overall_cm.csv"), overall_cm_csv(r.overall));
    write_text(dir / (prefix + "metrics.csv"), metrics_csv(r));
}

}  // namespace

fs::path cmd_eval(const GlobalOptions& g, const fs::path& model_dir, const fs::path& bundle_dir, bool out_of_training) {
    std::string stored;
    const ThreeLevelClassifier clf = load_classifier(model_dir, &stored);
    ExperimentConfig c;
    if (g.config_path.empty()) {
        c = parse_config(stored, (model_dir / "manifest.json").string());
        // Re-apply command-line overrides on top of the stored training config.
        for (const auto& kv : g.set) {
            const auto eq = kv.find('=');
            require(eq != std::string::npos, ErrorCode::ConfigError, "--set expects key=value, got '" + kv + "'");
            apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (g.seed) c.seed = *g.seed;
        if (g.out) c.output_dir = *g.out;
    } else {
        c = resolve_config(g);
    }
    const UseCaseBundle bundle = load_bundle(bundle_dir);
    const bool same = bundle_fingerprint(bundle) == clf.bundle_fingerprint;

    std::array<WindowSet, 3> tests;
    std::vector<DatasetRecord> overall;
    if (same) {
        log(g, "bundle matches the training data: using the held-out test partitions");
        for (int k = 1; k <= 3; ++k) {
            const WindowSet pool = level_pool(bundle, k, clf.params);
            tests[static_cast<std::size_t>(k - 1)] =
                partition_level(pool, clf.params.level(k), derive_seed(clf.seed, "level" + std::to_string(k))).parts[2];
        }
        const std::uint64_t hs = holdout_seed(clf.seed);
        log(g, "building an independent bundle for the 6-class matrix");
        UseCaseBundle holdout = build_use_case(c.use_case, hs);
        overall = dos_probes(holdout, c.use_case, hs);
        for (auto& d : holdout.datasets) overall.push_back(std::move(d));
    } else {
        tests = level_test_sets(bundle, clf.params, c.seed);
        overall = dos_probes(bundle, c.use_case, c.seed);
        overall.insert(overall.end(), bundle.datasets.begin(), bundle.datasets.end());
    }
    const EvaluationReport r = evaluate(clf, tests, overall, c.roc);
    const fs::path out = ensure_dir(c.output_dir);
    write_report(out, r, "");
    for (const auto& l : r.levels) log(g, "level " + std::to_string(l.level) + " test F1 " + fmt(l.metrics.f1));
    log(g, "overall 6-class accuracy " + fmt(r.overall_accuracy));

    if (out_of_training) {
        const EvaluationReport o = out_of_training_eval(clf, c.use_case, c.out_of_training, derive_seed(c.seed, "oot"));
        write_report(out, o, "out_of_training_");
        for (const auto& l : o.levels) {
            log(g, "out-of-training level " + std::to_string(l.level) + " F1 " + fmt(l.metrics.f1));
        }
    }
    return out;
}

std::string sweep_csv(const SweepReport& r) {
    std::string s = "rank,index,level,window_len,window_step,train_ratio,scaling,algorithm,split,abnormal_fraction,seed,"
                    "tp,fn,fp,tn,accuracy,precision,recall,f1\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const SweepRow& x = r.rows[i];
        s += std::to_string(i + 1) + "," + std::to_string(x.index) + "," + std::to_string(r.level) + "," +
             std::to_string(x.window_len) + "," + std::to_string(x.window_step) + "," + num(x.train_ratio) + "," +
             std::string(to_string(x.scaling)) + "," + std::string(to_string(x.algorithm)) + "," + x.split.to_text() +
             "," + num(x.abnormal_fraction) + "," + std::to_string(x.seed) + "," + std::to_string(x.validation.tp()) +
             "," + std::to_string(x.validation.fn()) + "," + std::to_string(x.validation.fp()) + "," +
             std::to_string(x.validation.tn()) + "," + fmt(x.metrics.accuracy) + "," + fmt(x.metrics.precision) + "," +
             fmt(x.metrics.recall) + "," + fmt(x.metrics.f1) + "\n";
    }
    return s;
}

SweepReport parse_sweep_csv(std::string_view text) {
    const auto lines = lines_of(text);
    require(!lines.empty() && lines[0].starts_with("rank,index,level,"), ErrorCode::FormatError,
            "not a sweep CSV (bad header)");
    SweepReport r;
    auto to_u = [](std::string_view f, std::size_t line) {
        std::uint64_t v = 0;
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        require(res.ec == std::errc() && res.ptr == f.data() + f.size(), ErrorCode::FormatError,
                "sweep CSV line " + std::to_string(line) + ": bad integer '" + std::string(f) + "'");
        return v;
    };
    auto to_d = [](std::string_view f, std::size_t line) {
        double v = 0;
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        require(res.ec == std::errc() && res.ptr == f.data() + f.size(), ErrorCode::FormatError,
                "sweep CSV line " + std::to_string(line) + ": bad number '" + std::string(f) + "'");
        return v;
    };
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = fields(lines[i]);
        require(f.size() == 19, ErrorCode::FormatError, "sweep CSV line " + std::to_string(i + 1) + ": expected 19 fields");
        SweepRow x;
        x.index = to_u(f[1], i + 1);
        r.level = static_cast<int>(to_u(f[2], i + 1));
        x.window_len = to_u(f[3], i + 1);
        x.window_step = to_u(f[4], i + 1);
        x.train_ratio = to_d(f[5], i + 1);
        x.scaling = parse_scaling(f[6]);
        x.algorithm = parse_algorithm(f[7]);
        x.split = SplitSpec::parse(f[8]);
        x.abnormal_fraction = to_d(f[9], i + 1);
        x.seed = to_u(f[10], i + 1);
        x.validation = ConfusionMatrix::binary(to_u(f[11], i + 1), to_u(f[12], i + 1), to_u(f[13], i + 1),
                                               to_u(f[14], i + 1));
        x.metrics = metrics(x.validation);
        r.rows.push_back(x);
    }
    r.grid_size = r.rows.size();
    return r;
}

std::string sweep_timing_csv(const SweepReport& r) {
    std::string s = "index,algorithm,window_len,window_step,fit_seconds\n";
    for (const auto& x : r.rows) {
        s += std::to_string(x.index) + "," + std::string(to_string(x.algorithm)) + "," + std::to_string(x.window_len) +
             "," + std::to_string(x.window_step) + "," + fmt(x.fit_seconds) + "\n";
    }
    return s;
}

fs::path cmd_sweep(const GlobalOptions& g, const fs::path& bundle_dir, bool timings) {
    const ExperimentConfig c = resolve_config(g);
    const UseCaseBundle bundle = load_bundle(bundle_dir);
    log(g, "sweeping " + std::to_string(c.sweep.size()) + " combinations on level " + std::to_string(c.sweep.level));
    const SweepReport r = sweep(bundle, c.sweep, c.architecture, c.seed);
    const fs::path out = ensure_dir(c.output_dir);
    write_text(out / "sweep.csv", sweep_csv(r));
    if (timings) write_text(out / "sweep_timing.csv", sweep_timing_csv(r));
    if (g.plots) {
        for (const auto& curve : sensitivity_curves(r)) write_text(out / ("sweep_" + curve.axis + ".svg"), render_svg(curve));
    }
    if (!r.rows.empty()) {
        log(g, "best: " + std::string(to_string(r.rows[0].algorithm)) + " F1 " + fmt(r.rows[0].metrics.f1));
    }
    return out;
}

std::size_t cmd_classify(const GlobalOptions& g, const fs::path& model_dir, const fs::path& ot_csv,
                         const std::optional<fs::path>& it_csv, const std::optional<fs::path>& catalog,
                         std::ostream& out) {
    const ThreeLevelClassifier clf = load_classifier(model_dir);
    fs::path it_path;
    if (it_csv) {
        it_path = *it_csv;
    } else {
        const std::string name = ot_csv.filename().string();
        require(name.ends_with("_ot.csv"), ErrorCode::ConfigError,
                "cannot infer the IT file for " + ot_csv.string() + "; pass --it");
        it_path = ot_csv.parent_path() / (name.substr(0, name.size() - 7) + "_it.csv");
    }
    SignalCatalog cat = default_catalog();
    if (catalog) {
        cat = parse_catalog_json(read_text(*catalog));
    } else if (fs::exists(ot_csv.parent_path() / "catalog.json")) {
        cat = parse_catalog_json(read_text(ot_csv.parent_path() / "catalog.json"));
    }
    TelemetryFrame frame;
    parse_frame_csv(read_text(ot_csv), cat, Stream::OT, frame, ot_csv.string());
    parse_frame_csv(read_text(it_path), cat, Stream::IT, frame, it_path.string());
    require(frame.ot.cols() * clf.level1.geometry.window_len == clf.level1.feature_width() &&
                frame.ot.cols() == clf.level1.n_signals && frame.it.cols() == clf.level2.n_signals,
            ErrorCode::DimensionMismatch, "input signal counts differ from the model");
    const FrameDecisions fd = classify_frame(clf, frame);
    std::string buf;
    for (std::size_t i = 0; i < fd.decisions.size(); ++i) {
        const auto& d = fd.decisions[i];
        buf.clear();
        buf += num(fd.end_time[i]);
        buf += ',';
        buf += static_cast<char>('0' + d.levels.l1);
        buf += ',';
        buf += static_cast<char>('0' + d.levels.l2);
        buf += ',';
        buf += static_cast<char>('0' + d.levels.l3);
        buf += ',';
        buf += class_name(d.fused);
        buf += '\n';
        out << buf;
    }
    log(g, std::to_string(fd.decisions.size()) + " windows classified");
    return fd.decisions.size();
}

fs::path cmd_report(const GlobalOptions& g, const fs::path& dir, std::ostream& out) {
    require(fs::is_directory(dir), ErrorCode::IoError, "results directory " + dir.string() + " does not exist");
    std::ostringstream rep;
    bool any = false;
    for (const std::string prefix : {"", "out_of_training_"}) {
        const fs::path m = dir / (prefix + "metrics.csv");
        if (!fs::exists(m)) continue;
        any = true;
        rep << (prefix.empty() ? "Evaluation" : "Out-of-training scenario") << "\n";
        const auto text = read_text(m);
        for (auto line : lines_of(text)) {
            if (line.starts_with("scope")) continue;
            const auto f = fields(line);
            if (f.size() < 5) continue;
            if (f[0] == "overall") {
                rep << "  overall 6-class accuracy " << f[1] << "\n";
            } else {
                rep << "  " << f[0] << ": accuracy " << f[1] << ", precision " << f[2] << ", recall " << f[3] << ", F1 "
                    << f[4] << "\n";
            }
        }
        const fs::path cm = dir / (prefix + "overall_cm.csv");
        if (fs::exists(cm)) {
            rep << "  overall confusion (rows actual, columns predicted)\n";
            const std::string cm_text = read_text(cm);
            for (auto line : lines_of(cm_text)) rep << "    " << line << "\n";
        }
    }
    const fs::path sw = dir / "sweep.csv";
    if (fs::exists(sw)) {
        any = true;
        const SweepReport r = parse_sweep_csv(read_text(sw));
        rep << "Sweep (level " << r.level << ", " << r.rows.size() << " combinations)\n";
        const std::size_t top = std::min<std::size_t>(5, r.rows.size());
        for (std::size_t i = 0; i < top; ++i) {
            const auto& x = r.rows[i];
            rep << "  #" << i + 1 << " " << to_string(x.algorithm) << " W=" << x.window_len << " step=" << x.window_step
                << " ratio=" << num(x.train_ratio) << " " << to_string(x.scaling) << " " << x.split.to_text() << " F1 "
                << fmt(x.metrics.f1) << "\n";
        }
        for (const auto& c : sensitivity_curves(r)) {
            rep << "  mean F1 by " << c.axis << ":";
            for (std::size_t i = 0; i < c.labels.size(); ++i) rep << " " << c.labels[i] << "=" << fmt(c.mean_f1[i]);
            rep << "\n";
            if (g.plots) write_text(dir / ("sweep_" + c.axis + ".svg"), render_svg(c));
        }
    }
    require(any, ErrorCode::MissingDataset, "no metrics.csv or sweep.csv in " + dir.string());
    const fs::path target = g.out ? ensure_dir(*g.out) / "report.txt" : dir / "report.txt";
    write_text(target, rep.str());
    out << rep.str();
    return target;
}

}  // namespace cyberchar::cli
