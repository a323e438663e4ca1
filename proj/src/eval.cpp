#include "cyberchar/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include "cyberchar/error.hpp"
#include "cyberchar/random.hpp"

namespace cyberchar {

LevelReport evaluate_level(const LevelModel& model, const WindowSet& test, int level, bool with_roc) {
    LevelReport r;
    r.level = level;
    const auto scores = model.score(test.features);
    std::vector<std::uint8_t> pred(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] >= 0.5 ? 1 : 0;
    r.cm = confusion(test.labels, pred);
    r.metrics = metrics(r.cm);
    if (with_roc && test.positives() > 0 && test.negatives() > 0) r.roc = roc(test.labels, scores);
    return r;
}

std::array<WindowSet, 3> level_test_sets(const UseCaseBundle& bundle, const ArchitectureParams& params,
                                         std::uint64_t seed) {
    std::array<WindowSet, 3> out;
    for (int k = 1; k <= 3; ++k) {
        const WindowSet pool = level_pool(bundle, k, params);
        out[static_cast<std::size_t>(k - 1)] = rebalance_within_budget(
            pool, params.level(k).eval_ratio, derive_seed(seed, "test-level" + std::to_string(k)));
    }
    return out;
}

FrameDecisions classify_frame(const ThreeLevelClassifier& clf, const TelemetryFrame& raw) {
    const TelemetryFrame frame = clean(raw, clf.params.clean);
    const WindowGeometry& g = clf.level1.geometry;
    const WindowSet ot = windowize(frame, Stream::OT, g.window_len, g.step, Target::Abnormal, clf.params.label_rule);
    const WindowSet it = aligned_it_windows(frame, g.window_len, g.step, clf.level2.geometry.window_len, Target::Dos,
                                            clf.params.label_rule);
    FrameDecisions out;
    out.decisions = clf.classify_batch(ot.features, it.features);
    out.truth.reserve(ot.size());
    for (const auto& s : ot.states) out.truth.push_back(static_cast<int>(true_class(s)));
    out.end_time = ot.end_time;
    return out;
}

std::vector<DatasetRecord> dos_probes(const UseCaseBundle& bundle, const UseCaseConfig& config, std::uint64_t seed) {
    const DatasetRecord& normal = bundle.get(dataset_ids::kNormal);
    const auto len = static_cast<std::size_t>(std::llround(config.abnormal_duration_s));
    require(normal.frame.timesteps() >= len, ErrorCode::InsufficientData,
            "normal dataset is shorter than one abnormal period");
    const std::size_t first = (normal.frame.timesteps() - len) / 2;
    const TelemetryFrame base = slice_frame(normal.frame, first, len);
    const double t0 = base.ot_times.front();

    std::vector<DatasetRecord> out;
    for (DosLevel dos : {DosLevel::Low, DosLevel::High}) {
        DosSpec spec = config.dos_spec(dos);
        spec.start_s += t0;
        spec.end_s += t0;
        const ScenarioState st = make_state(TripCause::None, 0, dos);
        const std::uint64_t s = derive_seed(seed, "dos-probe-" + std::string(to_string(dos)));
        out.push_back({"dos_probe_" + std::string(to_string(dos)), st, s,
                       "traffic flood over normal operation", apply_dos(base, bundle.catalog, spec, s)});
    }
    return out;
}

ConfusionMatrix evaluate_overall(const ThreeLevelClassifier& clf, const std::vector<DatasetRecord>& datasets) {
    ConfusionMatrix cm(kFusedClassCount);
    for (const auto& d : datasets) {
        const FrameDecisions fd = classify_frame(clf, d.frame);
        for (std::size_t i = 0; i < fd.truth.size(); ++i) {
            ++cm.at(static_cast<std::size_t>(fd.truth[i]), static_cast<std::size_t>(fd.decisions[i].fused));
        }
    }
    return cm;
}

EvaluationReport evaluate(const ThreeLevelClassifier& clf, const std::array<WindowSet, 3>& test_sets,
                          const std::vector<DatasetRecord>& overall_sets, bool with_roc) {
    EvaluationReport r;
    for (int k = 1; k <= 3; ++k) {
        r.levels[static_cast<std::size_t>(k - 1)] =
            evaluate_level(clf.level(k), test_sets[static_cast<std::size_t>(k - 1)], k, with_roc);
    }
    r.overall = evaluate_overall(clf, overall_sets);
    r.overall_accuracy = accuracy(r.overall);
    return r;
}

namespace {

WindowSet pooled(const TelemetryFrame& negatives, const TelemetryFrame& positives, Stream stream,
                 const WindowGeometry& g, Target target, LabelRule rule, const CleanPolicy& policy) {
    WindowSet ws = windowize(clean(negatives, policy), stream, g.window_len, g.step, target, rule, 0);
    ws.append(windowize(clean(positives, policy), stream, g.window_len, g.step, target, rule, 1));
    return ws;
}

}  // namespace

EvaluationReport out_of_training_eval(const ThreeLevelClassifier& clf, const UseCaseConfig& config,
                                      const OutOfTrainingConfig& oot, std::uint64_t seed) {
    const SignalCatalog& cat = config.catalog;
    const UseCaseIngredients ing = build_ingredients(config, derive_seed(seed, "out-of-training"));
    FdiSpec spec;
    spec.level = oot.fdi_level;
    spec.half_window_s = config.half_window_s;
    for (const auto& name : oot.fdi_signals) spec.targets.push_back(cat.ot_index(name));
    spec.validate(cat);
    const TemplateSet templates = extract_trip_templates(ing.reserve, cat, spec.targets, config.half_window_s);
    TelemetryFrame frame = inject_fdi(ing.cyber_baseline, spec, templates, ing.trip_rows);
    frame = apply_dos(frame, cat, config.dos_spec(oot.dos), derive_seed(seed, "out-of-training-dos"));

    const ArchitectureParams& p = clf.params;
    std::array<WindowSet, 3> tests;
    tests[0] = pooled(ing.normal, frame, Stream::OT, clf.level1.geometry, Target::TripUnavailable, p.label_rule, p.clean);
    tests[1] = pooled(ing.normal, frame, Stream::IT, clf.level2.geometry, Target::Dos, p.label_rule, p.clean);
    tests[2] = pooled(ing.cyber_baseline, frame, Stream::OT, clf.level3.geometry, Target::Fdi, p.label_rule, p.clean);
    for (int k = 1; k <= 3; ++k) {
        auto& t = tests[static_cast<std::size_t>(k - 1)];
        t = rebalance_within_budget(t, p.level(k).eval_ratio, derive_seed(seed, "oot-level" + std::to_string(k)));
    }

    const ScenarioState st = make_state(TripCause::Cyber, oot.fdi_level, oot.dos);
    std::vector<DatasetRecord> scenario;
    scenario.push_back({"out_of_training", st, seed, "channel 3/4 falsification with traffic flood", std::move(frame)});
    EvaluationReport r = evaluate(clf, tests, scenario, false);
    r.scenario = "out_of_training";
    return r;
}

SweepGrid SweepGrid::desk() {
    SweepGrid g;
    g.window_len = {5, 20};
    g.window_step = {1, 5};
    g.train_ratio = {1, 20};
    g.scaling = {ScalingMethod::MinMax, ScalingMethod::Standard};
    g.algorithm = {Algorithm::LogisticRegression, Algorithm::RandomForest};
    g.split = {SplitSpec::parse("60/20/20"), SplitSpec::parse("70/10/20")};
    return g;
}

SweepGrid SweepGrid::full() {
    SweepGrid g;
    g.window_len = {5, 10, 15, 20, 30};
    g.window_step = {1, 2, 3, 4, 5};
    g.train_ratio = {1, 3, 5, 10, 20, 30};
    g.scaling = {ScalingMethod::MinMax, ScalingMethod::Standard};
    g.algorithm = {kAllAlgorithms.begin(), kAllAlgorithms.end()};
    g.split = {SplitSpec::parse("60/20/20"), SplitSpec::parse("70/15/15"), SplitSpec::parse("80/10/10")};
    return g;
}

namespace {

template <typename T>
std::vector<T> or_base(const std::vector<T>& axis, T base) {
    return axis.empty() ? std::vector<T>{base} : axis;
}

struct Axes {
    std::vector<std::size_t> window_len, window_step;
    std::vector<double> train_ratio;
    std::vector<ScalingMethod> scaling;
    std::vector<Algorithm> algorithm;
    std::vector<SplitSpec> split;
    std::vector<double> abnormal_fraction;

    Axes(const SweepGrid& g, const LevelConfig& base)
        : window_len(or_base(g.window_len, base.geometry.window_len)),
          window_step(or_base(g.window_step, base.geometry.step)),
          train_ratio(or_base(g.train_ratio, base.train_ratio)),
          scaling(or_base(g.scaling, base.scaling)),
          algorithm(or_base(g.algorithm, base.hp.algorithm)),
          split(or_base(g.split, base.split)),
          abnormal_fraction(or_base(g.abnormal_fraction, 1.0)) {}

    std::size_t size() const {
        return window_len.size() * window_step.size() * train_ratio.size() * scaling.size() * algorithm.size() *
               split.size() * abnormal_fraction.size();
    }

    // Mixed-radix decode, abnormal fraction varying fastest.
    SweepRow row(std::size_t index) const {
        SweepRow r;
        r.index = index;
        std::size_t i = index;
        auto take = [&i](std::size_t n) {
            const std::size_t v = i % n;
            i /= n;
            return v;
        };
        r.abnormal_fraction = abnormal_fraction[take(abnormal_fraction.size())];
        r.split = split[take(split.size())];
        r.algorithm = algorithm[take(algorithm.size())];
        r.scaling = scaling[take(scaling.size())];
        r.train_ratio = train_ratio[take(train_ratio.size())];
        r.window_step = window_step[take(window_step.size())];
        r.window_len = window_len[take(window_len.size())];
        return r;
    }
};

WindowSet keep_positive_fraction(const WindowSet& pool, double fraction, std::uint64_t seed) {
    if (fraction >= 1.0) return pool;
    std::vector<std::size_t> pos, rows;
    for (std::size_t i = 0; i < pool.size(); ++i) (pool.labels[i] ? pos : rows).push_back(i);
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pos.size())));
    require(k >= 1, ErrorCode::InsufficientData, "abnormal fraction leaves no positive windows");
    Rng rng(seed);
    for (std::size_t j : sample_without_replacement(pos.size(), k, rng)) rows.push_back(pos[j]);
    std::sort(rows.begin(), rows.end());
    return pool.subset(rows);
}

}  // namespace

std::size_t SweepGrid::size() const {
    return Axes(*this, ArchitectureParams::defaults().level(level)).size();
}

SweepReport sweep(const UseCaseBundle& bundle, const SweepGrid& grid, const ArchitectureParams& base,
                  std::uint64_t seed) {
    require(grid.level >= 1 && grid.level <= 3, ErrorCode::ConfigError, "sweep level must be 1, 2 or 3");
    const bool any_axis = !grid.window_len.empty() || !grid.window_step.empty() || !grid.train_ratio.empty() ||
                          !grid.scaling.empty() || !grid.algorithm.empty() || !grid.split.empty() ||
                          !grid.abnormal_fraction.empty();
    require(any_axis, ErrorCode::EmptyGrid, "sweep grid has no axis values");
    for (double f : grid.abnormal_fraction) {
        require(f > 0.0 && f <= 1.0, ErrorCode::ConfigError, "abnormal fraction must lie in (0, 1]");
    }
    const LevelConfig& base_cfg = base.level(grid.level);
    const Axes axes(grid, base_cfg);
    const std::size_t total = axes.size();

    std::vector<std::size_t> chosen;
    if (grid.budget > 0 && grid.budget < total) {
        Rng rng(derive_seed(seed, "budget"));
        chosen = sample_without_replacement(total, grid.budget, rng);
    } else {
        chosen.resize(total);
        for (std::size_t i = 0; i < total; ++i) chosen[i] = i;
    }

    std::vector<SweepRow> rows;
    rows.reserve(chosen.size());
    for (std::size_t idx : chosen) {
        SweepRow r = axes.row(idx);
        r.seed = derive_seed(seed, static_cast<std::uint64_t>(idx));
        rows.push_back(r);
    }

    // One pool per window geometry, released before the next one is built.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> by_geometry;
    for (std::size_t i = 0; i < rows.size(); ++i) by_geometry[{rows[i].window_len, rows[i].window_step}].push_back(i);

    const Stream stream = grid.level == 2 ? Stream::IT : Stream::OT;
    const Target target = grid.level == 1 ? Target::TripUnavailable : grid.level == 2 ? Target::Dos : Target::Fdi;
    const std::size_t jobs = std::max<std::size_t>(1, grid.n_jobs);

    for (const auto& [geom, members] : by_geometry) {
        const WindowSet pool = level_pool(bundle, grid.level, base, WindowGeometry{geom.first, geom.second});
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(members.size());
        auto worker = [&]() {
            for (std::size_t m = next++; m < members.size(); m = next++) {
                SweepRow& r = rows[members[m]];
                try {
                    LevelConfig cfg = base_cfg;
                    cfg.geometry = {r.window_len, r.window_step};
                    cfg.train_ratio = r.train_ratio;
                    cfg.scaling = r.scaling;
                    cfg.hp.algorithm = r.algorithm;
                    cfg.split = r.split;
                    cfg.candidates.clear();
                    if (grid.n_trees) cfg.hp.forest.n_trees = *grid.n_trees;
                    const WindowSet sub = keep_positive_fraction(pool, r.abnormal_fraction,
                                                                 derive_seed(r.seed, "abnormal-fraction"));
                    const auto t0 = std::chrono::steady_clock::now();
                    const LevelPartitions parts = partition_level(sub, cfg, r.seed);
                    const LevelFit fit = fit_level(parts, cfg, stream, target, r.seed);
                    r.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    r.validation = fit.validation;
                    r.metrics = metrics(fit.validation);
                } catch (...) {
                    errors[m] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> threads;
        for (std::size_t t = 1; t < std::min(jobs, members.size()); ++t) threads.emplace_back(worker);
        worker();
        for (auto& t : threads) t.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.metrics.f1 > b.metrics.f1; });
    SweepReport report;
    report.level = grid.level;
    report.grid_size = total;
    report.rows = std::move(rows);
    return report;
}

namespace {

std::string fmt_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

template <typename Key>
SensitivityCurve curve_of(const SweepReport& report, std::string axis, Key key) {
    std::map<std::string, std::pair<double, std::pair<double, std::size_t>>> groups;  // label -> (x, (sum, n))
    std::vector<std::string> order;
    for (const auto& r : report.rows) {
        const auto [label, x] = key(r);
        auto it = groups.find(label);
        if (it == groups.end()) {
            it = groups.emplace(label, std::make_pair(x, std::make_pair(0.0, std::size_t{0}))).first;
            order.push_back(label);
        }
        it->second.second.first += r.metrics.f1;
        ++it->second.second.second;
    }
    std::sort(order.begin(), order.end(),
              [&](const std::string& a, const std::string& b) { return groups[a].first < groups[b].first; });
    SensitivityCurve c;
    c.axis = std::move(axis);
    for (const auto& l : order) {
        const auto& g = groups[l];
        c.labels.push_back(l);
        c.x.push_back(g.first);
        c.mean_f1.push_back(g.second.first / static_cast<double>(g.second.second));
    }
    return c;
}

}  // namespace

std::vector<SensitivityCurve> sensitivity_curves(const SweepReport& report) {
    std::vector<SensitivityCurve> all;
    all.push_back(curve_of(report, "window_len", [](const SweepRow& r) {
        return std::make_pair(std::to_string(r.window_len), static_cast<double>(r.window_len));
    }));
    all.push_back(curve_of(report, "window_step", [](const SweepRow& r) {
        return std::make_pair(std::to_string(r.window_step), static_cast<double>(r.window_step));
    }));
    all.push_back(curve_of(report, "train_ratio", [](const SweepRow& r) {
        return std::make_pair(fmt_number(r.train_ratio), r.train_ratio);
    }));
    all.push_back(curve_of(report, "scaling", [](const SweepRow& r) {
        return std::make_pair(std::string(to_string(r.scaling)), static_cast<double>(r.scaling));
    }));
    all.push_back(curve_of(report, "algorithm", [](const SweepRow& r) {
        return std::make_pair(std::string(to_string(r.algorithm)), static_cast<double>(r.algorithm));
    }));
    all.push_back(curve_of(report, "split", [](const SweepRow& r) {
        return std::make_pair(r.split.to_text(), r.split.train);
    }));
    all.push_back(curve_of(report, "abnormal_fraction", [](const SweepRow& r) {
        return std::make_pair(fmt_number(r.abnormal_fraction), r.abnormal_fraction);
    }));
    std::erase_if(all, [](const SensitivityCurve& c) { return c.x.size() < 2; });
    return all;
}

std::string render_svg(const SensitivityCurve& c) {
    constexpr double W = 480, H = 320, L = 60, R = 20, T = 30, B = 50;
    const double pw = W - L - R, ph = H - T - B;
    double lo = 1.0, hi = 0.0;
    for (double f : c.mean_f1) {
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    lo = std::max(0.0, std::floor(lo * 20.0) / 20.0 - 0.05);
    hi = std::min(1.0, std::ceil(hi * 20.0) / 20.0);
    if (hi - lo < 0.05) {
        hi = std::min(1.0, lo + 0.05);
        lo = hi - 0.05;
    }
    const std::size_t n = c.x.size();
    auto px = [&](std::size_t i) { return L + (n == 1 ? pw / 2 : pw * static_cast<double>(i) / static_cast<double>(n - 1)); };
    auto py = [&](double f) { return T + ph * (1.0 - (f - lo) / (hi - lo)); };

    std::string s;
    char buf[256];
    auto add = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof(buf), fmt, args...);
        s += buf;
    };
    add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" font-family=\"sans-serif\" font-size=\"11\">\n", W, H);
    add("<rect width=\"%g\" height=\"%g\" fill=\"white\"/>\n", W, H);
    add("<text x=\"%g\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">mean validation F1 by %s</text>\n", W / 2,
        c.axis.c_str());
    add("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", L, T + ph, L + pw, T + ph);
    add("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", L, T, L, T + ph);
    for (int k = 0; k <= 4; ++k) {
        const double f = lo + (hi - lo) * k / 4.0;
        add("<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.3f</text>\n", L - 6, py(f) + 4, f);
    }
    s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < n; ++i) add("%s%.2f,%.2f", i ? " " : "", px(i), py(c.mean_f1[i]));
    s += "\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
        add("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#1f77b4\"/>\n", px(i), py(c.mean_f1[i]));
        add("<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">%s</text>\n", px(i), T + ph + 16, c.labels[i].c_str());
    }
    add("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n", L + pw / 2, H - 10, c.axis.c_str());
    s += "</svg>\n";
    return s;
}

}  // namespace cyberchar
