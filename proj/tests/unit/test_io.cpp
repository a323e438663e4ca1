#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <unistd.h>

#include "cyberchar/error.hpp"
#include "cyberchar/eval.hpp"
#include "cyberchar/io.hpp"

using namespace cyberchar;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvariantViolation;
}

std::string message_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cyberchar_io_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

bool same_cells(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            const double x = a(r, c), y = b(r, c);
            if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
        }
    }
    return true;
}

const UseCaseBundle& bundle() {
    static const UseCaseBundle b = build_use_case(UseCaseConfig{}, 99);
    return b;
}

TelemetryFrame small_frame() {
    return generate_normal(default_catalog(), OpSchedule::parse("60:600,0:300"), ArtifactConfig{}, 5);
}

}  // namespace

TEST(Io, FrameCsvRoundTrip) {
    const auto& cat = default_catalog();
    const TelemetryFrame f = small_frame();
    TelemetryFrame back;
    for (Stream s : {Stream::OT, Stream::IT}) parse_frame_csv(frame_csv(f, cat, s), cat, s, back);
    EXPECT_TRUE(same_cells(f.ot, back.ot));
    EXPECT_TRUE(same_cells(f.it, back.it));
    EXPECT_EQ(f.ot_times, back.ot_times);
    EXPECT_EQ(f.it_times, back.it_times);
    EXPECT_EQ(f.ot_mode, back.ot_mode);
    EXPECT_EQ(f.it_mode, back.it_mode);
    ASSERT_EQ(f.ot_state.size(), back.ot_state.size());
    for (std::size_t r = 0; r < f.ot_state.size(); ++r) EXPECT_EQ(f.ot_state[r].key(), back.ot_state[r].key());
    EXPECT_EQ(frame_csv(back, cat, Stream::OT), frame_csv(f, cat, Stream::OT));
}

TEST(Io, FrameCsvErrorsNameTheLine) {
    const auto& cat = default_catalog();
    std::string text = frame_csv(small_frame(), cat, Stream::IT);
    TelemetryFrame out;
    const std::size_t line3 = text.find('\n', text.find('\n') + 1) + 1;
    std::string broken = text;
    broken.replace(line3, broken.find(',', line3) - line3, "abc");
    EXPECT_EQ(code_of([&] { parse_frame_csv(broken, cat, Stream::IT, out, "it.csv"); }), ErrorCode::FormatError);
    EXPECT_NE(message_of([&] { parse_frame_csv(broken, cat, Stream::IT, out, "it.csv"); }).find("it.csv line 3"),
              std::string::npos);
    std::string header = text;
    header.replace(0, 1, "time");
    EXPECT_NE(message_of([&] { parse_frame_csv(header, cat, Stream::IT, out, "it.csv"); }).find("line 1"),
              std::string::npos);
    EXPECT_EQ(code_of([&] { parse_frame_csv(text, cat, Stream::OT, out); }), ErrorCode::FormatError);
    EXPECT_EQ(code_of([&] { parse_frame_csv("", cat, Stream::OT, out); }), ErrorCode::FormatError);
}

TEST(Io, MaskCsvRoundTrip) {
    const std::vector<MaskEntry> mask = {{Stream::OT, 3, 7, MaskKind::Falsified, 1.25},
                                         {Stream::IT, 9, 0, MaskKind::Null, -0.5},
                                         {Stream::OT, 11, 2, MaskKind::Outlier, std::nan("")}};
    const auto back = parse_mask_csv(mask_csv(mask));
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[0], mask[0]);
    EXPECT_EQ(back[1], mask[1]);
    EXPECT_EQ(back[2].kind, MaskKind::Outlier);
    EXPECT_TRUE(std::isnan(back[2].original));
    EXPECT_NE(message_of([] { parse_mask_csv("stream,row,col,kind,original\not,1,x,null,0\n", "m.csv"); }).find("m.csv line 2"),
              std::string::npos);
    EXPECT_EQ(code_of([] { parse_mask_csv("bogus\n"); }), ErrorCode::FormatError);
}

TEST(Io, CatalogAndManifestRoundTrip) {
    const SignalCatalog& cat = default_catalog();
    EXPECT_EQ(parse_catalog_json(catalog_json(cat)), cat);
    EXPECT_EQ(catalog_json(parse_catalog_json(catalog_json(cat))), catalog_json(cat));
    DatasetManifest m;
    m.bundle_seed = 12;
    m.created = "1970-01-01T00:00:00Z";
    m.catalog_file = "catalog.json";
    ManifestEntry e;
    e.id = "fdi2_dos_low";
    e.state = make_state(TripCause::Cyber, 2, DosLevel::Low);
    e.seed = 77;
    e.description = "x";
    e.ot_points = 10;
    e.it_points = 4;
    e.ot_file = "a";
    e.it_file = "b";
    e.mask_file = "c";
    m.datasets.push_back(e);
    const std::string text = manifest_json(m);
    EXPECT_EQ(manifest_json(parse_manifest_json(text)), text);
    EXPECT_EQ(code_of([] { parse_manifest_json("{"); }), ErrorCode::FormatError);
}

TEST(Io, ScalerRoundTrip) {
    ScalerParams s;
    s.method = ScalingMethod::MinMax;
    s.center = {0.1, -3.0, 1e-300};
    s.scale = {1.0 / 3.0, 2.5, 7.0};
    EXPECT_EQ(parse_scaler_text(scaler_text(s)), s);
    s.scale[1] = 0.0;
    EXPECT_EQ(code_of([&] { parse_scaler_text(scaler_text(s)); }), ErrorCode::FormatError);
}

TEST(Io, BundleRoundTripKeepsFingerprint) {
    const fs::path dir = scratch("bundle");
    const DatasetManifest m = save_bundle(dir, bundle(), "1970-01-01T00:00:00Z");
    EXPECT_EQ(m.datasets.size(), 14u);
    const UseCaseBundle back = load_bundle(dir);
    EXPECT_EQ(bundle_fingerprint(back), bundle_fingerprint(bundle()));
    for (std::size_t k = 0; k < back.datasets.size(); ++k) {
        EXPECT_EQ(back.datasets[k].id, bundle().datasets[k].id);
        EXPECT_EQ(back.datasets[k].frame.mask.size(), bundle().datasets[k].frame.mask.size());
    }
    fs::remove(dir / m.datasets[3].mask_file);
    EXPECT_EQ(code_of([&] { load_bundle(dir); }), ErrorCode::IoError);
    fs::remove(dir / m.datasets[3].ot_file);
    EXPECT_EQ(code_of([&] { load_bundle(dir); }), ErrorCode::FormatError);
    EXPECT_EQ(code_of([&] { load_bundle(dir / "missing"); }), ErrorCode::IoError);
    fs::remove_all(dir.parent_path());
}

TEST(Io, ClassifierRoundTripPredictsIdentically) {
    ArchitectureParams p = ArchitectureParams::defaults();
    for (int k = 1; k <= 3; ++k) p.level(k).hp.forest.n_trees = 5;
    const ThreeLevelClassifier clf = train_architecture(bundle(), p, 4);
    const fs::path dir = scratch("model");
    save_classifier(dir, clf, "seed = 4\n");
    std::string config;
    const ThreeLevelClassifier back = load_classifier(dir, &config);
    EXPECT_EQ(config, "seed = 4\n");
    EXPECT_EQ(back.bundle_fingerprint, clf.bundle_fingerprint);
    for (int k = 1; k <= 3; ++k) {
        EXPECT_EQ(back.level(k).model, clf.level(k).model);
        EXPECT_EQ(back.level(k).scaler, clf.level(k).scaler);
        EXPECT_EQ(back.level(k).geometry, clf.level(k).geometry);
    }
    const auto a = classify_frame(clf, bundle().get("fdi1_dos_low").frame);
    const auto b = classify_frame(back, bundle().get("fdi1_dos_low").frame);
    ASSERT_EQ(a.decisions.size(), b.decisions.size());
    for (std::size_t i = 0; i < a.decisions.size(); ++i) {
        EXPECT_EQ(a.decisions[i].fused, b.decisions[i].fused);
        EXPECT_EQ(a.decisions[i].levels, b.decisions[i].levels);
    }
    write_text(dir / "manifest.json", "{\"format\": \"other\"}");
    EXPECT_EQ(code_of([&] { load_classifier(dir); }), ErrorCode::FormatError);
    EXPECT_EQ(code_of([&] { read_text(dir / "nope.txt"); }), ErrorCode::IoError);
    fs::remove_all(dir.parent_path());
}
