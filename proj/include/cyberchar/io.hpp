#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cyberchar/architecture.hpp"

namespace cyberchar {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path);
/// Writes through a temporary file and renames it into place.
void write_text(const fs::path& path, std::string_view text);

/// Wide CSV of one stream: `t,<signal names>,state_trip,state_cause,state_fdi,state_dos,mode`.
/// Empty cells are nulls.
std::string frame_csv(const TelemetryFrame& frame, const SignalCatalog& catalog, Stream stream);
/// Parses one stream into `frame`, checking the header against the catalog.
void parse_frame_csv(std::string_view text, const SignalCatalog& catalog, Stream stream, TelemetryFrame& frame,
                     const std::string& source = "csv");

/// `stream,row,col,kind,original` rows.
std::string mask_csv(const std::vector<MaskEntry>& mask);
std::vector<MaskEntry> parse_mask_csv(std::string_view text, const std::string& source = "mask");

std::string catalog_json(const SignalCatalog& catalog);
SignalCatalog parse_catalog_json(std::string_view text);

struct ManifestEntry {
    std::string id;
    ScenarioState state;
    std::uint64_t seed = 0;
    std::string description;
    std::size_t ot_points = 0;  // timesteps x OT signals
    std::size_t it_points = 0;  // IT samples x IT signals
    std::string ot_file;
    std::string it_file;
    std::string mask_file;
};

struct DatasetManifest {
    std::uint64_t bundle_seed = 0;
    std::string created;
    std::string catalog_file;
    std::vector<ManifestEntry> datasets;
};

std::string manifest_json(const DatasetManifest& m);
DatasetManifest parse_manifest_json(std::string_view text);

/// Writes every dataset (OT, IT and mask CSVs), the catalog and manifest.json.
DatasetManifest save_bundle(const fs::path& dir, const UseCaseBundle& bundle, const std::string& created);
/// Loads a bundle directory and checks point counts against the manifest.
UseCaseBundle load_bundle(const fs::path& dir);

std::string scaler_text(const ScalerParams& s);
ScalerParams parse_scaler_text(std::string_view text);

/// Model directory: level{1,2,3}.model, level{1,2,3}.scaler and manifest.json.
void save_classifier(const fs::path& dir, const ThreeLevelClassifier& clf, const std::string& config_text);
ThreeLevelClassifier load_classifier(const fs::path& dir, std::string* config_text = nullptr);

}  // namespace cyberchar
