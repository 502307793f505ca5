#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "geoaudit/baselines.hpp"
#include "geoaudit/capacity.hpp"
#include "geoaudit/dataprep.hpp"
#include "geoaudit/nncore.hpp"
#include "geoaudit/report_io.hpp"
#include "geoaudit/stresstest.hpp"

namespace geoaudit {

inline constexpr const char* kToolVersion = "0.1.0";

enum class SourceKind { Csv, Xor };

struct DataSource {
    SourceKind kind = SourceKind::Csv;
    std::filesystem::path path;  // Csv
    std::size_t xor_rows = 2000;
    double xor_leak_rate = 1.0;
    double xor_noise_std = 0.0;
};

// Everything one run depends on. Loaded from an INI-style file (see
// configs/*.ini); every field has a default.
struct ExperimentConfig {
    DataSource source;
    FeatureSchema schema = FeatureSchema::adult();
    std::vector<std::string> features = default_adult_features();
    double train_fraction = 0.8;

    TrainConfig probe = TrainConfig::probe_defaults();
    TrainConfig mlp = TrainConfig::mlp_defaults();
    std::size_t final_width = 32;

    SweepOptions sweep;
    double transition_delta = kDefaultTransitionDelta;

    bool stress_enabled = true;
    StressScenarios stress;

    double l1_lambda = 0.05;
    std::vector<std::string> protected_features = {"sex=Male", "relationship=Husband",
                                                   "marital-status=Married-civ-spouse"};
    bool jtt_enabled = true;
    JttConfig jtt;

    std::filesystem::path output_dir = "geoaudit-out";
    std::uint64_t seed = 0;

    // Throws Config errors for inconsistent settings.
    void validate() const;
    // Canonical key=value rendering; the config digest hashes this text.
    std::string canonical() const;
};

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view text);

enum class Stage { Ingest, Audit, Sweep, Stress, Baselines };

const char* to_string(Stage s);
std::vector<Stage> all_stages();
// Comma-separated stage names; "all" selects every stage.
std::set<Stage> parse_stages(std::string_view list);

struct IngestResult {
    DatasetMatrix train;
    DatasetMatrix test;
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
};

// Loads (or generates), splits and encodes the data. Test rows reuse the
// training standardization.
IngestResult ingest(const ExperimentConfig& config);

struct StageStatus {
    std::string name;
    std::string status;  // "ok" | "skipped"
    double seconds = 0.0;
};

struct RunManifest {
    std::string config_digest;
    std::vector<std::string> files;  // relative to the output directory, sorted
    std::vector<StageStatus> stages;
    std::string tool_version = kToolVersion;
};

// ingest -> audit -> prune -> capacity sweep -> final models + stress suite ->
// baselines. Ingest and the audit always run (later stages depend on them);
// `stages` decides which reports are written. Errors carry the failing stage
// in their message.
RunManifest run_pipeline(const ExperimentConfig& config, const std::set<Stage>& stages);

nlohmann::json to_json(const RunManifest& manifest);

} // namespace geoaudit
