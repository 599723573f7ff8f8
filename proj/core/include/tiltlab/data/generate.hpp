#pragma once

#include <cstdint>
#include <filesystem>

#include "tiltlab/data/manifest.hpp"
#include "tiltlab/sim/dynamics.hpp"

namespace tiltlab::data {

struct OutputExistsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenConfig {
    int num_objects = 60;
    int per_object = 100;           // interactions (records) per object
    int actions_per_episode = 10;   // records chained per episode before a reset
    double hold_duration = 2.0;
    double settle_duration = 0.65;  // tray returns toward level between actions
    double sample_stride = 0.010;
    sim::TrayConfig tray;

    double mic_c = 0.04;
    double mic_d0 = 0.05;
    double peak_threshold = 6.0;       // ingestion-side detection threshold
    double detect_margin = 1.25;       // generation requires this extra margin
    double peak_min_separation = 0.25;
    bool save_audio = false;
    int workers = 1;
    int max_attempts = 200;  // action re-rolls per window before giving up

    int push_objects_per_set = 10;
    int pushes_per_object = 50;
    double push_noise_sigma = 0.005;

    void validate() const;
};

struct GenSummary {
    int records = 0;
    int push_records = 0;
    long rerolls = 0;
};

/// Generate the full tray + push dataset under `root`. Deterministic in
/// (config, dataset_seed) regardless of worker count. Refuses to touch a
/// non-empty directory unless force is set (then it is wiped first).
/// Every record window is guaranteed a detected contact peak; windows
/// without one get their action resampled from derived seeds (counted in
/// the manifest as rerolls).
GenSummary generate_dataset(const std::filesystem::path& root,
                            const GenConfig& config,
                            uint64_t dataset_seed,
                            bool force = false);

}  // namespace tiltlab::data
