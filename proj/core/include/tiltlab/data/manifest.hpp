#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tiltlab/sim/types.hpp"

namespace tiltlab::data {

struct ObjectEntry {
    sim::ObjectPhysics physics;
    int mode_count = 0;
    double fundamental_hz = 0.0;
    double mean_damping = 0.0;
    bool external = false;  // ingested data: physics beyond radius unknown
};

struct ManifestRecord {
    std::string record_id;
    int object_id = 0;
    std::string split = "main";  // "main" (80%) or "holdout" (20%)
    bool train = false;          // split == main AND object in set A
    std::string path;            // record directory, relative to the dataset root
};

struct Manifest {
    int schema = 1;
    uint64_t dataset_seed = 0;
    sim::TrayConfig tray;
    std::vector<ObjectEntry> objects;       // indexed by object_id
    std::vector<int> set_a;                 // sorted object ids
    std::vector<int> set_b;
    std::vector<ManifestRecord> records;    // sorted by record_id
    long rerolls = 0;                       // action windows resampled during generation
    std::vector<int> push_train_objects;
    std::vector<int> push_test_objects;

    bool in_set_a(int object_id) const;
    const ManifestRecord* find_record(const std::string& record_id) const;
};

/// Disjoint halves of 0..n_objects-1, seed-shuffled, each returned sorted.
std::pair<std::vector<int>, std::vector<int>> assign_object_sets(int n_objects, uint64_t seed);

/// Fill set_a/set_b and per-record splits: for every object, a seeded shuffle
/// of its sorted record ids marks the first 80% as "main"; `train` is main ∧
/// set A. Stable under on-disk record order and pure in (seed, record ids).
Manifest make_splits(Manifest manifest, uint64_t seed);

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace tiltlab::data
