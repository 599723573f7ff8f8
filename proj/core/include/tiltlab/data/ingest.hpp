#pragma once

#include <cstdint>
#include <filesystem>

#include "tiltlab/data/manifest.hpp"

namespace tiltlab::data {

struct IngestSummary {
    int ingested = 0;
    int skipped = 0;  // malformed WAV, missing metadata fields, or no contact peak
};

/// Ingest externally recorded interactions described by a metadata manifest:
///
///   { "dataset_seed": 123,
///     "objects": [ {"id": 0, "radius": 0.02}, ... ],
///     "clips":   [ {"wav": "relative/path.wav", "object_id": 0,
///                   "action": [ax, ay], "hold_duration": 2.0,
///                   "pre_position": [x, y], "post_position": [x, y]}, ... ] }
///
/// WAVs must be 4-channel 44100 Hz (float32 or int16). Each clip yields one
/// record centered on the detected contact peak nearest the clip midpoint
/// (ties broken by strength). Malformed clips are reported and skipped;
/// throws if every clip fails.
IngestSummary ingest_external(const std::filesystem::path& metadata_path,
                              const std::filesystem::path& out_root,
                              bool force = false);

}  // namespace tiltlab::data
