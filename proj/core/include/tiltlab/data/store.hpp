#pragma once

#include <filesystem>

#include "tiltlab/data/records.hpp"
#include "tiltlab/dsp/spectrogram.hpp"

namespace tiltlab::data {

/// On-disk layout: <root>/manifest.json, <root>/objects/objNN/recNNNNN/
/// holding meta.json + spec.bin (+ audio.wav), <root>/push/records.json.
std::string record_id_for(int object_id, int index);
std::filesystem::path record_dir(const std::filesystem::path& root, int object_id, int index);
std::filesystem::path record_dir(const std::filesystem::path& root, const std::string& record_id);

/// meta.json (schema 1) for one record directory.
void write_record_meta(const std::filesystem::path& dir, const InteractionRecord& record);
InteractionRecord read_record_meta(const std::filesystem::path& dir);

dsp::Spectrogram read_record_spectrogram(const std::filesystem::path& root, const std::string& record_id);

void write_push_records(const std::filesystem::path& root, const std::vector<PushRecord>& records);
std::vector<PushRecord> read_push_records(const std::filesystem::path& root);

}  // namespace tiltlab::data
