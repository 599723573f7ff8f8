#include "tiltlab/data/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "tiltlab/data/generate.hpp"
#include "tiltlab/data/store.hpp"
#include "tiltlab/dsp/peaks.hpp"
#include "tiltlab/dsp/resample.hpp"
#include "tiltlab/dsp/stft.hpp"
#include "tiltlab/rng.hpp"
#include "tiltlab/sound/wav.hpp"

namespace tiltlab::data {

namespace fs = std::filesystem;
using nlohmann::json;

IngestSummary ingest_external(const fs::path& metadata_path, const fs::path& out_root, bool force) {
    std::ifstream mf(metadata_path);
    if (!mf) throw std::runtime_error("ingest: cannot open metadata manifest " + metadata_path.string());
    json meta = json::parse(mf);

    if (fs::exists(out_root) && !fs::is_empty(out_root)) {
        if (!force)
            throw OutputExistsError("output directory not empty (use --force to overwrite): " +
                                    out_root.string());
        fs::remove_all(out_root);
    }
    fs::create_directories(out_root);

    uint64_t dataset_seed = meta.value("dataset_seed", 0ULL);
    const fs::path base = metadata_path.parent_path();

    std::map<int, double> radii;
    int max_object_id = -1;
    for (const auto& o : meta.at("objects")) {
        int id = o.at("id");
        radii[id] = o.value("radius", 0.02);
        max_object_id = std::max(max_object_id, id);
    }
    if (max_object_id < 0) throw std::runtime_error("ingest: metadata lists no objects");

    IngestSummary summary;
    Manifest manifest;
    manifest.dataset_seed = dataset_seed;
    manifest.tray = sim::TrayConfig{};
    manifest.objects.resize(max_object_id + 1);
    for (int id = 0; id <= max_object_id; ++id) {
        ObjectEntry e;
        e.physics.object_id = id;
        e.physics.radius = radii.count(id) ? radii[id] : 0.02;
        e.physics.mass = 0.0;
        e.physics.friction_mu = 0.0;
        e.physics.restitution = 0.0;
        e.external = true;
        manifest.objects[id] = e;
    }

    std::map<int, int> next_index;
    std::map<int, std::vector<std::string>> ids_by_object;
    for (const auto& clip_meta : meta.at("clips")) {
        std::string wav_rel;
        try {
            wav_rel = clip_meta.at("wav");
            int object_id = clip_meta.at("object_id");
            if (object_id < 0 || object_id > max_object_id)
                throw std::runtime_error("object_id not in the objects table");

            auto audio = sound::read_wav(base / wav_rel);
            if (audio.samples.size() != 4)
                throw std::runtime_error("expected 4 channels, got " + std::to_string(audio.samples.size()));
            if (audio.sample_rate != sound::kCaptureRate)
                throw std::runtime_error("expected 44100 Hz, got " + std::to_string(audio.sample_rate));

            auto peaks = dsp::detect_contact_peaks(audio);
            if (peaks.empty()) {
                std::cerr << "ingest: no contact peak in " << wav_rel << ", skipping\n";
                ++summary.skipped;
                continue;
            }
            // The defining contact of a per-interaction clip sits nearest the
            // midpoint; ties break toward the stronger peak.
            double mid = static_cast<double>(audio.frames()) / audio.sample_rate / 2.0;
            const dsp::ContactPeak* chosen = &peaks[0];
            for (const auto& pk : peaks) {
                double d = std::abs(pk.time - mid);
                double dc = std::abs(chosen->time - mid);
                if (d < dc || (d == dc && pk.strength > chosen->strength)) chosen = &pk;
            }

            auto clip = dsp::extract_contact_clip(audio, chosen->time);
            auto spec = dsp::stft_image(dsp::resample_to_11k(clip));

            int index = next_index[object_id]++;
            InteractionRecord rec;
            rec.record_id = record_id_for(object_id, index);
            rec.object_id = object_id;
            rec.action.target_tilt = {clip_meta.at("action")[0], clip_meta.at("action")[1]};
            rec.action.hold_duration = clip_meta.value("hold_duration", 2.0);
            rec.pre_position = {clip_meta.at("pre_position")[0], clip_meta.at("pre_position")[1]};
            rec.post_position = {clip_meta.at("post_position")[0], clip_meta.at("post_position")[1]};
            rec.impact_count = static_cast<int>(peaks.size());
            rec.max_normal_speed = std::nullopt;  // not observable from audio alone
            rec.peak_time = chosen->time;
            rec.episode = 0;
            rec.action_index = index;
            rec.has_audio = true;

            auto dir = record_dir(out_root, object_id, index);
            fs::create_directories(dir);
            dsp::write_spectrogram(dir / "spec.bin", spec);
            sound::write_wav(dir / "audio.wav", clip);
            write_record_meta(dir, rec);

            ManifestRecord mrec;
            mrec.record_id = rec.record_id;
            mrec.object_id = object_id;
            mrec.path = fs::relative(dir, out_root).generic_string();
            manifest.records.push_back(mrec);
            ids_by_object[object_id].push_back(rec.record_id);
            ++summary.ingested;
        } catch (const std::exception& e) {
            std::cerr << "ingest: skipping " << wav_rel << ": " << e.what() << "\n";
            ++summary.skipped;
        }
    }

    if (summary.ingested == 0)
        throw std::runtime_error("ingest: every clip failed (" + std::to_string(summary.skipped) +
                                 " skipped)");

    // Probe assignment among each object's ingested records.
    for (auto& [object_id, ids] : ids_by_object) {
        for (size_t i = 0; i < ids.size(); ++i) {
            auto dir = record_dir(out_root, ids[i]);
            auto rec = read_record_meta(dir);
            if (ids.size() > 1) {
                Rng rng(seed_combine(seed_combine(dataset_seed, "probe"),
                                     (static_cast<uint64_t>(object_id) << 20) ^ static_cast<uint64_t>(i)));
                size_t probe = rng.uniform_index(ids.size() - 1);
                if (probe >= i) ++probe;
                rec.probe_record_id = ids[probe];
            }
            write_record_meta(dir, rec);
        }
    }

    std::sort(manifest.records.begin(), manifest.records.end(),
              [](const ManifestRecord& a, const ManifestRecord& b) { return a.record_id < b.record_id; });
    manifest = make_splits(std::move(manifest), dataset_seed);
    write_push_records(out_root, {});
    write_manifest(out_root / "manifest.json", manifest);
    return summary;
}

}  // namespace tiltlab::data
