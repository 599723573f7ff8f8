#include "tiltlab/data/generate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "tiltlab/data/store.hpp"
#include "tiltlab/dsp/peaks.hpp"
#include "tiltlab/dsp/resample.hpp"
#include "tiltlab/dsp/stft.hpp"
#include "tiltlab/rng.hpp"
#include "tiltlab/sim/objects.hpp"
#include "tiltlab/sim/push.hpp"
#include "tiltlab/sound/modal.hpp"
#include "tiltlab/sound/wav.hpp"

namespace tiltlab::data {

namespace fs = std::filesystem;

void GenConfig::validate() const {
    tray.validate();
    if (num_objects < 2) throw std::invalid_argument("GenConfig: need at least 2 objects");
    if (per_object < 2) throw std::invalid_argument("GenConfig: need at least 2 records per object");
    if (actions_per_episode < 1) throw std::invalid_argument("GenConfig: actions_per_episode must be >= 1");
    if (workers < 1) throw std::invalid_argument("GenConfig: workers must be >= 1");
    if (hold_duration <= 0 || settle_duration < 0) throw std::invalid_argument("GenConfig: bad durations");
    if (push_objects_per_set < 0 || pushes_per_object < 0) throw std::invalid_argument("GenConfig: bad push counts");
}

namespace {

struct WindowOutcome {
    sim::SimAction action;
    Vec2 pre_position;
    Vec2 post_position;
    int impact_count = 0;
    double max_normal_speed = 0.0;
    double peak_time = 0.0;
};

struct EpisodeOutcome {
    std::vector<WindowOutcome> windows;
    sound::AudioBuffer audio;
    long rerolls = 0;
};

sim::SimAction sample_action(uint64_t dataset_seed, int object_id, int episode, int window, int attempt,
                             double hold) {
    Rng rng(mix64(seed_combine(seed_combine(dataset_seed, "action"),
                               (static_cast<uint64_t>(object_id) << 40) ^
                                   (static_cast<uint64_t>(episode) << 24) ^
                                   (static_cast<uint64_t>(window) << 12) ^
                                   static_cast<uint64_t>(attempt))));
    sim::SimAction a;
    a.target_tilt = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    a.hold_duration = hold;
    return a;
}

/// Simulate + synthesize one episode, resampling actions of windows that
/// lack a confident contact peak until every window has one.
EpisodeOutcome run_episode(const GenConfig& cfg,
                           const sim::ObjectPhysics& physics,
                           const sound::ModalProfile& profile,
                           const sound::MicArray& mics,
                           uint64_t dataset_seed,
                           int episode,
                           int n_windows) {
    const double window_len = cfg.hold_duration + cfg.settle_duration;
    sim::EpisodeParams params;
    params.settle_duration = cfg.settle_duration;
    params.sample_stride = cfg.sample_stride;

    std::vector<int> attempts(n_windows, 0);
    EpisodeOutcome out;

    for (;;) {
        std::vector<sim::SimAction> actions(n_windows);
        for (int w = 0; w < n_windows; ++w)
            actions[w] = sample_action(dataset_seed, physics.object_id, episode, w, attempts[w],
                                       cfg.hold_duration);

        auto sim_result = sim::simulate_episode(physics, actions, cfg.tray, dataset_seed, params);

        auto window_of = [&](double t) { return std::min(n_windows - 1, static_cast<int>(t / window_len)); };

        // Cheap pre-check on raw impacts before paying for synthesis.
        std::vector<double> strongest_impact(n_windows, 0.0);
        for (const auto& imp : sim_result.impacts)
            strongest_impact[window_of(imp.time)] =
                std::max(strongest_impact[window_of(imp.time)], imp.normal_speed);

        std::vector<int> bad;
        for (int w = 0; w < n_windows; ++w)
            if (strongest_impact[w] < 2.0 * sim::kImpactThreshold) bad.push_back(w);

        if (bad.empty()) {
            double duration = sim_result.duration + dsp::kClipSeconds / 2.0;
            uint64_t audio_seed = seed_combine(seed_combine(dataset_seed, "audio"),
                                               (static_cast<uint64_t>(physics.object_id) << 20) ^
                                                   static_cast<uint64_t>(episode));
            auto audio = sound::synthesize(sim_result.impacts, profile, mics, duration, audio_seed);

            dsp::PeakParams strict;
            strict.threshold = cfg.peak_threshold * cfg.detect_margin;
            strict.min_separation = cfg.peak_min_separation;
            auto peaks = dsp::detect_contact_peaks(audio, strict);

            std::vector<const dsp::ContactPeak*> best(n_windows, nullptr);
            for (const auto& pk : peaks) {
                if (pk.time >= sim_result.duration) continue;
                int w = window_of(pk.time);
                if (!best[w] || pk.strength > best[w]->strength) best[w] = &pk;
            }
            for (int w = 0; w < n_windows; ++w)
                if (!best[w]) bad.push_back(w);

            if (bad.empty()) {
                out.windows.resize(n_windows);
                for (int w = 0; w < n_windows; ++w) {
                    auto& win = out.windows[w];
                    win.action = actions[w];
                    win.peak_time = best[w]->time;
                    double t0 = w * window_len;
                    double t1 = (w + 1) * window_len;
                    size_t i0 = static_cast<size_t>(std::llround(t0 / cfg.sample_stride));
                    size_t i1 = static_cast<size_t>(std::llround(t1 / cfg.sample_stride));
                    i1 = std::min(i1, sim_result.trajectory.positions.size() - 1);
                    win.pre_position =
                        normalize_position(sim_result.trajectory.positions[i0].value, cfg.tray.side_length);
                    win.post_position =
                        normalize_position(sim_result.trajectory.positions[i1].value, cfg.tray.side_length);
                    for (const auto& imp : sim_result.impacts) {
                        if (imp.time >= t0 && imp.time < t1) {
                            ++win.impact_count;
                            win.max_normal_speed = std::max(win.max_normal_speed, imp.normal_speed);
                        }
                    }
                }
                out.audio = std::move(audio);
                return out;
            }
        }

        for (int w : bad) {
            if (++attempts[w] > cfg.max_attempts)
                throw std::runtime_error("generate_dataset: window kept failing to produce a contact (object " +
                                         std::to_string(physics.object_id) + ", episode " +
                                         std::to_string(episode) + ")");
        }
        out.rerolls += static_cast<long>(bad.size());
    }
}

}  // namespace

GenSummary generate_dataset(const fs::path& root, const GenConfig& config, uint64_t dataset_seed, bool force) {
    config.validate();

    if (fs::exists(root) && !fs::is_empty(root)) {
        if (!force)
            throw OutputExistsError("output directory not empty (use --force to overwrite): " + root.string());
        fs::remove_all(root);
    }
    fs::create_directories(root);

    std::vector<ObjectEntry> objects(config.num_objects);
    std::vector<sound::ModalProfile> profiles(config.num_objects);
    for (int id = 0; id < config.num_objects; ++id) {
        auto physics = sim::sample_object_physics(id, dataset_seed);
        auto profile = sound::profile_from_seed(id, dataset_seed);
        ObjectEntry entry;
        entry.physics = physics;
        entry.mode_count = static_cast<int>(profile.modes.size());
        entry.fundamental_hz = profile.modes.front().frequency;
        double damping = 0.0;
        for (const auto& m : profile.modes) damping += m.damping;
        entry.mean_damping = damping / profile.modes.size();
        objects[id] = entry;
        profiles[id] = std::move(profile);
    }

    auto mics = sound::MicArray::for_tray(config.tray.side_length);
    mics.c = config.mic_c;
    mics.d0 = config.mic_d0;

    const int episodes = (config.per_object + config.actions_per_episode - 1) / config.actions_per_episode;
    std::atomic<long> total_rerolls{0};
    std::atomic<int> next_object{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&]() {
        try {
            for (;;) {
                int id = next_object.fetch_add(1);
                if (id >= config.num_objects) return;

                int written = 0;
                for (int ep = 0; ep < episodes && written < config.per_object; ++ep) {
                    int n_windows =
                        std::min(config.actions_per_episode, config.per_object - written);
                    auto outcome = run_episode(config, objects[id].physics, profiles[id], mics,
                                               dataset_seed, ep, n_windows);
                    total_rerolls += outcome.rerolls;

                    for (int w = 0; w < n_windows; ++w) {
                        const auto& win = outcome.windows[w];
                        int index = written + w;

                        auto clip = dsp::extract_contact_clip(outcome.audio, win.peak_time);
                        auto spec = dsp::stft_image(dsp::resample_to_11k(clip));

                        InteractionRecord rec;
                        rec.record_id = record_id_for(id, index);
                        rec.object_id = id;
                        rec.action = win.action;
                        rec.pre_position = win.pre_position;
                        rec.post_position = win.post_position;
                        rec.impact_count = win.impact_count;
                        rec.max_normal_speed = win.max_normal_speed;
                        rec.peak_time = win.peak_time;
                        rec.episode = ep;
                        rec.action_index = w;
                        rec.has_audio = config.save_audio;

                        Rng probe_rng(seed_combine(seed_combine(dataset_seed, "probe"),
                                                   (static_cast<uint64_t>(id) << 20) ^
                                                       static_cast<uint64_t>(index)));
                        int probe = static_cast<int>(probe_rng.uniform_index(config.per_object - 1));
                        if (probe >= index) ++probe;
                        rec.probe_record_id = record_id_for(id, probe);

                        auto dir = record_dir(root, id, index);
                        fs::create_directories(dir);
                        dsp::write_spectrogram(dir / "spec.bin", spec);
                        if (config.save_audio) sound::write_wav(dir / "audio.wav", clip);
                        write_record_meta(dir, rec);
                    }
                    written += n_windows;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };

    if (config.workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < config.workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    Manifest manifest;
    manifest.dataset_seed = dataset_seed;
    manifest.tray = config.tray;
    manifest.objects = objects;
    manifest.rerolls = total_rerolls.load();
    for (int id = 0; id < config.num_objects; ++id) {
        for (int index = 0; index < config.per_object; ++index) {
            ManifestRecord rec;
            rec.record_id = record_id_for(id, index);
            rec.object_id = id;
            rec.path = fs::relative(record_dir(root, id, index), root).generic_string();
            manifest.records.push_back(rec);
        }
    }
    std::sort(manifest.records.begin(), manifest.records.end(),
              [](const ManifestRecord& a, const ManifestRecord& b) { return a.record_id < b.record_id; });
    manifest = make_splits(std::move(manifest), dataset_seed);

    // Push dataset: first objects of each set (post-split), seeded pushes.
    std::vector<PushRecord> pushes;
    int per_set = std::min<int>(config.push_objects_per_set,
                                static_cast<int>(std::min(manifest.set_a.size(), manifest.set_b.size())));
    std::vector<int> push_objects;
    for (int i = 0; i < per_set; ++i) push_objects.push_back(manifest.set_a[i]);
    for (int i = 0; i < per_set; ++i) push_objects.push_back(manifest.set_b[i]);
    manifest.push_train_objects.assign(push_objects.begin(), push_objects.begin() + per_set);
    manifest.push_test_objects.assign(push_objects.begin() + per_set, push_objects.end());

    sim::PushParams push_params;
    push_params.table_side = config.tray.side_length;
    push_params.noise_sigma = config.push_noise_sigma;

    int push_index = 0;
    for (int oi = 0; oi < static_cast<int>(push_objects.size()); ++oi) {
        int id = push_objects[oi];
        const auto& physics = objects[id].physics;
        std::vector<int> order(config.pushes_per_object);
        for (int k = 0; k < config.pushes_per_object; ++k) order[k] = k;
        Rng split_rng(seed_combine(seed_combine(dataset_seed, "push_split"), static_cast<uint64_t>(id)));
        split_rng.shuffle(order);
        int n_main = (config.pushes_per_object * 8 + 5) / 10;
        std::vector<bool> is_main(config.pushes_per_object, false);
        for (int k = 0; k < n_main; ++k) is_main[order[k]] = true;
        for (int k = 0; k < config.pushes_per_object; ++k, ++push_index) {
            uint64_t s = seed_combine(seed_combine(dataset_seed, "pushgen"),
                                      (static_cast<uint64_t>(id) << 20) ^ static_cast<uint64_t>(k));
            Rng rng(s);
            Vec2 pos{rng.uniform(-0.09, 0.09), rng.uniform(-0.09, 0.09)};
            double phi = rng.uniform(0.0, 6.283185307179586);
            Vec2 u{std::cos(phi), std::sin(phi)};
            Vec2 q{-u.y, u.x};
            double offset = rng.uniform(-0.5, 0.5) * physics.radius;
            Vec2 start = pos - u * rng.uniform(0.06, 0.12) + q * offset;
            Vec2 end = pos + u * rng.uniform(0.01, 0.07) + q * offset;

            PushRecord rec;
            char buf[24];
            std::snprintf(buf, sizeof(buf), "push%05d", push_index);
            rec.record_id = buf;
            rec.object_id = id;
            rec.p_start = start;
            rec.p_end = end;
            rec.pre_position = normalize_position(pos, push_params.table_side);
            Vec2 post = sim::simulate_push(pos, {start, end}, physics, s, push_params);
            rec.post_position = normalize_position(post, push_params.table_side);
            rec.train = oi < per_set;
            rec.split = is_main[k] ? "main" : "holdout";

            Rng probe_rng(seed_combine(seed_combine(dataset_seed, "pushprobe"),
                                       (static_cast<uint64_t>(id) << 20) ^ static_cast<uint64_t>(k)));
            int probe = static_cast<int>(probe_rng.uniform_index(config.per_object));
            rec.probe_record_id = record_id_for(id, probe);
            pushes.push_back(rec);
        }
    }
    write_push_records(root, pushes);
    write_manifest(root / "manifest.json", manifest);

    GenSummary summary;
    summary.records = static_cast<int>(manifest.records.size());
    summary.push_records = static_cast<int>(pushes.size());
    summary.rerolls = manifest.rerolls;
    return summary;
}

}  // namespace tiltlab::data
