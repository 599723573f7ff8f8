#include "tiltlab/dsp/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tiltlab::dsp {

std::vector<double> energy_envelope(const sound::AudioBuffer& audio) {
    const size_t window = static_cast<size_t>(std::llround(kEnvelopeWindow * audio.sample_rate));
    const size_t n = audio.frames();
    const size_t frames = n / window;
    const size_t channels = audio.samples.size();
    std::vector<double> env(frames, 0.0);
    for (size_t k = 0; k < frames; ++k) {
        double sum = 0.0;
        for (size_t c = 0; c < channels; ++c) {
            const float* x = audio.samples[c].data() + k * window;
            for (size_t i = 0; i < window; ++i) sum += static_cast<double>(x[i]) * x[i];
        }
        env[k] = std::sqrt(sum / (static_cast<double>(window) * channels));
    }
    return env;
}

sound::AudioBuffer extract_contact_clip(const sound::AudioBuffer& audio, double peak_time) {
    const long window = std::llround(kEnvelopeWindow * audio.sample_rate);
    const long clip_frames = std::llround(kClipSeconds / kEnvelopeWindow);  // 400
    const long peak_frame = std::llround(peak_time / kEnvelopeWindow - 0.5);
    const long start = (peak_frame - clip_frames / 2) * window;
    const long len = clip_frames * window;
    const long n = static_cast<long>(audio.frames());

    sound::AudioBuffer clip;
    clip.sample_rate = audio.sample_rate;
    clip.channels = audio.channels;
    clip.start_time = static_cast<double>(start) / audio.sample_rate;
    clip.samples.assign(audio.samples.size(), std::vector<float>(len, 0.0f));
    for (size_t c = 0; c < audio.samples.size(); ++c) {
        for (long i = std::max(0L, -start); i < len; ++i) {
            long src = start + i;
            if (src >= n) break;
            clip.samples[c][i] = audio.samples[c][src];
        }
    }
    return clip;
}

std::vector<ContactPeak> detect_contact_peaks(const sound::AudioBuffer& audio,
                                              const PeakParams& params) {
    if (!(params.min_separation > 0.0))
        throw std::invalid_argument("detect_contact_peaks: min_separation must be > 0");
    std::vector<double> env = energy_envelope(audio);
    if (env.size() < 3) return {};

    std::vector<double> sorted = env;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    double floor = sorted[sorted.size() / 2];
    double cutoff = std::max(params.threshold * floor, 1e-7);

    struct Candidate {
        size_t frame;
        double value;
    };
    std::vector<Candidate> candidates;
    for (size_t k = 1; k + 1 < env.size(); ++k) {
        if (env[k] > cutoff && env[k] > env[k - 1] && env[k] >= env[k + 1])
            candidates.push_back({k, env[k]});
    }
    // Strongest first so greedy thinning keeps the dominant peak of a burst.
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.frame < b.frame;
    });

    std::vector<ContactPeak> accepted;
    for (const auto& c : candidates) {
        double t = (c.frame + 0.5) * kEnvelopeWindow;
        bool ok = true;
        for (const auto& a : accepted) {
            if (std::abs(a.time - t) < params.min_separation) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back({t, c.value});
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const ContactPeak& a, const ContactPeak& b) { return a.time < b.time; });
    return accepted;
}

}  // namespace tiltlab::dsp
