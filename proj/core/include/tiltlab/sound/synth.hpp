#pragma once

#include <cstdint>
#include <vector>

#include "tiltlab/sim/types.hpp"
#include "tiltlab/sound/mics.hpp"
#include "tiltlab/sound/modal.hpp"

namespace tiltlab::sound {

constexpr int kCaptureRate = 44100;

/// Multichannel audio clip. Samples are float32 in [-1,1] (soft-clipped).
struct AudioBuffer {
    int sample_rate = kCaptureRate;
    int channels = 4;
    double start_time = 0.0;                 // episode time of sample 0
    std::vector<std::vector<float>> samples; // [channel][frame]

    size_t frames() const { return samples.empty() ? 0 : samples[0].size(); }
};

struct SynthParams {
    bool noise = true;  // disable for analytic waveform tests
};

/// Modal synthesis of wall impacts. Channel m at time t (relative to the
/// buffer) sums, over impacts and modes,
///   g_m(impact.position) * gain * normal_speed * exp(-damping*(t-t0)) * sin(2*pi*f*(t-t0))
/// for t >= t0, plus Gaussian sensor noise of RMS profile.noise_sigma, then a
/// tanh limiter above |x| = 0.95. Impact times are quantized to the 44.1 kHz
/// sample grid; times must lie within [0, duration].
AudioBuffer synthesize(const std::vector<sim::ImpactEvent>& impacts,
                       const ModalProfile& profile,
                       const MicArray& mics,
                       double duration,
                       uint64_t seed,
                       const SynthParams& params = {});

/// Identity below |x| <= 0.95, tanh-shaped above, |result| <= 1.
float soft_clip(double x);

}  // namespace tiltlab::sound
