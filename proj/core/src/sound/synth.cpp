#include "tiltlab/sound/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "tiltlab/rng.hpp"

namespace tiltlab::sound {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

float soft_clip(double x) {
    double ax = std::abs(x);
    if (ax <= 0.95) return static_cast<float>(x);
    double y = 0.95 + 0.05 * std::tanh((ax - 0.95) / 0.05);
    return static_cast<float>(x < 0 ? -y : y);
}

AudioBuffer synthesize(const std::vector<sim::ImpactEvent>& impacts,
                       const ModalProfile& profile,
                       const MicArray& mics,
                       double duration,
                       uint64_t seed,
                       const SynthParams& params) {
    if (profile.modes.empty()) throw std::invalid_argument("synthesize: modal profile has no modes");
    const int fs = kCaptureRate;
    const size_t n = static_cast<size_t>(std::llround(duration * fs));

    struct Excitation {
        size_t sample;
        std::array<double, 4> amp;  // per-channel, before mode gain
    };
    std::vector<Excitation> excitations;
    excitations.reserve(impacts.size());
    for (const auto& imp : impacts) {
        if (imp.time < 0.0 || imp.time > duration)
            throw std::invalid_argument("synthesize: impact time outside [0, duration]");
        Excitation e;
        e.sample = std::min(n == 0 ? 0 : n - 1, static_cast<size_t>(std::llround(imp.time * fs)));
        auto gains = mic_gains(imp.position, mics);
        for (int m = 0; m < 4; ++m) e.amp[m] = gains[m] * imp.normal_speed;
        excitations.push_back(e);
    }
    std::sort(excitations.begin(), excitations.end(),
              [](const Excitation& a, const Excitation& b) { return a.sample < b.sample; });

    AudioBuffer out;
    out.sample_rate = fs;
    out.channels = 4;
    out.samples.assign(4, std::vector<float>(n, 0.0f));

    std::vector<double> acc(n);
    for (int ch = 0; ch < 4; ++ch) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const Mode& mode : profile.modes) {
            // One damped resonator per (channel, mode): complex phasor
            // recursion; Im(z) is exactly the damped sinusoid.
            const std::complex<double> rot =
                std::exp(std::complex<double>(-mode.damping / fs, kTwoPi * mode.frequency / fs));
            std::complex<double> z = 0.0;
            size_t next = 0;
            for (size_t i = 0; i < n; ++i) {
                while (next < excitations.size() && excitations[next].sample == i) {
                    z += excitations[next].amp[ch] * mode.gain;
                    ++next;
                }
                acc[i] += z.imag();
                z *= rot;
            }
        }
        if (params.noise && profile.noise_sigma > 0.0) {
            Rng rng(seed_combine(seed_combine(seed, "noise"), static_cast<uint64_t>(ch)));
            for (size_t i = 0; i < n; ++i) acc[i] += profile.noise_sigma * rng.gaussian();
        }
        auto& dst = out.samples[ch];
        for (size_t i = 0; i < n; ++i) dst[i] = soft_clip(acc[i]);
    }
    return out;
}

}  // namespace tiltlab::sound
