#include "tiltlab/dsp/resample.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace tiltlab::dsp {

namespace {

constexpr int kTaps = 63;
constexpr int kHalf = kTaps / 2;
constexpr double kPi = 3.14159265358979323846264338328;

std::array<double, kTaps> make_lowpass() {
    // Windowed sinc at cutoff 0.9 * (11025/2), Hamming window, sum-normalized.
    std::array<double, kTaps> h{};
    const double fc = 0.9 * (static_cast<double>(kLowRate) / 2.0) / sound::kCaptureRate;  // cycles/sample
    double sum = 0.0;
    for (int k = 0; k < kTaps; ++k) {
        int m = k - kHalf;
        double sinc = (m == 0) ? 2.0 * fc : std::sin(2.0 * kPi * fc * m) / (kPi * m);
        double w = 0.54 - 0.46 * std::cos(2.0 * kPi * k / (kTaps - 1));
        h[k] = sinc * w;
        sum += h[k];
    }
    for (double& v : h) v /= sum;
    return h;
}

}  // namespace

sound::AudioBuffer resample_to_11k(const sound::AudioBuffer& audio) {
    if (audio.sample_rate != sound::kCaptureRate)
        throw std::invalid_argument("resample_to_11k: input must be 44100 Hz");
    static const std::array<double, kTaps> h = make_lowpass();

    const size_t n = audio.frames();
    const size_t out_n = n / 4;
    sound::AudioBuffer out;
    out.sample_rate = kLowRate;
    out.channels = audio.channels;
    out.start_time = audio.start_time;
    out.samples.assign(audio.samples.size(), std::vector<float>(out_n, 0.0f));

    for (size_t c = 0; c < audio.samples.size(); ++c) {
        const auto& x = audio.samples[c];
        auto& y = out.samples[c];
        for (size_t j = 0; j < out_n; ++j) {
            long center = static_cast<long>(4 * j);
            double acc = 0.0;
            for (int k = 0; k < kTaps; ++k) {
                long idx = center + (k - kHalf);
                if (idx >= 0 && idx < static_cast<long>(n)) acc += h[k] * x[idx];
            }
            y[j] = static_cast<float>(acc);
        }
    }
    return out;
}

}  // namespace tiltlab::dsp
