#include "tiltlab/dsp/stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "tiltlab/dsp/resample.hpp"

namespace tiltlab::dsp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kPad = kFftWindow / 2;  // 255

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

// FFTW plan creation is not thread-safe; execution on the plan's own buffers
// is serialized per thread by thread_local ownership.
class FftR2C {
public:
    FftR2C() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        in_ = fftw_alloc_real(kFftWindow);
        out_ = fftw_alloc_complex(kFftBins);
        plan_ = fftw_plan_dft_r2c_1d(kFftWindow, in_, out_, FFTW_ESTIMATE);
    }
    ~FftR2C() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    FftR2C(const FftR2C&) = delete;
    FftR2C& operator=(const FftR2C&) = delete;

    void magnitudes(const double* windowed, double* mags) {
        for (int i = 0; i < kFftWindow; ++i) in_[i] = windowed[i];
        fftw_execute(plan_);
        for (int b = 0; b < kFftBins; ++b)
            mags[b] = std::hypot(out_[b][0], out_[b][1]);
    }

private:
    double* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

const std::vector<double>& hann_window() {
    static const std::vector<double> w = [] {
        std::vector<double> v(kFftWindow);
        for (int n = 0; n < kFftWindow; ++n)
            v[n] = 0.5 - 0.5 * std::cos(kTwoPi * n / kFftWindow);  // periodic Hann
        return v;
    }();
    return w;
}

// numpy-style reflection (edge sample excluded).
inline long reflect_index(long i, long n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
    return i;
}

}  // namespace

std::vector<std::vector<double>> stft_magnitudes(const std::vector<double>& samples) {
    const long n = static_cast<long>(samples.size());
    if (n <= kPad) throw std::invalid_argument("stft_magnitudes: need more than 255 samples");

    thread_local FftR2C fft;
    const auto& win = hann_window();

    const int frames = static_cast<int>(n / kFftHop) + 1;
    std::vector<std::vector<double>> mags(frames, std::vector<double>(kFftBins));
    std::vector<double> frame(kFftWindow);
    for (int t = 0; t < frames; ++t) {
        long center = static_cast<long>(t) * kFftHop;
        for (int i = 0; i < kFftWindow; ++i) {
            long idx = reflect_index(center - kPad + i, n);
            frame[i] = samples[idx] * win[i];
        }
        fft.magnitudes(frame.data(), mags[t].data());
    }
    return mags;
}

Spectrogram stft_image(const sound::AudioBuffer& clip) {
    if (clip.sample_rate != kLowRate)
        throw std::invalid_argument("stft_image: clip must be at 11025 Hz");
    if (clip.samples.size() != kSpecChannels)
        throw std::invalid_argument("stft_image: clip must have 4 channels");
    const size_t len = clip.frames();
    if (len < kStftSamples)
        throw std::invalid_argument("stft_image: need >= 8192 samples per channel");

    const size_t start = (len - kStftSamples) / 2;
    Spectrogram spec;
    std::vector<double> x(kStftSamples);
    for (int c = 0; c < kSpecChannels; ++c) {
        const auto& ch = clip.samples[c];
        for (int i = 0; i < kStftSamples; ++i) x[i] = ch[start + i];
        auto mags = stft_magnitudes(x);  // 65 frames x 256 bins; frame 64 dropped
        for (int t = 0; t < kSpecFrames; ++t) {
            for (int f = 0; f < kSpecBins; ++f) {
                double pooled = 0.25 * (mags[t][4 * f] + mags[t][4 * f + 1] +
                                        mags[t][4 * f + 2] + mags[t][4 * f + 3]);
                double v = std::log(pooled + kLogFloorEps);
                spec.at(t, f, c) = clampf(static_cast<float>(v), kSpecFloor, kSpecCeil);
            }
        }
    }
    return spec;
}

}  // namespace tiltlab::dsp
