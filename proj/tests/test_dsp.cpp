#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "tiltlab/dsp/peaks.hpp"
#include "tiltlab/dsp/resample.hpp"
#include "tiltlab/dsp/spectrogram.hpp"
#include "tiltlab/dsp/stft.hpp"
#include "tiltlab/dsp/track.hpp"
#include "tiltlab/rng.hpp"
#include "tiltlab/sim/render.hpp"
#include "tiltlab/sound/modal.hpp"
#include "tiltlab/sound/synth.hpp"

using namespace tiltlab;
using namespace tiltlab::dsp;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

// Naive O(N^2) DFT oracle for the windowed magnitude spectra. Re-implements
// the contract (periodic Hann 510, hop 128, numpy-style reflection) by direct
// summation, independent of the FFT code path.
std::vector<std::vector<double>> naive_stft(const std::vector<double>& x) {
    const long n = static_cast<long>(x.size());
    const int frames = static_cast<int>(n / kFftHop) + 1;
    auto reflect = [n](long i) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
        return i;
    };
    std::vector<double> win(kFftWindow);
    for (int i = 0; i < kFftWindow; ++i) win[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / kFftWindow);

    std::vector<std::vector<double>> mags(frames, std::vector<double>(kFftBins));
    for (int t = 0; t < frames; ++t) {
        long center = static_cast<long>(t) * kFftHop;
        std::vector<double> seg(kFftWindow);
        for (int i = 0; i < kFftWindow; ++i) seg[i] = x[reflect(center - 255 + i)] * win[i];
        for (int k = 0; k < kFftBins; ++k) {
            double re = 0.0, im = 0.0;
            for (int i = 0; i < kFftWindow; ++i) {
                double ph = 2.0 * kPi * k * i / kFftWindow;
                re += seg[i] * std::cos(ph);
                im -= seg[i] * std::sin(ph);
            }
            mags[t][k] = std::hypot(re, im);
        }
    }
    return mags;
}

sound::AudioBuffer low_rate_buffer(size_t frames) {
    sound::AudioBuffer buf;
    buf.sample_rate = kLowRate;
    buf.channels = 4;
    buf.samples.assign(4, std::vector<float>(frames, 0.0f));
    return buf;
}

double total_mag(const Spectrogram& s, int frame, int channel) {
    double sum = 0.0;
    for (int f = 0; f < kSpecBins; ++f) sum += s.at(frame, f, channel);
    return sum;
}

}  // namespace

TEST_CASE("stft_magnitudes matches the naive DFT oracle") {
    Rng rng(314);
    for (int trial = 0; trial < 4; ++trial) {
        size_t len = 512 + rng.uniform_index(1600);
        std::vector<double> x(len);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        auto fast = stft_magnitudes(x);
        auto slow = naive_stft(x);
        REQUIRE(fast.size() == slow.size());
        double max_err = 0.0;
        for (size_t t = 0; t < fast.size(); ++t)
            for (int k = 0; k < kFftBins; ++k)
                max_err = std::max(max_err, std::abs(fast[t][k] - slow[t][k]));
        CHECK(max_err < 1e-6);
    }
}

TEST_CASE("stft_image: all-zero clip hits the log floor everywhere") {
    auto clip = low_rate_buffer(44100);
    auto spec = stft_image(clip);
    for (float v : spec.data) CHECK(v == kSpecFloor);
}

TEST_CASE("stft_image: impulse at clip center concentrates in the central frame") {
    auto clip = low_rate_buffer(44100);
    size_t start = (44100 - kStftSamples) / 2;
    for (int c = 0; c < 4; ++c) clip.samples[c][start + 4096] = 1.0f;
    auto spec = stft_image(clip);
    CHECK(spec.in_range());
    int best = 0;
    double best_v = -1e9;
    for (int t = 0; t < kSpecFrames; ++t) {
        double v = total_mag(spec, t, 0);
        if (v > best_v) {
            best_v = v;
            best = t;
        }
    }
    CHECK(best == 4096 / kFftHop);  // frame 32
}

TEST_CASE("stft_image: 1 kHz tone pools into bin 11") {
    auto clip = low_rate_buffer(44100);
    for (int c = 0; c < 4; ++c)
        for (size_t i = 0; i < clip.samples[c].size(); ++i)
            clip.samples[c][i] = static_cast<float>(0.5 * std::sin(2.0 * kPi * 1000.0 * i / kLowRate));
    auto spec = stft_image(clip);
    int best = 0;
    float best_v = -1e9f;
    for (int f = 0; f < kSpecBins; ++f) {
        float v = spec.at(32, f, 0);
        if (v > best_v) {
            best_v = v;
            best = f;
        }
    }
    CHECK(best == 11);  // raw bin 1000/(11025/510) = 46.3, /4 -> 11
}

TEST_CASE("stft_image: shifting an impulse shifts the peak column") {
    auto base_frame = [&](int shift_frames) {
        auto clip = low_rate_buffer(44100);
        size_t start = (44100 - kStftSamples) / 2;
        size_t pos = start + 4096 + static_cast<size_t>(shift_frames) * kFftHop;
        for (int c = 0; c < 4; ++c) clip.samples[c][pos] = 1.0f;
        auto spec = stft_image(clip);
        int best = 0;
        double best_v = -1e9;
        for (int t = 0; t < kSpecFrames; ++t) {
            double v = total_mag(spec, t, 0);
            if (v > best_v) {
                best_v = v;
                best = t;
            }
        }
        return best;
    };
    int center = base_frame(0);
    CHECK(base_frame(1) == center + 1);
    CHECK(base_frame(-3) == center - 3);
}

TEST_CASE("stft_image: permuting channels permutes planes") {
    Rng rng(5);
    auto clip = low_rate_buffer(44100);
    for (int c = 0; c < 4; ++c)
        for (auto& v : clip.samples[c]) v = static_cast<float>(0.1 * rng.uniform(-1, 1));

    auto swapped = clip;
    std::swap(swapped.samples[0], swapped.samples[2]);

    auto a = stft_image(clip);
    auto b = stft_image(swapped);
    for (int t = 0; t < kSpecFrames; t += 7)
        for (int f = 0; f < kSpecBins; f += 5) {
            CHECK(a.at(t, f, 0) == b.at(t, f, 2));
            CHECK(a.at(t, f, 2) == b.at(t, f, 0));
            CHECK(a.at(t, f, 1) == b.at(t, f, 1));
        }
}

TEST_CASE("stft_image: input validation") {
    auto clip = low_rate_buffer(44100);
    clip.sample_rate = 44100;
    CHECK_THROWS_AS(stft_image(clip), std::invalid_argument);

    auto short_clip = low_rate_buffer(4000);
    CHECK_THROWS_AS(stft_image(short_clip), std::invalid_argument);

    auto two_ch = low_rate_buffer(44100);
    two_ch.samples.resize(2);
    CHECK_THROWS_AS(stft_image(two_ch), std::invalid_argument);
}

TEST_CASE("resample_to_11k: DC passes at unity gain") {
    sound::AudioBuffer buf;
    buf.samples.assign(1, std::vector<float>(44100, 0.25f));
    auto out = resample_to_11k(buf);
    CHECK(out.sample_rate == kLowRate);
    REQUIRE(out.frames() == 44100 / 4);
    for (size_t i = 16; i + 16 < out.frames(); i += 101)
        CHECK(out.samples[0][i] == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("resample_to_11k: 1 kHz passes, 10 kHz is rejected") {
    auto make_tone = [](double freq) {
        sound::AudioBuffer buf;
        buf.samples.assign(1, std::vector<float>(44100));
        for (size_t i = 0; i < 44100; ++i)
            buf.samples[0][i] = static_cast<float>(std::sin(2.0 * kPi * freq * i / 44100.0));
        return buf;
    };
    auto rms = [](const std::vector<float>& x, size_t skip) {
        double sum = 0.0;
        size_t n = 0;
        for (size_t i = skip; i + skip < x.size(); ++i, ++n) sum += static_cast<double>(x[i]) * x[i];
        return std::sqrt(sum / n);
    };

    auto pass = resample_to_11k(make_tone(1000.0));
    CHECK(rms(pass.samples[0], 32) * std::sqrt(2.0) == doctest::Approx(1.0).epsilon(0.05));

    auto stop = resample_to_11k(make_tone(10000.0));
    CHECK(rms(stop.samples[0], 32) < 0.1 * (1.0 / std::sqrt(2.0)));
}

TEST_CASE("resample_to_11k: rejects non-44100 input") {
    sound::AudioBuffer buf;
    buf.sample_rate = 22050;
    buf.samples.assign(1, std::vector<float>(1000, 0.0f));
    CHECK_THROWS_AS(resample_to_11k(buf), std::invalid_argument);
}

TEST_CASE("detect_contact_peaks: silent and noise-only buffers yield none") {
    auto silent = low_rate_buffer(22050);
    silent.sample_rate = 44100;
    CHECK(detect_contact_peaks(silent).empty());

    Rng rng(8);
    auto noisy = low_rate_buffer(2 * 44100);
    noisy.sample_rate = 44100;
    for (auto& ch : noisy.samples)
        for (auto& v : ch) v = static_cast<float>(0.002 * rng.gaussian());
    CHECK(detect_contact_peaks(noisy).empty());
}

TEST_CASE("detect_contact_peaks: single impact located within 10 ms") {
    auto mics = sound::MicArray::for_tray(0.30);
    auto profile = sound::profile_from_seed(1, 77);
    sim::ImpactEvent ev;
    ev.time = 1.0;
    ev.normal_speed = 1.0;
    ev.position = {0.14, 0.0};
    auto audio = sound::synthesize({ev}, profile, mics, 3.0, 4);
    auto peaks = detect_contact_peaks(audio);
    REQUIRE(peaks.size() == 1);
    CHECK(std::abs(peaks[0].time - 1.0) <= 0.010);
}

TEST_CASE("detect_contact_peaks: close pair thinned by min_separation") {
    auto mics = sound::MicArray::for_tray(0.30);
    auto profile = sound::profile_from_seed(1, 77);
    sim::ImpactEvent a, b;
    a.time = 1.0;
    a.normal_speed = 1.0;
    a.position = {0.14, 0.0};
    b = a;
    b.time = 1.1;
    auto audio = sound::synthesize({a, b}, profile, mics, 3.0, 4);

    PeakParams wide;
    wide.min_separation = 0.5;
    CHECK(detect_contact_peaks(audio, wide).size() == 1);
}

TEST_CASE("detect_contact_peaks: well-separated impacts each detected once within 25 ms") {
    auto mics = sound::MicArray::for_tray(0.30);
    auto profile = sound::profile_from_seed(3, 77);
    std::vector<sim::ImpactEvent> impacts;
    std::vector<double> times = {0.8, 1.6, 2.5};
    std::vector<double> speeds = {0.5, 1.8, 0.9};
    for (size_t i = 0; i < times.size(); ++i) {
        sim::ImpactEvent ev;
        ev.time = times[i];
        ev.normal_speed = speeds[i];
        ev.position = {0.0, 0.14};
        impacts.push_back(ev);
    }
    auto audio = sound::synthesize(impacts, profile, mics, 4.0, 9);
    auto peaks = detect_contact_peaks(audio);
    REQUIRE(peaks.size() == times.size());
    for (size_t i = 0; i < times.size(); ++i) CHECK(std::abs(peaks[i].time - times[i]) <= 0.025);
}

TEST_CASE("spectrogram file round-trip") {
    Rng rng(12);
    Spectrogram spec;
    for (auto& v : spec.data) v = static_cast<float>(rng.uniform(-5.0, 5.0));
    auto path = std::filesystem::temp_directory_path() / "tiltlab_spec.bin";
    write_spectrogram(path, spec);
    auto back = read_spectrogram(path);
    CHECK(back.data == spec.data);
    std::filesystem::remove(path);

    auto bad = std::filesystem::temp_directory_path() / "tiltlab_spec_bad.bin";
    {
        std::ofstream f(bad, std::ios::binary);
        f << "XXXXXXXXgarbage";
    }
    CHECK_THROWS_AS(read_spectrogram(bad), std::runtime_error);
    std::filesystem::remove(bad);
}

TEST_CASE("track_object: background-only frames carry the centroid forward") {
    sim::TrayConfig tray;
    auto bg = sim::render_topdown(Vec2{0, 0}, 0.0, tray);  // empty tray
    std::vector<Image> frames = {bg, bg, bg};
    auto centroids = track_object(frames, tray);
    REQUIRE(centroids.size() == 3);
    for (const auto& c : centroids) {
        CHECK(c.x == doctest::Approx(0.0));
        CHECK(c.y == doctest::Approx(0.0));
    }
}

TEST_CASE("track_object: rendered disc centroid within one pixel") {
    sim::TrayConfig tray;
    double pixel = tray.side_length / sim::kRenderSize;
    Image bg(sim::kRenderSize, sim::kRenderSize);
    Vec2 truth{0.063, -0.041};
    std::vector<Image> frames = {bg, sim::render_topdown(truth, 0.02, tray)};
    auto centroids = track_object(frames, tray);
    REQUIRE(centroids.size() == 2);
    CHECK(std::abs(centroids[1].x - truth.x) < pixel);
    CHECK(std::abs(centroids[1].y - truth.y) < pixel);
}

TEST_CASE("track_object: linear motion gives monotone centroids") {
    sim::TrayConfig tray;
    Image bg(sim::kRenderSize, sim::kRenderSize);
    std::vector<Image> frames = {bg};
    for (int i = 0; i < 10; ++i)
        frames.push_back(sim::render_topdown(Vec2{-0.1 + 0.02 * i, 0.0}, 0.02, tray));
    auto centroids = track_object(frames, tray);
    for (size_t i = 2; i < centroids.size(); ++i) CHECK(centroids[i].x > centroids[i - 1].x);
}
