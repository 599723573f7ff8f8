#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "tiltlab/sound/mics.hpp"
#include "tiltlab/sound/modal.hpp"
#include "tiltlab/sound/synth.hpp"
#include "tiltlab/sound/wav.hpp"

using namespace tiltlab;
using namespace tiltlab::sound;

namespace {

ModalProfile single_mode_profile(double freq, double damping, double gain) {
    ModalProfile p;
    p.object_id = 0;
    p.modes = {Mode{freq, damping, gain}};
    p.noise_sigma = 0.0;
    return p;
}

sim::ImpactEvent impact_at(double t, double speed, Vec2 pos = {0.0, 0.0}) {
    sim::ImpactEvent ev;
    ev.time = t;
    ev.wall = sim::Wall::East;
    ev.normal_speed = speed;
    ev.position = pos;
    return ev;
}

}  // namespace

TEST_CASE("profile_from_seed: deterministic, distinct, in range") {
    auto a = profile_from_seed(3, 42);
    auto b = profile_from_seed(3, 42);
    REQUIRE(a.modes.size() == b.modes.size());
    for (size_t i = 0; i < a.modes.size(); ++i) {
        CHECK(a.modes[i].frequency == b.modes[i].frequency);
        CHECK(a.modes[i].damping == b.modes[i].damping);
        CHECK(a.modes[i].gain == b.modes[i].gain);
    }

    auto other = profile_from_seed(4, 42);
    CHECK(a.modes[0].frequency != other.modes[0].frequency);

    for (int id = 0; id < 60; ++id) {
        auto p = profile_from_seed(id, 42);
        CHECK(p.modes.size() >= 3);
        CHECK(p.modes.size() <= 8);
        for (const auto& m : p.modes) {
            CHECK(m.frequency >= 80.0);
            CHECK(m.frequency < 5512.5);
            CHECK(m.damping >= 2.0);
            CHECK(m.damping <= 60.0);
            CHECK(m.gain > 0.0);
        }
    }
}

TEST_CASE("mic_gains: symmetry and nearest-wall dominance") {
    auto mics = MicArray::for_tray(0.30);

    auto center = mic_gains(Vec2{0, 0}, mics);
    CHECK(center[0] == doctest::Approx(center[1]).epsilon(1e-12));
    CHECK(center[1] == doctest::Approx(center[2]).epsilon(1e-12));
    CHECK(center[2] == doctest::Approx(center[3]).epsilon(1e-12));

    auto east = mic_gains(Vec2{0.15, 0.0}, mics);
    CHECK(east[1] > east[0]);
    CHECK(east[1] > east[2]);
    CHECK(east[1] > east[3]);

    // Frozen from c/(dist+d0) at (0.05, 0.03) with c=0.04, d0=0.05.
    auto off = mic_gains(Vec2{0.05, 0.03}, mics);
    CHECK(off[0] == doctest::Approx(0.22222222222222224).epsilon(1e-9));
    CHECK(off[1] == doctest::Approx(0.2590622147100262).epsilon(1e-9));
    CHECK(off[2] == doctest::Approx(0.16890792212678277).epsilon(1e-9));
    CHECK(off[3] == doctest::Approx(0.15858071266829876).epsilon(1e-9));
    for (double g : off) CHECK(g > 0.0);
}

TEST_CASE("synthesize: noise-only RMS matches the configured floor") {
    auto mics = MicArray::for_tray(0.30);
    ModalProfile p = single_mode_profile(440, 10, 1.0);
    p.noise_sigma = 0.002;
    auto audio = synthesize({}, p, mics, 1.0, 7);
    REQUIRE(audio.frames() == 44100);
    REQUIRE(audio.samples.size() == 4);
    CHECK(audio.sample_rate == 44100);
    for (const auto& ch : audio.samples) {
        double sum = 0.0;
        for (float v : ch) sum += static_cast<double>(v) * v;
        double rms = std::sqrt(sum / ch.size());
        CHECK(rms == doctest::Approx(0.002).epsilon(0.10));
    }
}

TEST_CASE("synthesize: matches the damped-sinusoid formula directly") {
    auto mics = MicArray::for_tray(0.30);
    auto p = single_mode_profile(700.0, 18.0, 0.8);
    SynthParams quiet{false};
    double v_n = 1.2;
    double t0 = 0.25;
    auto audio = synthesize({impact_at(t0, v_n, {0.03, -0.04})}, p, mics, 1.0, 0, quiet);

    auto gains = mic_gains(Vec2{0.03, -0.04}, mics);
    const int fs = 44100;
    const long i0 = std::lround(t0 * fs);
    for (int ch = 0; ch < 4; ++ch) {
        double amp = gains[ch] * p.modes[0].gain * v_n;
        for (long i = 0; i < static_cast<long>(audio.frames()); i += 97) {
            double expected = 0.0;
            if (i >= i0) {
                double tau = static_cast<double>(i - i0) / fs;
                expected = amp * std::exp(-18.0 * tau) *
                           std::sin(2.0 * 3.14159265358979323846 * 700.0 * tau);
            }
            CHECK(audio.samples[ch][i] == doctest::Approx(expected).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("synthesize: silence before the first impact, decay after") {
    auto mics = MicArray::for_tray(0.30);
    auto p = single_mode_profile(500.0, 12.0, 1.0);
    SynthParams quiet{false};
    auto audio = synthesize({impact_at(0.5, 1.0)}, p, mics, 2.0, 0, quiet);

    const int fs = 44100;
    const long i0 = std::lround(0.5 * fs);
    for (long i = 0; i < i0; ++i) CHECK(audio.samples[0][i] == 0.0f);

    auto window_peak = [&](double from, double len) {
        double peak = 0.0;
        for (long i = std::lround(from * fs); i < std::lround((from + len) * fs); ++i)
            peak = std::max(peak, std::abs(static_cast<double>(audio.samples[0][i])));
        return peak;
    };
    double early = window_peak(0.5, 0.05);
    double later = window_peak(1.0, 0.05);  // T = 0.5 s later
    REQUIRE(early > 0.0);
    CHECK(later / early == doctest::Approx(std::exp(-12.0 * 0.5)).epsilon(0.05));
}

TEST_CASE("synthesize: linear in normal speed below the limiter") {
    auto mics = MicArray::for_tray(0.30);
    auto p = single_mode_profile(900.0, 20.0, 0.5);
    SynthParams quiet{false};
    auto once = synthesize({impact_at(0.1, 0.4)}, p, mics, 0.5, 0, quiet);
    auto twice = synthesize({impact_at(0.1, 0.8)}, p, mics, 0.5, 0, quiet);
    for (int ch = 0; ch < 4; ++ch)
        for (size_t i = 0; i < once.frames(); i += 211)
            CHECK(twice.samples[ch][i] == doctest::Approx(2.0 * once.samples[ch][i]).epsilon(1e-5));
}

TEST_CASE("synthesize: rejects impacts outside the buffer") {
    auto mics = MicArray::for_tray(0.30);
    auto p = single_mode_profile(500.0, 12.0, 1.0);
    CHECK_THROWS_AS(synthesize({impact_at(3.0, 1.0)}, p, mics, 2.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(synthesize({impact_at(-0.1, 1.0)}, p, mics, 2.0, 0), std::invalid_argument);
}

TEST_CASE("soft_clip: identity below 0.95, bounded above") {
    CHECK(soft_clip(0.5) == 0.5f);
    CHECK(soft_clip(-0.9) == -0.9f);
    CHECK(std::abs(soft_clip(3.0)) <= 1.0f);
    CHECK(std::abs(soft_clip(-50.0)) <= 1.0f);
    CHECK(soft_clip(1.2) > 0.95f);
}

TEST_CASE("synthesize: deterministic under a fixed seed") {
    auto mics = MicArray::for_tray(0.30);
    auto p = profile_from_seed(5, 11);
    auto a = synthesize({impact_at(0.2, 1.0)}, p, mics, 0.5, 33);
    auto b = synthesize({impact_at(0.2, 1.0)}, p, mics, 0.5, 33);
    for (int ch = 0; ch < 4; ++ch) CHECK(a.samples[ch] == b.samples[ch]);
}

TEST_CASE("spectral centroids differ across object ids") {
    auto mics = MicArray::for_tray(0.30);
    SynthParams quiet{false};
    std::vector<double> centroids;
    for (int id = 0; id < 10; ++id) {
        auto p = profile_from_seed(id, 42);
        p.noise_sigma = 0.0;
        auto audio = synthesize({impact_at(0.05, 1.0)}, p, mics, 0.6, 0, quiet);
        // Power-spectrum centroid estimated by direct projection onto a
        // coarse frequency grid.
        const auto& x = audio.samples[0];
        double num = 0.0, den = 0.0;
        for (double f = 100.0; f <= 5200.0; f += 50.0) {
            double re = 0.0, im = 0.0;
            for (size_t i = 0; i < x.size(); i += 2) {
                double ph = 2.0 * 3.14159265358979 * f * i / 44100.0;
                re += x[i] * std::cos(ph);
                im -= x[i] * std::sin(ph);
            }
            double power = re * re + im * im;
            num += f * power;
            den += power;
        }
        REQUIRE(den > 0.0);
        centroids.push_back(num / den);
    }
    for (size_t i = 0; i < centroids.size(); ++i)
        for (size_t j = i + 1; j < centroids.size(); ++j)
            CHECK(std::abs(centroids[i] - centroids[j]) > 1.0);
}

TEST_CASE("wav: float32 round-trip is bit exact") {
    auto mics = MicArray::for_tray(0.30);
    auto p = profile_from_seed(2, 9);
    auto audio = synthesize({impact_at(0.1, 1.0)}, p, mics, 0.3, 21);

    auto path = std::filesystem::temp_directory_path() / "tiltlab_test.wav";
    write_wav(path, audio);
    auto back = read_wav(path);
    CHECK(back.sample_rate == 44100);
    REQUIRE(back.samples.size() == 4);
    for (int ch = 0; ch < 4; ++ch) CHECK(back.samples[ch] == audio.samples[ch]);
    std::filesystem::remove(path);
}

TEST_CASE("wav: int16 input is accepted and scaled") {
    auto path = std::filesystem::temp_directory_path() / "tiltlab_i16.wav";
    {
        std::ofstream f(path, std::ios::binary);
        auto w32 = [&](uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
        auto w16 = [&](uint16_t v) { f.write(reinterpret_cast<const char*>(&v), 2); };
        f.write("RIFF", 4);
        w32(36 + 8);
        f.write("WAVE", 4);
        f.write("fmt ", 4);
        w32(16);
        w16(1);
        w16(2);
        w32(44100);
        w32(44100 * 2 * 2);
        w16(4);
        w16(16);
        f.write("data", 4);
        w32(8);
        int16_t frames[4] = {16384, -16384, 0, 32767};
        f.write(reinterpret_cast<const char*>(frames), 8);
    }
    auto audio = read_wav(path);
    CHECK(audio.samples.size() == 2);
    REQUIRE(audio.frames() == 2);
    CHECK(audio.samples[0][0] == doctest::Approx(0.5));
    CHECK(audio.samples[1][0] == doctest::Approx(-0.5));
    std::filesystem::remove(path);
}

TEST_CASE("wav: rejects malformed files") {
    auto path = std::filesystem::temp_directory_path() / "tiltlab_bad.wav";
    {
        std::ofstream f(path, std::ios::binary);
        f << "not a wav file at all";
    }
    CHECK_THROWS_AS(read_wav(path), std::runtime_error);
    std::filesystem::remove(path);
}
