#pragma once

#include <filesystem>
#include <vector>

namespace tiltlab::dsp {

constexpr int kSpecFrames = 64;    // time frames
constexpr int kSpecBins = 64;      // pooled frequency bins
constexpr int kSpecChannels = 4;   // mic order N,E,S,W
constexpr float kSpecFloor = -5.0f;
constexpr float kSpecCeil = 5.0f;

/// 64x64x4 log-magnitude audio image, values clipped to [-5,5].
/// Flat storage in time-major (frame, bin, channel) order.
struct Spectrogram {
    std::vector<float> data;

    Spectrogram() : data(static_cast<size_t>(kSpecFrames) * kSpecBins * kSpecChannels, kSpecFloor) {}

    static size_t index(int frame, int bin, int channel) {
        return (static_cast<size_t>(frame) * kSpecBins + bin) * kSpecChannels + channel;
    }
    float& at(int frame, int bin, int channel) { return data[index(frame, bin, channel)]; }
    float at(int frame, int bin, int channel) const { return data[index(frame, bin, channel)]; }

    bool in_range() const {
        for (float v : data)
            if (!(v >= kSpecFloor && v <= kSpecCeil)) return false;
        return true;
    }
};

/// Binary serialization: magic "TBSPEC01", three little-endian u32 dims
/// (64, 64, 4), then float32 values in (frame, bin, channel) order.
void write_spectrogram(const std::filesystem::path& path, const Spectrogram& spec);
Spectrogram read_spectrogram(const std::filesystem::path& path);

}  // namespace tiltlab::dsp
