#pragma once

#include <vector>

#include "tiltlab/dsp/spectrogram.hpp"
#include "tiltlab/sound/synth.hpp"

namespace tiltlab::dsp {

constexpr int kFftWindow = 510;
constexpr int kFftHop = 128;
constexpr int kFftBins = kFftWindow / 2 + 1;   // 256
constexpr int kStftSamples = 8192;             // featurized span per channel
constexpr double kLogFloorEps = 1e-5;

/// Windowed magnitude STFT of one channel: periodic Hann window of 510
/// samples, hop 128, frame t centered on sample t*128 via reflective padding
/// (numpy-style, edge excluded). Returns floor(len/128)+1 frames of 256
/// magnitudes each, computed in double precision. len must exceed the pad
/// (255 samples).
std::vector<std::vector<double>> stft_magnitudes(const std::vector<double>& samples);

/// The canonical 64x64x4 audio image of a 4-second clip at 11025 Hz:
/// per channel, magnitude STFT of the central 8192 samples (65 frames, first
/// 64 kept), frequency bins mean-pooled in groups of 4 (256 -> 64), then
/// ln(magnitude + 1e-5) clipped to [-5,5]. Channels stacked in mic order
/// N,E,S,W. Requires 4 channels at 11025 Hz with >= 8192 samples each.
Spectrogram stft_image(const sound::AudioBuffer& clip);

}  // namespace tiltlab::dsp
