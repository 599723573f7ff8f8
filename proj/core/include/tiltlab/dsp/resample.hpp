#pragma once

#include "tiltlab/sound/synth.hpp"

namespace tiltlab::dsp {

constexpr int kLowRate = 11025;

/// 4x decimation 44100 -> 11025 Hz behind a 63-tap zero-phase windowed-sinc
/// low-pass (cutoff 0.9 x new Nyquist, unity DC gain). Output length is
/// floor(N/4) per channel; other input rates are rejected.
sound::AudioBuffer resample_to_11k(const sound::AudioBuffer& audio);

}  // namespace tiltlab::dsp
