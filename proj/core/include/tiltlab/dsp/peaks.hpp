#pragma once

#include <vector>

#include "tiltlab/sound/synth.hpp"

namespace tiltlab::dsp {

/// Envelope frame length used by contact-peak detection (10 ms RMS windows).
constexpr double kEnvelopeWindow = 0.010;  // seconds

/// Short-window RMS envelope summed over channels: one value per
/// non-overlapping 10 ms frame.
std::vector<double> energy_envelope(const sound::AudioBuffer& audio);

struct PeakParams {
    double threshold = 6.0;       // multiple of the noise-floor estimate
    double min_separation = 0.25; // seconds
};

struct ContactPeak {
    double time = 0.0;      // envelope frame center, seconds from buffer start
    double strength = 0.0;  // envelope value
};

/// Contact peaks: local maxima of the energy envelope above
/// threshold × (median envelope), greedily thinned strongest-first to
/// min_separation. Returned in time order; silent input yields none.
std::vector<ContactPeak> detect_contact_peaks(const sound::AudioBuffer& audio,
                                              const PeakParams& params = {});

constexpr double kClipSeconds = 4.0;

/// Slice the 4-second interaction window centered on a contact peak. The
/// window start is aligned to the 10 ms envelope grid (the peak's envelope
/// frame lands exactly on the clip's center frame), so re-detection inside
/// the slice reproduces the same center. Out-of-range samples are zero.
sound::AudioBuffer extract_contact_clip(const sound::AudioBuffer& audio, double peak_time);

}  // namespace tiltlab::dsp
