#pragma once

#include <cstdint>
#include <vector>

namespace tiltlab::sound {

struct Mode {
    double frequency = 440.0;  // Hz, in [80, 5000]
    double damping = 10.0;     // 1/s, in [2, 60]
    double gain = 1.0;         // > 0
};

/// Per-object acoustic identity: a set of damped-sinusoid modes plus the
/// sensor noise floor. A pure function of (object_id, dataset_seed); see
/// profile_from_seed.
struct ModalProfile {
    int object_id = 0;
    std::vector<Mode> modes;    // 3..8 entries
    double noise_sigma = 0.002; // RMS of the sensor noise floor
};

/// Deterministic modal profile for an object. Acoustic parameters track the
/// object's physical parameters (same derivation as the simulator): heavier
/// objects ring lower, rougher objects damp faster, bouncier objects sound
/// brighter — with per-object jitter and random partial structure on top, so
/// distinct ids get distinct mode sets. All frequencies stay below the
/// 11025 Hz-stream Nyquist (5512.5 Hz).
ModalProfile profile_from_seed(int object_id, uint64_t dataset_seed);

}  // namespace tiltlab::sound
