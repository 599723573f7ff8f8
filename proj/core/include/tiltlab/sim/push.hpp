#pragma once

#include <cstdint>

#include "tiltlab/sim/types.hpp"

namespace tiltlab::sim {

struct PushParams {
    double table_side = 0.30;   // square table, same frame convention as the tray
    double noise_sigma = 0.0;   // m; Gaussian noise on the end position (0 = exact formula)
};

/// Quasi-static planar push. The pusher travels p_start → p_end; contact
/// requires the push line to pass within `radius` of the object center with
/// the object ahead of p_start. Displacement along the push direction:
///
///   ideal_end = p_end + radius * u          (center when the rim rests at the pusher tip)
///   disp      = max(0, (ideal_end - pos) · u) * slip
///   slip      = 1 / (1 + 2*friction_mu + 4*mass)
///
/// so lower friction or mass moves strictly further. End position is clamped
/// to the table bounds. With noise_sigma > 0 a seeded Gaussian offset is
/// added before clamping. Misses return the input position unchanged.
Vec2 simulate_push(const Vec2& object_pos,
                   const PushAction& push,
                   const ObjectPhysics& object,
                   uint64_t seed,
                   const PushParams& params = {});

}  // namespace tiltlab::sim
