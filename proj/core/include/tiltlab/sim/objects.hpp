#pragma once

#include <cstdint>

#include "tiltlab/sim/types.hpp"

namespace tiltlab::sim {

/// Per-object physical parameters, drawn deterministically from
/// (object_id, dataset_seed). Ranges: mass 0.05−0.5 kg, μ 0.05−0.35,
/// restitution 0.2−0.9, radius 0.015−0.03 m.
ObjectPhysics sample_object_physics(int object_id, uint64_t dataset_seed);

}  // namespace tiltlab::sim
