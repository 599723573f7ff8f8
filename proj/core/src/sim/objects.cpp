#include "tiltlab/sim/objects.hpp"

#include "tiltlab/rng.hpp"

namespace tiltlab::sim {

ObjectPhysics sample_object_physics(int object_id, uint64_t dataset_seed) {
    Rng rng(seed_combine(seed_combine(dataset_seed, "physics"), static_cast<uint64_t>(object_id)));
    ObjectPhysics phys;
    phys.object_id = object_id;
    phys.mass = rng.uniform(0.05, 0.5);
    // Upper bound stays below tan(max_tilt) so every object can slide.
    phys.friction_mu = rng.uniform(0.05, 0.35);
    phys.restitution = rng.uniform(0.2, 0.9);
    phys.radius = rng.uniform(0.015, 0.03);
    return phys;
}

}  // namespace tiltlab::sim
