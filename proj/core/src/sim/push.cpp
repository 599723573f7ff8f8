#include "tiltlab/sim/push.hpp"

#include "tiltlab/rng.hpp"

namespace tiltlab::sim {

Vec2 simulate_push(const Vec2& object_pos,
                   const PushAction& push,
                   const ObjectPhysics& object,
                   uint64_t seed,
                   const PushParams& params) {
    push.validate();
    Vec2 u = (push.p_end - push.p_start).normalized();
    Vec2 rel = object_pos - push.p_start;
    double along = rel.dot(u);
    double perp = std::abs(rel.x * u.y - rel.y * u.x);
    // Miss: line too far from the center, or object behind the start point.
    if (perp > object.radius || along < -object.radius) return object_pos;

    Vec2 ideal_end = push.p_end + u * object.radius;
    double disp = std::max(0.0, (ideal_end - object_pos).dot(u));
    double slip = 1.0 / (1.0 + 2.0 * object.friction_mu + 4.0 * object.mass);
    Vec2 end = object_pos + u * (disp * slip);

    if (params.noise_sigma > 0.0) {
        Rng rng(seed_combine(seed, "push"));
        end.x += params.noise_sigma * rng.gaussian();
        end.y += params.noise_sigma * rng.gaussian();
    }

    double limit = params.table_side / 2.0 - object.radius;
    end.x = clamp(end.x, -limit, limit);
    end.y = clamp(end.y, -limit, limit);
    return end;
}

}  // namespace tiltlab::sim
