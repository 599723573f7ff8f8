#include "tiltlab/sim/dynamics.hpp"

#include <cassert>
#include <cmath>

namespace tiltlab::sim {

double sliding_accel(double tilt_angle, double friction_mu, double gravity) {
    return std::max(0.0, gravity * (std::sin(tilt_angle) - friction_mu * std::cos(tilt_angle)));
}

namespace {

void slew_tilt(Vec2& tilt, const Vec2& target, double rate, double dt) {
    Vec2 delta = target - tilt;
    double dist = delta.norm();
    double max_move = rate * dt;
    if (dist <= max_move) {
        tilt = target;
    } else {
        tilt += delta * (max_move / dist);
    }
}

struct WallHit {
    Wall wall;
    double normal_speed;  // inward speed at contact
    Vec2 contact;
};

}  // namespace

std::optional<ImpactEvent> step(TrayState& tray_state,
                                ObjectState& object_state,
                                const SimAction& action,
                                const ObjectPhysics& object,
                                const TrayConfig& tray,
                                double dt,
                                double time) {
    assert(std::isfinite(object_state.position.x) && std::isfinite(object_state.position.y));
    assert(std::isfinite(object_state.velocity.x) && std::isfinite(object_state.velocity.y));

    Vec2 target{action.target_tilt.x * tray.max_tilt, action.target_tilt.y * tray.max_tilt};
    slew_tilt(tray_state.tilt, target, tray.tilt_slew_rate, dt);

    // Gravity projected onto the tray plane: steepest descent along the tilt
    // vector, slope angle = |tilt|.
    double theta = tray_state.tilt.norm();
    Vec2 downhill = tray_state.tilt.normalized();
    double g_par = tray.gravity * std::sin(theta);
    double g_norm = tray.gravity * std::cos(theta);

    Vec2& v = object_state.velocity;
    v += downhill * (g_par * dt);

    // Coulomb friction as an impulse clamped to the remaining speed. This
    // reproduces g*(sinθ − μcosθ) for straight slides and keeps the object
    // at rest when static friction dominates.
    double fric_dv = object.friction_mu * g_norm * dt;
    double speed = v.norm();
    if (speed <= fric_dv) {
        v = Vec2{};
    } else {
        v -= v * (fric_dv / speed);
    }
    if (v.norm() < kRestSpeed && g_par <= object.friction_mu * g_norm) {
        v = Vec2{};
    }

    object_state.position += v * dt;

    // Wall contacts, both axes. Position resolved to limit − e·penetration.
    double limit = tray.side_length / 2.0 - object.radius;
    double wall_coord = tray.side_length / 2.0;
    std::optional<WallHit> best;
    auto consider = [&](Wall wall, double vn, const Vec2& contact) {
        if (!best || vn > best->normal_speed) best = WallHit{wall, vn, contact};
    };

    // Per axis: inward speeds above the threshold bounce (restitution-scaled
    // reflection of velocity and of the penetration remainder) and emit an
    // event; slower contact rests against the wall, which keeps step energy
    // non-increasing during sustained contact.
    auto resolve_axis = [&](double& pos, double& vel, double sign, Wall wall, const Vec2& contact) {
        double pen = sign * pos - limit;
        if (pen <= 0.0) return;
        double vn = sign * vel;
        if (vn > kImpactThreshold) {
            pos = sign * (limit - object.restitution * pen);
            vel = -object.restitution * vel;
            consider(wall, vn, contact);
        } else {
            pos = sign * limit;
            if (vn > 0.0) vel = 0.0;
        }
    };

    Vec2& p = object_state.position;
    if (p.x > limit) {
        resolve_axis(p.x, v.x, 1.0, Wall::East, Vec2{wall_coord, p.y});
    } else if (p.x < -limit) {
        resolve_axis(p.x, v.x, -1.0, Wall::West, Vec2{-wall_coord, p.y});
    }
    if (p.y > limit) {
        resolve_axis(p.y, v.y, 1.0, Wall::North, Vec2{p.x, wall_coord});
    } else if (p.y < -limit) {
        resolve_axis(p.y, v.y, -1.0, Wall::South, Vec2{p.x, -wall_coord});
    }

    if (best) {
        ImpactEvent ev;
        ev.time = time + dt;
        ev.wall = best->wall;
        ev.normal_speed = best->normal_speed;
        ev.position = best->contact;
        return ev;
    }
    return std::nullopt;
}

EpisodeResult simulate_episode(const ObjectPhysics& object,
                               const std::vector<SimAction>& actions,
                               const TrayConfig& tray,
                               uint64_t /*seed*/,
                               const EpisodeParams& params) {
    tray.validate();
    object.validate(tray);
    if (actions.empty()) throw std::invalid_argument("simulate_episode: action list must be non-empty");
    for (const auto& a : actions) a.validate();

    TrayState tray_state{};
    ObjectState object_state{};  // center of the tray, at rest

    EpisodeResult out;
    const double dt = tray.sim_dt;
    const SimAction level{Vec2{0.0, 0.0}, 1.0};

    double time = 0.0;
    long next_sample = 0;
    auto sample_if_due = [&]() {
        while (next_sample * params.sample_stride <= time + dt * 0.5) {
            double t = next_sample * params.sample_stride;
            out.trajectory.positions.push_back({t, object_state.position});
            out.trajectory.tilts.push_back({t, tray_state.tilt});
            ++next_sample;
        }
    };
    sample_if_due();

    for (const auto& action : actions) {
        out.action_boundaries.push_back(time);
        long hold_steps = std::lround(action.hold_duration / dt);
        long settle_steps = std::lround(params.settle_duration / dt);
        for (long i = 0; i < hold_steps + settle_steps; ++i) {
            const SimAction& phase = (i < hold_steps) ? action : level;
            auto ev = step(tray_state, object_state, phase, object, tray, dt, time);
            time += dt;
            if (ev) out.impacts.push_back(*ev);
            sample_if_due();
        }
    }
    out.action_boundaries.push_back(time);
    out.duration = time;
    return out;
}

}  // namespace tiltlab::sim
