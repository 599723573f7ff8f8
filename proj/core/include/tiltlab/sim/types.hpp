#pragma once

#include <cstdint>
#include <vector>

#include "tiltlab/common.hpp"

namespace tiltlab::sim {

/// Square tray with two independent tilt axes. tilt.x tips the +x edge down
/// (object accelerates toward +x), tilt.y likewise for +y.
struct TrayConfig {
    double side_length = 0.30;      // meters
    double gravity = 9.81;          // m/s^2
    double max_tilt = 0.5236;       // radians (~30 deg) per axis
    double tilt_slew_rate = 2.0;    // rad/s
    double sim_dt = 0.001;          // seconds

    void validate() const {
        if (!(side_length > 0.0)) throw std::invalid_argument("TrayConfig: side_length must be > 0");
        if (!(max_tilt > 0.0 && max_tilt < 1.5707963267948966))
            throw std::invalid_argument("TrayConfig: max_tilt must be in (0, pi/2)");
        if (!(sim_dt > 0.0)) throw std::invalid_argument("TrayConfig: sim_dt must be > 0");
        if (!(tilt_slew_rate > 0.0)) throw std::invalid_argument("TrayConfig: tilt_slew_rate must be > 0");
    }
};

struct ObjectPhysics {
    int object_id = 0;
    double mass = 0.1;         // kg
    double radius = 0.02;      // meters
    double friction_mu = 0.2;  // Coulomb friction coefficient
    double restitution = 0.5;  // normal-speed ratio at wall impacts

    void validate(const TrayConfig& tray) const {
        if (!(radius > 0.0 && radius < tray.side_length / 2.0))
            throw std::invalid_argument("ObjectPhysics: radius must be in (0, side/2)");
        if (!(restitution >= 0.0 && restitution <= 1.0))
            throw std::invalid_argument("ObjectPhysics: restitution must be in [0,1]");
        if (!(friction_mu >= 0.0)) throw std::invalid_argument("ObjectPhysics: friction_mu must be >= 0");
        if (!(mass > 0.0)) throw std::invalid_argument("ObjectPhysics: mass must be > 0");
    }
};

/// Tilt target normalized to [-1,1] per axis (scaled by TrayConfig::max_tilt).
struct SimAction {
    Vec2 target_tilt;           // components in [-1, 1]
    double hold_duration = 2.0; // seconds

    void validate() const {
        if (std::abs(target_tilt.x) > 1.0 || std::abs(target_tilt.y) > 1.0)
            throw std::invalid_argument("SimAction: target_tilt components must be in [-1,1]");
        if (!(hold_duration > 0.0)) throw std::invalid_argument("SimAction: hold_duration must be > 0");
    }
};

enum class Wall : int { North = 0, East = 1, South = 2, West = 3 };

struct ImpactEvent {
    double time = 0.0;          // seconds since episode start
    Wall wall = Wall::North;
    double normal_speed = 0.0;  // inward speed at contact, m/s
    Vec2 position;              // contact point on the wall, tray frame
};

struct TimedVec2 {
    double time = 0.0;
    Vec2 value;
};

struct Trajectory {
    std::vector<TimedVec2> positions;   // object center, fixed stride
    std::vector<TimedVec2> tilts;       // (tilt_x, tilt_y) radians, same stride
};

struct PushAction {
    Vec2 p_start;
    Vec2 p_end;

    void validate() const {
        if (p_start == p_end) throw std::invalid_argument("PushAction: p_start must differ from p_end");
    }
};

struct TrayState {
    Vec2 tilt;  // radians per axis
};

struct ObjectState {
    Vec2 position;  // tray frame, meters
    Vec2 velocity;  // m/s
};

}  // namespace tiltlab::sim
