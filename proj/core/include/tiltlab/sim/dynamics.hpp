#pragma once

#include <optional>

#include "tiltlab/sim/types.hpp"

namespace tiltlab::sim {

/// Resting contact below this inward speed produces no ImpactEvent.
constexpr double kImpactThreshold = 0.02;  // m/s

/// Speeds below this are clamped to rest when static friction dominates.
constexpr double kRestSpeed = 1e-4;  // m/s

/// Acceleration of a disc sliding from rest down a plane tilted by
/// `tilt_angle`: max(0, g*(sin θ − μ cos θ)). Zero when static friction wins.
double sliding_accel(double tilt_angle, double friction_mu, double gravity);

/// Advance one time step. Slews tilt toward the action target, integrates the
/// slide (semi-implicit Euler, Coulomb friction), and resolves wall contacts
/// by reflecting the normal velocity scaled by restitution. Emits an
/// ImpactEvent when the inward normal speed at contact exceeds
/// kImpactThreshold; with simultaneous corner contact, the stronger wall wins.
std::optional<ImpactEvent> step(TrayState& tray_state,
                                ObjectState& object_state,
                                const SimAction& action,
                                const ObjectPhysics& object,
                                const TrayConfig& tray,
                                double dt,
                                double time);

struct EpisodeParams {
    double settle_duration = 0.65;   // level-return phase appended to each action
    double sample_stride = 0.010;    // trajectory sampling period, seconds
};

struct EpisodeResult {
    Trajectory trajectory;
    std::vector<ImpactEvent> impacts;       // time-ordered
    std::vector<double> action_boundaries;  // start time of each action phase + episode end
    double duration = 0.0;
};

/// Run a full episode: the object starts at rest in the tray center; each
/// action is held for its hold_duration, then the tray is driven back toward
/// level for settle_duration before the next action. Deterministic for fixed
/// inputs; `seed` is part of the contract but currently drives no dynamics
/// (reserved for actuation-noise models).
EpisodeResult simulate_episode(const ObjectPhysics& object,
                               const std::vector<SimAction>& actions,
                               const TrayConfig& tray,
                               uint64_t seed,
                               const EpisodeParams& params = {});

}  // namespace tiltlab::sim
