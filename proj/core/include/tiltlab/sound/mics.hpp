#pragma once

#include <array>

#include "tiltlab/common.hpp"

namespace tiltlab::sound {

/// Four contact microphones at the wall midpoints, channel order N,E,S,W.
/// Coupling gain for an excitation at position p: c / (dist(mic, p) + d0).
struct MicArray {
    std::array<Vec2, 4> positions;  // N, E, S, W
    double c = 0.04;
    double d0 = 0.05;

    static MicArray for_tray(double side_length) {
        double h = side_length / 2.0;
        MicArray m;
        m.positions = {Vec2{0.0, h}, Vec2{h, 0.0}, Vec2{0.0, -h}, Vec2{-h, 0.0}};
        return m;
    }
};

/// Per-channel coupling gains for an excitation at `position`. All positive;
/// the nearest wall's mic receives the largest gain.
std::array<double, 4> mic_gains(const Vec2& position, const MicArray& mics);

}  // namespace tiltlab::sound
