#pragma once

#include "tiltlab/common.hpp"
#include "tiltlab/sim/types.hpp"

namespace tiltlab::sim {

constexpr int kRenderSize = 64;

/// Top-down view: filled bright disc on a dark background, 64x64, values in
/// [0,1]. Pixel intensity is the 4x4-supersampled coverage fraction. Row 0 is
/// the +y (north) edge of the tray.
Image render_topdown(const Vec2& object_pos, double object_radius, const TrayConfig& tray);

/// Tray coordinates of a continuous pixel position (col, row).
Vec2 pixel_to_tray(double col, double row, const TrayConfig& tray);

}  // namespace tiltlab::sim
