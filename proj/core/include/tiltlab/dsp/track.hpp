#pragma once

#include <vector>

#include "tiltlab/common.hpp"
#include "tiltlab/sim/types.hpp"

namespace tiltlab::dsp {

/// Background-subtraction tracking over rendered top-down frames. The first
/// frame is the empty-tray background; per frame, the |diff|-weighted centroid
/// of pixels above the threshold is returned in tray coordinates. Frames with
/// no foreground carry the previous centroid forward (initially the tray
/// center).
std::vector<Vec2> track_object(const std::vector<Image>& frames,
                               const sim::TrayConfig& tray,
                               double threshold = 0.08);

}  // namespace tiltlab::dsp
