#include "tiltlab/dsp/track.hpp"

#include <cmath>
#include <stdexcept>

#include "tiltlab/sim/render.hpp"

namespace tiltlab::dsp {

std::vector<Vec2> track_object(const std::vector<Image>& frames,
                               const sim::TrayConfig& tray,
                               double threshold) {
    if (frames.empty()) return {};
    const Image& bg = frames[0];

    std::vector<Vec2> centroids;
    centroids.reserve(frames.size());
    Vec2 prev{0.0, 0.0};  // tray center until the object is first seen
    for (const Image& frame : frames) {
        if (frame.width != bg.width || frame.height != bg.height)
            throw std::invalid_argument("track_object: frame size mismatch");
        double wsum = 0.0, cx = 0.0, cy = 0.0;
        for (int row = 0; row < frame.height; ++row) {
            for (int col = 0; col < frame.width; ++col) {
                double d = std::abs(frame.at(row, col) - bg.at(row, col));
                if (d > threshold) {
                    wsum += d;
                    cx += d * (col + 0.5);
                    cy += d * (row + 0.5);
                }
            }
        }
        if (wsum > 0.0) prev = sim::pixel_to_tray(cx / wsum, cy / wsum, tray);
        centroids.push_back(prev);
    }
    return centroids;
}

}  // namespace tiltlab::dsp
