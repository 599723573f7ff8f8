#include "tiltlab/sim/render.hpp"

namespace tiltlab::sim {

Vec2 pixel_to_tray(double col, double row, const TrayConfig& tray) {
    double L = tray.side_length;
    return {(col / kRenderSize - 0.5) * L, (0.5 - row / kRenderSize) * L};
}

Image render_topdown(const Vec2& object_pos, double object_radius, const TrayConfig& tray) {
    Image img(kRenderSize, kRenderSize);
    double L = tray.side_length;
    // Disc center and radius in continuous pixel coordinates.
    double cx = (object_pos.x / L + 0.5) * kRenderSize;
    double cy = (0.5 - object_pos.y / L) * kRenderSize;
    double r = object_radius / L * kRenderSize;
    double r2 = r * r;

    int lo_row = std::max(0, static_cast<int>(std::floor(cy - r - 1)));
    int hi_row = std::min(kRenderSize - 1, static_cast<int>(std::ceil(cy + r + 1)));
    int lo_col = std::max(0, static_cast<int>(std::floor(cx - r - 1)));
    int hi_col = std::min(kRenderSize - 1, static_cast<int>(std::ceil(cx + r + 1)));

    for (int row = lo_row; row <= hi_row; ++row) {
        for (int col = lo_col; col <= hi_col; ++col) {
            int inside = 0;
            for (int sy = 0; sy < 4; ++sy) {
                for (int sx = 0; sx < 4; ++sx) {
                    double px = col + (sx + 0.5) / 4.0;
                    double py = row + (sy + 0.5) / 4.0;
                    double dx = px - cx;
                    double dy = py - cy;
                    if (dx * dx + dy * dy <= r2) ++inside;
                }
            }
            img.at(row, col) = static_cast<float>(inside) / 16.0f;
        }
    }
    return img;
}

}  // namespace tiltlab::sim
