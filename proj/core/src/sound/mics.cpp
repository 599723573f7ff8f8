#include "tiltlab/sound/mics.hpp"

namespace tiltlab::sound {

std::array<double, 4> mic_gains(const Vec2& position, const MicArray& mics) {
    std::array<double, 4> gains{};
    for (int m = 0; m < 4; ++m) {
        double dist = (mics.positions[m] - position).norm();
        gains[m] = mics.c / (dist + mics.d0);
    }
    return gains;
}

}  // namespace tiltlab::sound
