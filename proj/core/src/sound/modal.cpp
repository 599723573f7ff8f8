#include "tiltlab/sound/modal.hpp"

#include <cmath>

#include "tiltlab/rng.hpp"
#include "tiltlab/sim/objects.hpp"

namespace tiltlab::sound {

ModalProfile profile_from_seed(int object_id, uint64_t dataset_seed) {
    auto phys = sim::sample_object_physics(object_id, dataset_seed);
    Rng rng(seed_combine(seed_combine(dataset_seed, "modal"), static_cast<uint64_t>(object_id)));

    double mass_t = (phys.mass - 0.05) / 0.45;
    double mu_t = (phys.friction_mu - 0.05) / 0.30;
    double rest_t = (phys.restitution - 0.2) / 0.7;

    // Fundamental falls with mass (log-spaced), damping rises with friction,
    // brightness rises with restitution. Jitter keeps ids identifiable.
    double f0 = std::exp(lerp(std::log(1400.0), std::log(160.0), mass_t)) *
                std::exp(rng.uniform(-0.12, 0.12));
    double damp_scale = lerp(4.0, 40.0, mu_t) * std::exp(rng.uniform(-0.2, 0.2));
    double bright = lerp(0.5, 1.1, rest_t);

    ModalProfile profile;
    profile.object_id = object_id;
    profile.noise_sigma = 0.002;

    int n_modes = rng.uniform_int(3, 8);
    for (int k = 0; k < n_modes; ++k) {
        Mode m;
        if (k == 0) {
            m.frequency = f0;
        } else {
            double max_ratio = std::min(6.0, 5000.0 / f0);
            m.frequency = f0 * rng.uniform(1.3, max_ratio);
        }
        m.frequency = clamp(m.frequency, 80.0, 5000.0);
        m.damping = clamp(damp_scale * rng.uniform(0.7, 1.4), 2.0, 60.0);
        m.gain = bright * rng.uniform(0.5, 1.0) / (1.0 + 0.7 * k);
        profile.modes.push_back(m);
    }
    return profile;
}

}  // namespace tiltlab::sound
