#pragma once

#include <optional>
#include <string>

#include "tiltlab/common.hpp"
#include "tiltlab/sim/types.hpp"

namespace tiltlab::data {

/// One segmented interaction: an action phase of a simulated episode, its
/// audio clip (optional on disk), spectrogram, and tracked positions.
/// Positions are normalized to the [0,1]^2 tray frame.
struct InteractionRecord {
    std::string record_id;       // "obj07_rec00042"
    int object_id = 0;
    sim::SimAction action;
    Vec2 pre_position;           // normalized
    Vec2 post_position;          // normalized
    int impact_count = 0;
    std::optional<double> max_normal_speed;  // unknown for ingested records
    std::string probe_record_id; // a different interaction of the same object
    double peak_time = 0.0;      // contact peak, seconds from episode start
    int episode = 0;
    int action_index = 0;
    bool has_audio = false;      // audio.wav present next to meta.json
};

struct PushRecord {
    std::string record_id;       // "push00013"
    int object_id = 0;
    Vec2 p_start;                // meters, table frame
    Vec2 p_end;
    Vec2 pre_position;           // normalized
    Vec2 post_position;          // normalized
    std::string probe_record_id; // tray interaction supplying the embedding
    bool train = false;          // object belongs to the push training set
    std::string split = "main";  // per-record "main" (80%) or "holdout" (20%)
};

inline Vec2 normalize_position(const Vec2& pos, double side_length) {
    return {pos.x / side_length + 0.5, pos.y / side_length + 0.5};
}

inline Vec2 denormalize_position(const Vec2& pos, double side_length) {
    return {(pos.x - 0.5) * side_length, (pos.y - 0.5) * side_length};
}

}  // namespace tiltlab::data
