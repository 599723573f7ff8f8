#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tiltlab/nn/models.hpp"

namespace tiltlab::nn {

/// Checkpoint format: 7-byte magic "TBNET01", little-endian u32 JSON header
/// length, the UTF-8 JSON header (architecture, tensor names + shapes,
/// config, seed), then raw little-endian float32 parameter blobs in
/// declaration order.
void save_checkpoint(const std::filesystem::path& path, const std::string& arch,
                     const nlohmann::json& config,
                     const std::vector<std::pair<std::string, Tensor<Scalar>*>>& params);

struct CheckpointHeader {
    std::string arch;
    nlohmann::json config;
};

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path);

/// Loads blobs into the given parameter list; names and shapes must match
/// the header exactly.
CheckpointHeader load_checkpoint(const std::filesystem::path& path,
                                 const std::vector<std::pair<std::string, Tensor<Scalar>*>>& params);

}  // namespace tiltlab::nn
