#pragma once

#include <filesystem>
#include <unordered_map>

#include <json.hpp>

#include "tiltlab/data/manifest.hpp"
#include "tiltlab/data/records.hpp"
#include "tiltlab/nn/checkpoint.hpp"
#include "tiltlab/nn/models.hpp"

namespace tiltlab::nn {

struct LoadedRecord {
    data::InteractionRecord meta;
    std::vector<float> spec;        // channel-major [4][64][64], scaled to [-1,1]
    std::vector<float> pre_image;   // [64*64]
    std::vector<float> post_image;  // [64*64]
    bool set_a = false;
    bool main_split = false;
    bool train = false;  // main && set A
};

struct LoadedDataset {
    std::filesystem::path root;
    data::Manifest manifest;
    std::vector<LoadedRecord> records;  // manifest order (sorted by record id)
    std::unordered_map<std::string, int> index_by_id;
    std::vector<data::PushRecord> pushes;

    int num_objects() const { return static_cast<int>(manifest.objects.size()); }
    const LoadedRecord& by_id(const std::string& record_id) const;
};

/// Read manifest, spectrograms, and push records; render pre/post images.
LoadedDataset load_dataset(const std::filesystem::path& root);

/// Channel-major CNN input (scaled by 1/5) from a stored spectrogram.
std::vector<float> spec_to_input(const dsp::Spectrogram& spec);

struct EmbedTrainConfig {
    uint64_t seed = 1;
    double lr = 1e-3;
    int batch_size = 64;
    int epochs = 30;
    double lambda = 0.1;
    std::string scope = "setA";  // "setA" (paper protocol) or "all" (60-object recipe)
    bool verbose = false;

    void validate() const;
    nlohmann::json to_json() const;
};

struct EmbedTrainResult {
    MultiTaskNet net;
    nlohmann::json history;        // one entry per epoch
    nlohmann::json final_metrics;  // last-epoch evaluation
};

/// Multi-task embedding training: total = (1-lambda)*class + lambda*inverse.
/// Deterministic for a fixed seed (single-threaded). Aborts on non-finite
/// loss. Under the setA scope no set-B record ever enters a batch.
EmbedTrainResult train_embedding(const LoadedDataset& data, const EmbedTrainConfig& cfg);

struct InverseTrainResult {
    InverseImageNet net;
    nlohmann::json history;
    nlohmann::json final_metrics;
};

/// Image-only inverse baseline (pre + post rendered frames -> action).
InverseTrainResult train_inverse_image(const LoadedDataset& data, const EmbedTrainConfig& cfg);

using EmbeddingTable = std::unordered_map<std::string, std::vector<float>>;

/// e_A for every record, keyed by record id.
EmbeddingTable extract_embeddings(MultiTaskNet& net, const LoadedDataset& data);
/// Embeddings from a freshly initialized (untrained) encoder.
EmbeddingTable random_embeddings(const LoadedDataset& data, int num_classes, uint64_t seed);

enum class ForwardCondition { Audio, Visual, Oracle, None };
enum class ForwardTask { Tray, Push };

const char* to_string(ForwardCondition c);
const char* to_string(ForwardTask t);

struct ForwardTrainConfig {
    uint64_t seed = 1;
    double lr = 1e-3;
    int batch_size = 64;
    int epochs = 30;
    ForwardTask task = ForwardTask::Tray;
    ForwardCondition condition = ForwardCondition::Audio;
    bool verbose = false;

    nlohmann::json to_json() const;
};

struct ForwardTrainResult {
    ForwardCondition condition;
    ForwardNet net;           // Audio / Oracle / None
    ForwardVisualNet visual;  // Visual
    nlohmann::json history;
    nlohmann::json final_metrics;  // l1/l2 on train-object holdout and test objects
};

/// Forward dynamics training. Records are conditioned on their probe
/// interaction (audio embedding / probe pre-image / oracle one-hot / none).
/// Throws if an Audio-conditioned record lacks a paired embedding.
ForwardTrainResult train_forward(const LoadedDataset& data, const EmbeddingTable* embeddings,
                                 const ForwardTrainConfig& cfg);

/// e_A of a single spectrogram.
std::vector<float> embed(MultiTaskNet& net, const dsp::Spectrogram& spec);

/// Inverse-head action prediction for one interaction; components in [-1,1].
Vec2 predict_action(MultiTaskNet& net, const dsp::Spectrogram& spec, const Image& pre_image);

}  // namespace tiltlab::nn
