#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tiltlab/common.hpp"
#include "tiltlab/dsp/spectrogram.hpp"
#include "tiltlab/nn/adam.hpp"
#include "tiltlab/nn/layers.hpp"

namespace tiltlab::nn {

using Scalar = float;

constexpr long kEmbeddingDim = 128;
constexpr long kImageSide = 64;

/// Four stride-2 3x3 conv blocks (16/32/64/128 channels, rectified), global
/// average pool, and a linear projection to the 128-d embedding.
struct ConvEncoder {
    long in_channels = 0;
    Conv2d<Scalar> conv1, conv2, conv3, conv4;
    ReLU<Scalar> relu;
    GlobalAvgPool<Scalar> gap;
    Linear<Scalar> fc;

    struct Cache {
        Tensor<Scalar> z1, a1, z2, a2, z3, a3, z4, a4, pooled, embedding;
    };

    ConvEncoder() = default;
    ConvEncoder(long cin, Rng& rng);

    void forward(const Tensor<Scalar>& x, Cache& cache);
    /// Accumulates parameter gradients; input gradients are not propagated.
    void backward(const Tensor<Scalar>& x, Cache& cache, const Tensor<Scalar>& d_embedding);
    std::vector<Tensor<Scalar>*> params();
    std::vector<std::pair<std::string, Tensor<Scalar>*>> named_params(const std::string& prefix);
};

struct MultiTaskBatch {
    Tensor<Scalar> spec;          // [N,4,64,64], spectrogram values scaled to [-1,1]
    Tensor<Scalar> image;         // [N,1,64,64], companion image for the inverse head
    std::vector<int> labels;      // object ids
    std::vector<Scalar> actions;  // [N*2] in [-1,1]
};

struct MultiTaskLosses {
    double class_loss = 0.0;
    double inv_loss = 0.0;
    double total = 0.0;
};

/// The joint embedding network: audio encoder -> e_A with a classification
/// head, plus an image encoder whose features join e_A for the inverse
/// (action-regression) head. Total loss = (1-lambda)*class + lambda*inv.
struct MultiTaskNet {
    int num_classes = 60;
    ConvEncoder audio_enc;  // 4-channel spectrogram input
    ConvEncoder image_enc;  // 1-channel rendered image input
    Linear<Scalar> class_head;  // 128 -> num_classes
    Linear<Scalar> inv_hidden;  // 256 -> 64
    Linear<Scalar> inv_out;     // 64 -> 2
    ReLU<Scalar> relu;
    Tanh<Scalar> tanh;
    Concat<Scalar> concat;

    MultiTaskNet() = default;
    MultiTaskNet(int num_classes_, uint64_t seed);

    struct Predictions {
        Tensor<Scalar> logits;      // [N,num_classes]
        Tensor<Scalar> actions;     // [N,2] in [-1,1]
        Tensor<Scalar> embeddings;  // [N,128] e_A
    };

    Predictions predict(const MultiTaskBatch& batch);
    /// Forward + backward; lambda in [0,1]. Gradients accumulate into params.
    MultiTaskLosses forward_backward(const MultiTaskBatch& batch, double lambda);
    /// e_A for a spectrogram batch only (no image path).
    Tensor<Scalar> embed_batch(const Tensor<Scalar>& spec);

    std::vector<Tensor<Scalar>*> params();
    std::vector<std::pair<std::string, Tensor<Scalar>*>> named_params();
};

/// Image-only inverse baseline: pre- and post-interaction images encoded
/// separately, features concatenated into the regression head.
struct InverseImageNet {
    ConvEncoder enc_pre, enc_post;
    Linear<Scalar> hidden;  // 256 -> 64
    Linear<Scalar> out;     // 64 -> 2
    ReLU<Scalar> relu;
    Tanh<Scalar> tanh;
    Concat<Scalar> concat;

    InverseImageNet() = default;
    explicit InverseImageNet(uint64_t seed);

    Tensor<Scalar> predict(const Tensor<Scalar>& pre, const Tensor<Scalar>& post);
    double forward_backward(const Tensor<Scalar>& pre, const Tensor<Scalar>& post,
                            const std::vector<Scalar>& actions);
    std::vector<Tensor<Scalar>*> params();
    std::vector<std::pair<std::string, Tensor<Scalar>*>> named_params();
};

/// Forward dynamics head: [conditioning ⊕ pre-position ⊕ action] -> post
/// position in [0,1]^2 via a saturating output.
struct ForwardNet {
    long cond_dim = 0;
    long action_dim = 2;
    Linear<Scalar> l1, l2, l3;
    ReLU<Scalar> relu;
    Sigmoid<Scalar> sigmoid;

    ForwardNet() = default;
    ForwardNet(long cond_dim_, long action_dim_, uint64_t seed);

    long input_dim() const { return cond_dim + 2 + action_dim; }
    Tensor<Scalar> predict(const Tensor<Scalar>& x);
    /// Returns the training MSE; dx receives input gradients when non-null.
    double forward_backward(const Tensor<Scalar>& x, const std::vector<Scalar>& targets,
                            Tensor<Scalar>* dx = nullptr);
    std::vector<Tensor<Scalar>*> params();
    std::vector<std::pair<std::string, Tensor<Scalar>*>> named_params();
};

/// Forward model conditioned on a trainable image encoding of the probe
/// interaction's pre-image (the capacity-matched visual baseline).
struct ForwardVisualNet {
    ConvEncoder enc;  // 1-channel
    ForwardNet head;  // cond_dim = 128
    Concat<Scalar> concat;

    ForwardVisualNet() = default;
    ForwardVisualNet(long action_dim, uint64_t seed);

    Tensor<Scalar> predict(const Tensor<Scalar>& probe_image, const Tensor<Scalar>& state);
    double forward_backward(const Tensor<Scalar>& probe_image, const Tensor<Scalar>& state,
                            const std::vector<Scalar>& targets);
    std::vector<Tensor<Scalar>*> params();
    std::vector<std::pair<std::string, Tensor<Scalar>*>> named_params();
};

}  // namespace tiltlab::nn
