#include "tiltlab/nn/models.hpp"

namespace tiltlab::nn {

ConvEncoder::ConvEncoder(long cin, Rng& rng) : in_channels(cin) {
    conv1 = Conv2d<Scalar>(cin, 16, 2, rng);
    conv2 = Conv2d<Scalar>(16, 32, 2, rng);
    conv3 = Conv2d<Scalar>(32, 64, 2, rng);
    conv4 = Conv2d<Scalar>(64, 128, 2, rng);
    fc = Linear<Scalar>(128, kEmbeddingDim, rng);
}

void ConvEncoder::forward(const Tensor<Scalar>& x, Cache& c) {
    conv1.forward(x, c.z1);
    relu.forward(c.z1, c.a1);
    conv2.forward(c.a1, c.z2);
    relu.forward(c.z2, c.a2);
    conv3.forward(c.a2, c.z3);
    relu.forward(c.z3, c.a3);
    conv4.forward(c.a3, c.z4);
    relu.forward(c.z4, c.a4);
    gap.forward(c.a4, c.pooled);
    fc.forward(c.pooled, c.embedding);
}

void ConvEncoder::backward(const Tensor<Scalar>& x, Cache& c, const Tensor<Scalar>& d_embedding) {
    Tensor<Scalar> d_pooled, d_a4, d_z4, d_a3, d_z3, d_a2, d_z2, d_a1, d_z1;
    fc.backward(c.pooled, d_embedding, &d_pooled);
    gap.backward(c.a4, d_pooled, d_a4);
    relu.backward(c.a4, d_a4, d_z4);
    conv4.backward(c.a3, d_z4, &d_a3);
    relu.backward(c.a3, d_a3, d_z3);
    conv3.backward(c.a2, d_z3, &d_a2);
    relu.backward(c.a2, d_a2, d_z2);
    conv2.backward(c.a1, d_z2, &d_a1);
    relu.backward(c.a1, d_a1, d_z1);
    conv1.backward(x, d_z1, nullptr);
}

std::vector<Tensor<Scalar>*> ConvEncoder::params() {
    return {&conv1.weight, &conv1.bias, &conv2.weight, &conv2.bias, &conv3.weight, &conv3.bias,
            &conv4.weight, &conv4.bias, &fc.weight,    &fc.bias};
}

std::vector<std::pair<std::string, Tensor<Scalar>*>> ConvEncoder::named_params(const std::string& prefix) {
    return {{prefix + ".conv1.weight", &conv1.weight}, {prefix + ".conv1.bias", &conv1.bias},
            {prefix + ".conv2.weight", &conv2.weight}, {prefix + ".conv2.bias", &conv2.bias},
            {prefix + ".conv3.weight", &conv3.weight}, {prefix + ".conv3.bias", &conv3.bias},
            {prefix + ".conv4.weight", &conv4.weight}, {prefix + ".conv4.bias", &conv4.bias},
            {prefix + ".fc.weight", &fc.weight},       {prefix + ".fc.bias", &fc.bias}};
}

MultiTaskNet::MultiTaskNet(int num_classes_, uint64_t seed) : num_classes(num_classes_) {
    Rng rng(seed_combine(seed, "multitask"));
    audio_enc = ConvEncoder(4, rng);
    image_enc = ConvEncoder(1, rng);
    class_head = Linear<Scalar>(kEmbeddingDim, num_classes, rng);
    inv_hidden = Linear<Scalar>(2 * kEmbeddingDim, 64, rng);
    inv_out = Linear<Scalar>(64, 2, rng);
}

MultiTaskNet::Predictions MultiTaskNet::predict(const MultiTaskBatch& batch) {
    ConvEncoder::Cache ca, ci;
    audio_enc.forward(batch.spec, ca);
    image_enc.forward(batch.image, ci);

    Predictions out;
    class_head.forward(ca.embedding, out.logits);

    Tensor<Scalar> joint, h, ha, pre;
    concat.forward(ca.embedding, ci.embedding, joint);
    inv_hidden.forward(joint, h);
    relu.forward(h, ha);
    inv_out.forward(ha, pre);
    tanh.forward(pre, out.actions);
    out.embeddings = std::move(ca.embedding);
    return out;
}

MultiTaskLosses MultiTaskNet::forward_backward(const MultiTaskBatch& batch, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must be in [0,1]");

    ConvEncoder::Cache ca, ci;
    audio_enc.forward(batch.spec, ca);
    image_enc.forward(batch.image, ci);

    Tensor<Scalar> logits;
    class_head.forward(ca.embedding, logits);

    Tensor<Scalar> joint, h, ha, pre, pred;
    concat.forward(ca.embedding, ci.embedding, joint);
    inv_hidden.forward(joint, h);
    relu.forward(h, ha);
    inv_out.forward(ha, pre);
    tanh.forward(pre, pred);

    SoftmaxCrossEntropy<Scalar> ce;
    MSELoss<Scalar> mse;
    MultiTaskLosses losses;
    losses.class_loss = ce.forward(logits, batch.labels);
    losses.inv_loss = mse.forward(pred, batch.actions);
    losses.total = (1.0 - lambda) * losses.class_loss + lambda * losses.inv_loss;

    // Backward. Head gradients are weighted by (1-lambda) / lambda exactly;
    // a zero weight contributes exact zeros, so the paths can be skipped.
    Tensor<Scalar> d_ea(ca.embedding.shape);
    Tensor<Scalar> d_ei(ci.embedding.shape);
    bool touched_image = false;

    if (lambda < 1.0) {
        Tensor<Scalar> dlogits, d_ea_class;
        ce.backward(batch.labels, num_classes, static_cast<Scalar>(1.0 - lambda), dlogits);
        class_head.backward(ca.embedding, dlogits, &d_ea_class);
        for (size_t i = 0; i < d_ea.values.size(); ++i) d_ea.values[i] += d_ea_class.values[i];
    }
    if (lambda > 0.0) {
        Tensor<Scalar> dpred, dpre, dha, dh, djoint, d_ea_inv, d_ei_inv;
        mse.backward(pred, batch.actions, static_cast<Scalar>(lambda), dpred);
        tanh.backward(pred, dpred, dpre);
        inv_out.backward(ha, dpre, &dha);
        relu.backward(ha, dha, dh);
        inv_hidden.backward(joint, dh, &djoint);
        concat.backward(djoint, kEmbeddingDim, kEmbeddingDim, d_ea_inv, d_ei_inv);
        for (size_t i = 0; i < d_ea.values.size(); ++i) d_ea.values[i] += d_ea_inv.values[i];
        d_ei = std::move(d_ei_inv);
        touched_image = true;
    }

    audio_enc.backward(batch.spec, ca, d_ea);
    if (touched_image) image_enc.backward(batch.image, ci, d_ei);
    return losses;
}

Tensor<Scalar> MultiTaskNet::embed_batch(const Tensor<Scalar>& spec) {
    ConvEncoder::Cache c;
    audio_enc.forward(spec, c);
    return std::move(c.embedding);
}

std::vector<Tensor<Scalar>*> MultiTaskNet::params() {
    std::vector<Tensor<Scalar>*> out;
    for (auto* p : audio_enc.params()) out.push_back(p);
    for (auto* p : image_enc.params()) out.push_back(p);
    out.push_back(&class_head.weight);
    out.push_back(&class_head.bias);
    out.push_back(&inv_hidden.weight);
    out.push_back(&inv_hidden.bias);
    out.push_back(&inv_out.weight);
    out.push_back(&inv_out.bias);
    return out;
}

std::vector<std::pair<std::string, Tensor<Scalar>*>> MultiTaskNet::named_params() {
    auto out = audio_enc.named_params("audio_enc");
    for (auto& p : image_enc.named_params("image_enc")) out.push_back(p);
    out.push_back({"class_head.weight", &class_head.weight});
    out.push_back({"class_head.bias", &class_head.bias});
    out.push_back({"inv_hidden.weight", &inv_hidden.weight});
    out.push_back({"inv_hidden.bias", &inv_hidden.bias});
    out.push_back({"inv_out.weight", &inv_out.weight});
    out.push_back({"inv_out.bias", &inv_out.bias});
    return out;
}

InverseImageNet::InverseImageNet(uint64_t seed) {
    Rng rng(seed_combine(seed, "inverse_image"));
    enc_pre = ConvEncoder(1, rng);
    enc_post = ConvEncoder(1, rng);
    hidden = Linear<Scalar>(2 * kEmbeddingDim, 64, rng);
    out = Linear<Scalar>(64, 2, rng);
}

Tensor<Scalar> InverseImageNet::predict(const Tensor<Scalar>& pre, const Tensor<Scalar>& post) {
    ConvEncoder::Cache cp, cq;
    enc_pre.forward(pre, cp);
    enc_post.forward(post, cq);
    Tensor<Scalar> joint, h, ha, z, pred;
    concat.forward(cp.embedding, cq.embedding, joint);
    hidden.forward(joint, h);
    relu.forward(h, ha);
    out.forward(ha, z);
    tanh.forward(z, pred);
    return pred;
}

double InverseImageNet::forward_backward(const Tensor<Scalar>& pre, const Tensor<Scalar>& post,
                                         const std::vector<Scalar>& actions) {
    ConvEncoder::Cache cp, cq;
    enc_pre.forward(pre, cp);
    enc_post.forward(post, cq);
    Tensor<Scalar> joint, h, ha, z, pred;
    concat.forward(cp.embedding, cq.embedding, joint);
    hidden.forward(joint, h);
    relu.forward(h, ha);
    out.forward(ha, z);
    tanh.forward(z, pred);

    MSELoss<Scalar> mse;
    double loss = mse.forward(pred, actions);

    Tensor<Scalar> dpred, dz, dha, dh, djoint, d_pre, d_post;
    mse.backward(pred, actions, Scalar(1), dpred);
    tanh.backward(pred, dpred, dz);
    out.backward(ha, dz, &dha);
    relu.backward(ha, dha, dh);
    hidden.backward(joint, dh, &djoint);
    concat.backward(djoint, kEmbeddingDim, kEmbeddingDim, d_pre, d_post);
    enc_pre.backward(pre, cp, d_pre);
    enc_post.backward(post, cq, d_post);
    return loss;
}

std::vector<Tensor<Scalar>*> InverseImageNet::params() {
    std::vector<Tensor<Scalar>*> out_params;
    for (auto* p : enc_pre.params()) out_params.push_back(p);
    for (auto* p : enc_post.params()) out_params.push_back(p);
    out_params.push_back(&hidden.weight);
    out_params.push_back(&hidden.bias);
    out_params.push_back(&out.weight);
    out_params.push_back(&out.bias);
    return out_params;
}

std::vector<std::pair<std::string, Tensor<Scalar>*>> InverseImageNet::named_params() {
    auto out_params = enc_pre.named_params("enc_pre");
    for (auto& p : enc_post.named_params("enc_post")) out_params.push_back(p);
    out_params.push_back({"hidden.weight", &hidden.weight});
    out_params.push_back({"hidden.bias", &hidden.bias});
    out_params.push_back({"out.weight", &out.weight});
    out_params.push_back({"out.bias", &out.bias});
    return out_params;
}

ForwardNet::ForwardNet(long cond_dim_, long action_dim_, uint64_t seed)
    : cond_dim(cond_dim_), action_dim(action_dim_) {
    Rng rng(seed_combine(seed, "forward"));
    l1 = Linear<Scalar>(input_dim(), 128, rng);
    l2 = Linear<Scalar>(128, 128, rng);
    l3 = Linear<Scalar>(128, 2, rng);
}

Tensor<Scalar> ForwardNet::predict(const Tensor<Scalar>& x) {
    Tensor<Scalar> h1, a1, h2, a2, z, pred;
    l1.forward(x, h1);
    relu.forward(h1, a1);
    l2.forward(a1, h2);
    relu.forward(h2, a2);
    l3.forward(a2, z);
    sigmoid.forward(z, pred);
    return pred;
}

double ForwardNet::forward_backward(const Tensor<Scalar>& x, const std::vector<Scalar>& targets,
                                    Tensor<Scalar>* dx) {
    Tensor<Scalar> h1, a1, h2, a2, z, pred;
    l1.forward(x, h1);
    relu.forward(h1, a1);
    l2.forward(a1, h2);
    relu.forward(h2, a2);
    l3.forward(a2, z);
    sigmoid.forward(z, pred);

    MSELoss<Scalar> mse;
    double loss = mse.forward(pred, targets);

    Tensor<Scalar> dpred, dz, da2, dh2, da1, dh1;
    mse.backward(pred, targets, Scalar(1), dpred);
    sigmoid.backward(pred, dpred, dz);
    l3.backward(a2, dz, &da2);
    relu.backward(a2, da2, dh2);
    l2.backward(a1, dh2, &da1);
    relu.backward(a1, da1, dh1);
    l1.backward(x, dh1, dx);
    return loss;
}

std::vector<Tensor<Scalar>*> ForwardNet::params() {
    return {&l1.weight, &l1.bias, &l2.weight, &l2.bias, &l3.weight, &l3.bias};
}

std::vector<std::pair<std::string, Tensor<Scalar>*>> ForwardNet::named_params() {
    return {{"l1.weight", &l1.weight}, {"l1.bias", &l1.bias}, {"l2.weight", &l2.weight},
            {"l2.bias", &l2.bias},     {"l3.weight", &l3.weight}, {"l3.bias", &l3.bias}};
}

ForwardVisualNet::ForwardVisualNet(long action_dim, uint64_t seed) {
    Rng rng(seed_combine(seed, "forward_visual"));
    enc = ConvEncoder(1, rng);
    head = ForwardNet(kEmbeddingDim, action_dim, seed_combine(seed, "head"));
}

Tensor<Scalar> ForwardVisualNet::predict(const Tensor<Scalar>& probe_image, const Tensor<Scalar>& state) {
    ConvEncoder::Cache c;
    enc.forward(probe_image, c);
    Tensor<Scalar> x;
    concat.forward(c.embedding, state, x);
    return head.predict(x);
}

double ForwardVisualNet::forward_backward(const Tensor<Scalar>& probe_image, const Tensor<Scalar>& state,
                                          const std::vector<Scalar>& targets) {
    ConvEncoder::Cache c;
    enc.forward(probe_image, c);
    Tensor<Scalar> x;
    concat.forward(c.embedding, state, x);
    Tensor<Scalar> dx;
    double loss = head.forward_backward(x, targets, &dx);
    Tensor<Scalar> d_embed, d_state;
    concat.backward(dx, kEmbeddingDim, state.shape[1], d_embed, d_state);
    enc.backward(probe_image, c, d_embed);
    return loss;
}

std::vector<Tensor<Scalar>*> ForwardVisualNet::params() {
    auto out = enc.params();
    for (auto* p : head.params()) out.push_back(p);
    return out;
}

std::vector<std::pair<std::string, Tensor<Scalar>*>> ForwardVisualNet::named_params() {
    auto out = enc.named_params("enc");
    for (auto& p : head.named_params()) out.push_back({"head." + p.first, p.second});
    return out;
}

}  // namespace tiltlab::nn
