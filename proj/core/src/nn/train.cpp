#include "tiltlab/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "tiltlab/data/store.hpp"
#include "tiltlab/sim/render.hpp"

namespace tiltlab::nn {

using nlohmann::json;

const LoadedRecord& LoadedDataset::by_id(const std::string& record_id) const {
    auto it = index_by_id.find(record_id);
    if (it == index_by_id.end())
        throw std::runtime_error("dataset: unknown record id " + record_id);
    return records[it->second];
}

std::vector<float> spec_to_input(const dsp::Spectrogram& spec) {
    std::vector<float> out(4 * dsp::kSpecFrames * dsp::kSpecBins);
    for (int c = 0; c < dsp::kSpecChannels; ++c)
        for (int t = 0; t < dsp::kSpecFrames; ++t)
            for (int f = 0; f < dsp::kSpecBins; ++f)
                out[(c * dsp::kSpecFrames + t) * dsp::kSpecBins + f] = spec.at(t, f, c) / 5.0f;
    return out;
}

LoadedDataset load_dataset(const std::filesystem::path& root) {
    LoadedDataset data;
    data.root = root;
    data.manifest = data::read_manifest(root / "manifest.json");
    data.records.reserve(data.manifest.records.size());

    for (const auto& mrec : data.manifest.records) {
        LoadedRecord rec;
        rec.meta = data::read_record_meta(root / mrec.path);
        rec.spec = spec_to_input(data::read_record_spectrogram(root, mrec.record_id));
        rec.set_a = data.manifest.in_set_a(mrec.object_id);
        rec.main_split = mrec.split == "main";
        rec.train = mrec.train;

        double radius = data.manifest.objects[mrec.object_id].physics.radius;
        auto render = [&](const Vec2& norm_pos) {
            auto img = sim::render_topdown(data::denormalize_position(norm_pos, data.manifest.tray.side_length),
                                           radius, data.manifest.tray);
            return img.pixels;
        };
        rec.pre_image = render(rec.meta.pre_position);
        rec.post_image = render(rec.meta.post_position);

        data.index_by_id[mrec.record_id] = static_cast<int>(data.records.size());
        data.records.push_back(std::move(rec));
    }
    try {
        data.pushes = data::read_push_records(root);
    } catch (const std::exception&) {
        data.pushes.clear();  // push data is optional (e.g. ingested datasets)
    }
    return data;
}

void EmbedTrainConfig::validate() const {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must be in [0,1]");
    if (lr <= 0.0 || batch_size < 1 || epochs < 1) throw std::invalid_argument("bad train hyperparameters");
    if (scope != "setA" && scope != "all") throw std::invalid_argument("scope must be setA or all");
}

json EmbedTrainConfig::to_json() const {
    return json{{"seed", seed},     {"lr", lr},         {"batch_size", batch_size},
                {"epochs", epochs}, {"lambda", lambda}, {"scope", scope}};
}

json ForwardTrainConfig::to_json() const {
    return json{{"seed", seed},     {"lr", lr},
                {"batch_size", batch_size}, {"epochs", epochs},
                {"task", to_string(task)},  {"condition", to_string(condition)}};
}

const char* to_string(ForwardCondition c) {
    switch (c) {
        case ForwardCondition::Audio: return "audio";
        case ForwardCondition::Visual: return "visual";
        case ForwardCondition::Oracle: return "oracle";
        case ForwardCondition::None: return "none";
    }
    return "?";
}

const char* to_string(ForwardTask t) {
    return t == ForwardTask::Tray ? "tray" : "push";
}

namespace {

constexpr long kImagePixels = kImageSide * kImageSide;
constexpr long kSpecPixels = 4 * kImageSide * kImageSide;

void fill_multitask_batch(const LoadedDataset& data, const std::vector<int>& indices, size_t begin,
                          size_t end, MultiTaskBatch& batch) {
    long n = static_cast<long>(end - begin);
    batch.spec.resize({n, 4, kImageSide, kImageSide});
    batch.image.resize({n, 1, kImageSide, kImageSide});
    batch.labels.resize(n);
    batch.actions.resize(2 * n);
    for (long i = 0; i < n; ++i) {
        const auto& rec = data.records[indices[begin + i]];
        std::copy_n(rec.spec.data(), kSpecPixels, batch.spec.data() + i * kSpecPixels);
        std::copy_n(rec.pre_image.data(), kImagePixels, batch.image.data() + i * kImagePixels);
        batch.labels[i] = rec.meta.object_id;
        batch.actions[2 * i] = static_cast<Scalar>(rec.meta.action.target_tilt.x);
        batch.actions[2 * i + 1] = static_cast<Scalar>(rec.meta.action.target_tilt.y);
    }
}

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> heldout;  // held-out interactions of training objects
    std::vector<int> set_b;    // every record of unseen objects
};

SplitIndices collect_splits(const LoadedDataset& data, const std::string& scope) {
    SplitIndices s;
    for (int i = 0; i < static_cast<int>(data.records.size()); ++i) {
        const auto& rec = data.records[i];
        bool train = scope == "all" ? rec.main_split : rec.train;
        if (train) {
            if (scope == "setA" && !rec.set_a)
                throw std::logic_error("data hygiene: set-B record flagged for training");
            s.train.push_back(i);
        } else if (scope == "all" ? !rec.main_split : (rec.set_a && !rec.main_split)) {
            s.heldout.push_back(i);
        }
        if (!rec.set_a) s.set_b.push_back(i);
    }
    if (s.train.empty()) throw std::runtime_error("training split is empty");
    return s;
}

struct MultiTaskEval {
    double class_acc = 0.0;
    double inv_mse = 0.0;
};

MultiTaskEval evaluate_multitask(MultiTaskNet& net, const LoadedDataset& data,
                                 const std::vector<int>& indices, int batch_size) {
    MultiTaskEval out;
    if (indices.empty()) return out;
    long correct = 0;
    double se = 0.0;
    MultiTaskBatch batch;
    for (size_t begin = 0; begin < indices.size(); begin += batch_size) {
        size_t end = std::min(indices.size(), begin + batch_size);
        fill_multitask_batch(data, indices, begin, end, batch);
        auto pred = net.predict(batch);
        long n = static_cast<long>(end - begin);
        for (long i = 0; i < n; ++i) {
            const Scalar* logits = pred.logits.data() + i * net.num_classes;
            int arg = 0;
            for (int k = 1; k < net.num_classes; ++k)
                if (logits[k] > logits[arg]) arg = k;
            if (arg == batch.labels[i]) ++correct;
            for (int d = 0; d < 2; ++d) {
                double diff = static_cast<double>(pred.actions.values[i * 2 + d]) - batch.actions[i * 2 + d];
                se += diff * diff;
            }
        }
    }
    out.class_acc = static_cast<double>(correct) / indices.size();
    out.inv_mse = se / (2.0 * indices.size());
    return out;
}

void check_finite(double v, const char* what, int epoch) {
    if (!std::isfinite(v))
        throw std::runtime_error(std::string("training aborted: non-finite ") + what + " at epoch " +
                                 std::to_string(epoch));
}

}  // namespace

EmbedTrainResult train_embedding(const LoadedDataset& data, const EmbedTrainConfig& cfg) {
    cfg.validate();
    auto splits = collect_splits(data, cfg.scope);

    EmbedTrainResult result;
    result.net = MultiTaskNet(data.num_objects(), cfg.seed);
    Adam<Scalar> adam(cfg.lr);
    auto params = result.net.params();
    result.history = json::array();

    MultiTaskBatch batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto order = splits.train;
        Rng shuffle_rng(seed_combine(seed_combine(cfg.seed, "epoch"), static_cast<uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double sum_total = 0.0, sum_class = 0.0, sum_inv = 0.0;
        long batches = 0;
        for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            size_t end = std::min(order.size(), begin + cfg.batch_size);
            fill_multitask_batch(data, order, begin, end, batch);
            auto losses = result.net.forward_backward(batch, cfg.lambda);
            check_finite(losses.total, "loss", epoch);
            adam.step(params);
            for (auto* p : params) p->zero_grad();
            sum_total += losses.total;
            sum_class += losses.class_loss;
            sum_inv += losses.inv_loss;
            ++batches;
        }

        auto held = evaluate_multitask(result.net, data, splits.heldout, cfg.batch_size);
        auto setb = evaluate_multitask(result.net, data, splits.set_b, cfg.batch_size);
        json entry{{"epoch", epoch},
                   {"train_total", sum_total / batches},
                   {"train_class", sum_class / batches},
                   {"train_inv", sum_inv / batches},
                   {"heldout_class_acc", held.class_acc},
                   {"heldout_inv_mse", held.inv_mse},
                   {"setb_inv_mse", setb.inv_mse}};
        result.history.push_back(entry);
        if (cfg.verbose)
            std::cerr << "epoch " << epoch << " total " << sum_total / batches << " heldout_acc "
                      << held.class_acc << " setb_mse " << setb.inv_mse << "\n";
    }
    result.final_metrics = result.history.back();
    return result;
}

InverseTrainResult train_inverse_image(const LoadedDataset& data, const EmbedTrainConfig& cfg) {
    cfg.validate();
    auto splits = collect_splits(data, cfg.scope);

    InverseTrainResult result;
    result.net = InverseImageNet(cfg.seed);
    Adam<Scalar> adam(cfg.lr);
    auto params = result.net.params();
    result.history = json::array();

    auto fill = [&](const std::vector<int>& indices, size_t begin, size_t end, Tensor<Scalar>& pre,
                    Tensor<Scalar>& post, std::vector<Scalar>& actions) {
        long n = static_cast<long>(end - begin);
        pre.resize({n, 1, kImageSide, kImageSide});
        post.resize({n, 1, kImageSide, kImageSide});
        actions.resize(2 * n);
        for (long i = 0; i < n; ++i) {
            const auto& rec = data.records[indices[begin + i]];
            std::copy_n(rec.pre_image.data(), kImagePixels, pre.data() + i * kImagePixels);
            std::copy_n(rec.post_image.data(), kImagePixels, post.data() + i * kImagePixels);
            actions[2 * i] = static_cast<Scalar>(rec.meta.action.target_tilt.x);
            actions[2 * i + 1] = static_cast<Scalar>(rec.meta.action.target_tilt.y);
        }
    };
    auto eval_mse = [&](const std::vector<int>& indices) {
        if (indices.empty()) return 0.0;
        double se = 0.0;
        Tensor<Scalar> pre, post;
        std::vector<Scalar> actions;
        for (size_t begin = 0; begin < indices.size(); begin += cfg.batch_size) {
            size_t end = std::min(indices.size(), begin + cfg.batch_size);
            fill(indices, begin, end, pre, post, actions);
            auto pred = result.net.predict(pre, post);
            for (size_t i = 0; i < actions.size(); ++i) {
                double d = static_cast<double>(pred.values[i]) - actions[i];
                se += d * d;
            }
        }
        return se / (2.0 * indices.size());
    };

    Tensor<Scalar> pre, post;
    std::vector<Scalar> actions;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto order = splits.train;
        Rng shuffle_rng(seed_combine(seed_combine(cfg.seed, "epoch"), static_cast<uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double sum_loss = 0.0;
        long batches = 0;
        for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            size_t end = std::min(order.size(), begin + cfg.batch_size);
            fill(order, begin, end, pre, post, actions);
            double loss = result.net.forward_backward(pre, post, actions);
            check_finite(loss, "loss", epoch);
            adam.step(params);
            for (auto* p : params) p->zero_grad();
            sum_loss += loss;
            ++batches;
        }
        json entry{{"epoch", epoch},
                   {"train_inv", sum_loss / batches},
                   {"heldout_inv_mse", eval_mse(splits.heldout)},
                   {"setb_inv_mse", eval_mse(splits.set_b)}};
        result.history.push_back(entry);
        if (cfg.verbose)
            std::cerr << "epoch " << epoch << " inv " << sum_loss / batches << "\n";
    }
    result.final_metrics = result.history.back();
    return result;
}

EmbeddingTable extract_embeddings(MultiTaskNet& net, const LoadedDataset& data) {
    EmbeddingTable table;
    const int batch = 128;
    Tensor<Scalar> spec;
    for (size_t begin = 0; begin < data.records.size(); begin += batch) {
        size_t end = std::min(data.records.size(), begin + batch);
        long n = static_cast<long>(end - begin);
        spec.resize({n, 4, kImageSide, kImageSide});
        for (long i = 0; i < n; ++i)
            std::copy_n(data.records[begin + i].spec.data(), kSpecPixels, spec.data() + i * kSpecPixels);
        auto emb = net.embed_batch(spec);
        for (long i = 0; i < n; ++i) {
            std::vector<float> e(kEmbeddingDim);
            std::copy_n(emb.data() + i * kEmbeddingDim, kEmbeddingDim, e.data());
            table[data.records[begin + i].meta.record_id] = std::move(e);
        }
    }
    return table;
}

EmbeddingTable random_embeddings(const LoadedDataset& data, int num_classes, uint64_t seed) {
    MultiTaskNet net(num_classes, seed);
    return extract_embeddings(net, data);
}

namespace {

struct ForwardSample {
    std::vector<Scalar> cond;
    std::vector<Scalar> state;   // pre position + action
    Scalar target[2];
    const std::vector<float>* probe_image = nullptr;  // Visual condition
    int group = 0;  // 0 train, 1 train-object holdout, 2 test objects
};

std::vector<ForwardSample> assemble_forward_samples(const LoadedDataset& data,
                                                    const EmbeddingTable* embeddings,
                                                    const ForwardTrainConfig& cfg) {
    std::vector<ForwardSample> samples;
    auto condition_for = [&](const std::string& probe_id, int object_id) {
        ForwardSample s;
        switch (cfg.condition) {
            case ForwardCondition::Audio: {
                if (!embeddings) throw std::runtime_error("audio conditioning requires embeddings");
                auto it = embeddings->find(probe_id);
                if (it == embeddings->end())
                    throw std::runtime_error("record lacks a paired embedding: " + probe_id);
                s.cond.assign(it->second.begin(), it->second.end());
                break;
            }
            case ForwardCondition::Visual:
                s.probe_image = &data.by_id(probe_id).pre_image;
                break;
            case ForwardCondition::Oracle:
                s.cond.assign(data.num_objects(), Scalar(0));
                s.cond[object_id] = Scalar(1);
                break;
            case ForwardCondition::None:
                break;
        }
        return s;
    };

    if (cfg.task == ForwardTask::Tray) {
        for (const auto& rec : data.records) {
            ForwardSample s = condition_for(rec.meta.probe_record_id, rec.meta.object_id);
            s.state = {static_cast<Scalar>(rec.meta.pre_position.x),
                       static_cast<Scalar>(rec.meta.pre_position.y),
                       static_cast<Scalar>(rec.meta.action.target_tilt.x),
                       static_cast<Scalar>(rec.meta.action.target_tilt.y)};
            s.target[0] = static_cast<Scalar>(rec.meta.post_position.x);
            s.target[1] = static_cast<Scalar>(rec.meta.post_position.y);
            s.group = rec.train ? 0 : (rec.set_a ? 1 : 2);
            samples.push_back(std::move(s));
        }
    } else {
        if (data.pushes.empty()) throw std::runtime_error("dataset has no push records");
        double side = data.manifest.tray.side_length;
        for (const auto& push : data.pushes) {
            ForwardSample s = condition_for(push.probe_record_id, push.object_id);
            Vec2 ps = data::normalize_position(push.p_start, side);
            Vec2 pe = data::normalize_position(push.p_end, side);
            s.state = {static_cast<Scalar>(push.pre_position.x),
                       static_cast<Scalar>(push.pre_position.y),
                       static_cast<Scalar>(ps.x),
                       static_cast<Scalar>(ps.y),
                       static_cast<Scalar>(pe.x),
                       static_cast<Scalar>(pe.y)};
            s.target[0] = static_cast<Scalar>(push.post_position.x);
            s.target[1] = static_cast<Scalar>(push.post_position.y);
            s.group = push.train ? (push.split == "main" ? 0 : 1) : 2;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

struct ForwardErrors {
    double l1 = 0.0;
    double l2 = 0.0;
};

}  // namespace

ForwardTrainResult train_forward(const LoadedDataset& data, const EmbeddingTable* embeddings,
                                 const ForwardTrainConfig& cfg) {
    auto samples = assemble_forward_samples(data, embeddings, cfg);
    const long action_dim = cfg.task == ForwardTask::Tray ? 2 : 4;
    const long state_dim = 2 + action_dim;
    const long cond_dim = cfg.condition == ForwardCondition::Audio    ? kEmbeddingDim
                          : cfg.condition == ForwardCondition::Oracle ? data.num_objects()
                                                                      : 0;

    ForwardTrainResult result;
    result.condition = cfg.condition;
    const bool visual = cfg.condition == ForwardCondition::Visual;
    if (visual)
        result.visual = ForwardVisualNet(action_dim, cfg.seed);
    else
        result.net = ForwardNet(cond_dim, action_dim, cfg.seed);

    std::vector<int> train_idx;
    std::vector<int> eval_train, eval_test;
    for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
        if (samples[i].group == 0) train_idx.push_back(i);
        else if (samples[i].group == 1) eval_train.push_back(i);
        else eval_test.push_back(i);
    }
    if (train_idx.empty()) throw std::runtime_error("forward training split is empty");

    Adam<Scalar> adam(cfg.lr);
    auto params = visual ? result.visual.params() : result.net.params();

    auto fill_flat = [&](const std::vector<int>& indices, size_t begin, size_t end, Tensor<Scalar>& x,
                         std::vector<Scalar>& targets) {
        long n = static_cast<long>(end - begin);
        long d = cond_dim + state_dim;
        x.resize({n, d});
        targets.resize(2 * n);
        for (long i = 0; i < n; ++i) {
            const auto& s = samples[indices[begin + i]];
            Scalar* row = x.data() + i * d;
            std::copy(s.cond.begin(), s.cond.end(), row);
            std::copy(s.state.begin(), s.state.end(), row + cond_dim);
            targets[2 * i] = s.target[0];
            targets[2 * i + 1] = s.target[1];
        }
    };
    auto fill_visual = [&](const std::vector<int>& indices, size_t begin, size_t end, Tensor<Scalar>& img,
                           Tensor<Scalar>& state, std::vector<Scalar>& targets) {
        long n = static_cast<long>(end - begin);
        img.resize({n, 1, kImageSide, kImageSide});
        state.resize({n, state_dim});
        targets.resize(2 * n);
        for (long i = 0; i < n; ++i) {
            const auto& s = samples[indices[begin + i]];
            std::copy_n(s.probe_image->data(), kImagePixels, img.data() + i * kImagePixels);
            std::copy(s.state.begin(), s.state.end(), state.data() + i * state_dim);
            targets[2 * i] = s.target[0];
            targets[2 * i + 1] = s.target[1];
        }
    };

    auto evaluate = [&](const std::vector<int>& indices) {
        ForwardErrors err;
        if (indices.empty()) return err;
        Tensor<Scalar> x, img, state;
        std::vector<Scalar> targets;
        for (size_t begin = 0; begin < indices.size(); begin += cfg.batch_size) {
            size_t end = std::min(indices.size(), begin + cfg.batch_size);
            Tensor<Scalar> pred;
            if (visual) {
                fill_visual(indices, begin, end, img, state, targets);
                pred = result.visual.predict(img, state);
            } else {
                fill_flat(indices, begin, end, x, targets);
                pred = result.net.predict(x);
            }
            long n = static_cast<long>(end - begin);
            for (long i = 0; i < n; ++i) {
                double dx = static_cast<double>(pred.values[2 * i]) - targets[2 * i];
                double dy = static_cast<double>(pred.values[2 * i + 1]) - targets[2 * i + 1];
                err.l1 += (std::abs(dx) + std::abs(dy)) / 2.0;
                err.l2 += std::sqrt(dx * dx + dy * dy);
            }
        }
        err.l1 /= indices.size();
        err.l2 /= indices.size();
        return err;
    };

    result.history = json::array();
    Tensor<Scalar> x, img, state;
    std::vector<Scalar> targets;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto order = train_idx;
        Rng shuffle_rng(seed_combine(seed_combine(cfg.seed, "fwd_epoch"), static_cast<uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double sum_loss = 0.0;
        long batches = 0;
        for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            size_t end = std::min(order.size(), begin + cfg.batch_size);
            double loss;
            if (visual) {
                fill_visual(order, begin, end, img, state, targets);
                loss = result.visual.forward_backward(img, state, targets);
            } else {
                fill_flat(order, begin, end, x, targets);
                loss = result.net.forward_backward(x, targets);
            }
            check_finite(loss, "loss", epoch);
            adam.step(params);
            for (auto* p : params) p->zero_grad();
            sum_loss += loss;
            ++batches;
        }
        auto tr = evaluate(eval_train);
        auto te = evaluate(eval_test);
        json entry{{"epoch", epoch},
                   {"train_mse", sum_loss / batches},
                   {"train_objects_l1", tr.l1},
                   {"train_objects_l2", tr.l2},
                   {"test_objects_l1", te.l1},
                   {"test_objects_l2", te.l2}};
        result.history.push_back(entry);
        if (cfg.verbose)
            std::cerr << "epoch " << epoch << " mse " << sum_loss / batches << " test_l1 " << te.l1
                      << "\n";
    }
    result.final_metrics = result.history.back();
    return result;
}

std::vector<float> embed(MultiTaskNet& net, const dsp::Spectrogram& spec) {
    Tensor<Scalar> x({1, 4, kImageSide, kImageSide});
    auto input = spec_to_input(spec);
    std::copy(input.begin(), input.end(), x.data());
    auto e = net.embed_batch(x);
    return {e.values.begin(), e.values.end()};
}

Vec2 predict_action(MultiTaskNet& net, const dsp::Spectrogram& spec, const Image& pre_image) {
    MultiTaskBatch batch;
    batch.spec.resize({1, 4, kImageSide, kImageSide});
    auto input = spec_to_input(spec);
    std::copy(input.begin(), input.end(), batch.spec.data());
    batch.image.resize({1, 1, kImageSide, kImageSide});
    std::copy(pre_image.pixels.begin(), pre_image.pixels.end(), batch.image.data());
    batch.labels = {0};
    batch.actions = {0, 0};
    auto pred = net.predict(batch);
    return {pred.actions.values[0], pred.actions.values[1]};
}

}  // namespace tiltlab::nn
