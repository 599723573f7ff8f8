#pragma once

// Central finite-difference gradient checks for every layer type, run in
// double precision at the contract step size h = 1e-3. Each check builds a
// random small layer, projects its output onto fixed random weights to get a
// scalar loss, and compares analytic input+parameter gradients against
// (f(x+h) - f(x-h)) / 2h elementwise.

#include <cmath>
#include <functional>
#include <vector>

#include "tiltlab/nn/layers.hpp"
#include "tiltlab/rng.hpp"

namespace gradcheck {

using tiltlab::Rng;
using tiltlab::nn::Tensor;

constexpr double kStep = 1e-3;

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

/// Compare analytic gradients of `values` against central differences of
/// `loss()` while mutating the same storage.
inline double check_tensor(std::vector<double>& values, const std::vector<double>& analytic,
                           const std::function<double()>& loss) {
    double worst = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        double keep = values[i];
        values[i] = keep + kStep;
        double up = loss();
        values[i] = keep - kStep;
        double down = loss();
        values[i] = keep;
        double numeric = (up - down) / (2.0 * kStep);
        worst = std::max(worst, rel_err(analytic[i], numeric));
    }
    return worst;
}

inline void fill_random(std::vector<double>& v, Rng& rng, double lo = -1.0, double hi = 1.0) {
    for (auto& x : v) x = rng.uniform(lo, hi);
}

/// Keep pre-activation magnitudes away from the ReLU kink so finite
/// differences do not straddle it.
inline void fill_random_margin(std::vector<double>& v, Rng& rng, double margin) {
    for (auto& x : v) {
        double u = rng.uniform(margin, 1.0);
        x = rng.uniform() < 0.5 ? -u : u;
    }
}

inline double check_conv(uint64_t seed, long stride) {
    Rng rng(seed);
    long cin = 1 + static_cast<long>(rng.uniform_index(3));
    long cout = 1 + static_cast<long>(rng.uniform_index(4));
    long n = 1 + static_cast<long>(rng.uniform_index(2));
    long hw = 4 + 2 * static_cast<long>(rng.uniform_index(3));
    tiltlab::nn::Conv2d<double> conv(cin, cout, stride, rng);
    fill_random(conv.weight.values, rng);
    fill_random(conv.bias.values, rng);

    Tensor<double> x({n, cin, hw, hw});
    fill_random(x.values, rng);
    long oh = conv.out_size(hw);
    std::vector<double> proj(n * cout * oh * oh);
    fill_random(proj, rng);

    auto loss = [&]() {
        Tensor<double> y;
        conv.forward(x, y);
        double acc = 0.0;
        for (size_t i = 0; i < y.values.size(); ++i) acc += proj[i] * y.values[i];
        return acc;
    };

    Tensor<double> y, dy, dx;
    conv.forward(x, y);
    dy.resize(y.shape);
    dy.values = proj;
    conv.weight.ensure_grad();
    conv.bias.ensure_grad();
    conv.backward(x, dy, &dx);

    double worst = check_tensor(x.values, dx.values, loss);
    worst = std::max(worst, check_tensor(conv.weight.values, conv.weight.grad, loss));
    worst = std::max(worst, check_tensor(conv.bias.values, conv.bias.grad, loss));
    return worst;
}

inline double check_linear(uint64_t seed) {
    Rng rng(seed);
    long in = 2 + static_cast<long>(rng.uniform_index(6));
    long out = 1 + static_cast<long>(rng.uniform_index(5));
    long n = 1 + static_cast<long>(rng.uniform_index(3));
    tiltlab::nn::Linear<double> lin(in, out, rng);
    fill_random(lin.weight.values, rng);
    fill_random(lin.bias.values, rng);

    Tensor<double> x({n, in});
    fill_random(x.values, rng);
    std::vector<double> proj(n * out);
    fill_random(proj, rng);

    auto loss = [&]() {
        Tensor<double> y;
        lin.forward(x, y);
        double acc = 0.0;
        for (size_t i = 0; i < y.values.size(); ++i) acc += proj[i] * y.values[i];
        return acc;
    };

    Tensor<double> y, dy, dx;
    lin.forward(x, y);
    dy.resize(y.shape);
    dy.values = proj;
    lin.weight.ensure_grad();
    lin.bias.ensure_grad();
    lin.backward(x, dy, &dx);

    double worst = check_tensor(x.values, dx.values, loss);
    worst = std::max(worst, check_tensor(lin.weight.values, lin.weight.grad, loss));
    worst = std::max(worst, check_tensor(lin.bias.values, lin.bias.grad, loss));
    return worst;
}

template <typename Activation>
inline double check_activation(uint64_t seed, double margin) {
    Rng rng(seed);
    long n = 2 + static_cast<long>(rng.uniform_index(6));
    Activation act;
    Tensor<double> x({n, 3});
    fill_random_margin(x.values, rng, margin);
    std::vector<double> proj(x.numel());
    fill_random(proj, rng);

    auto loss = [&]() {
        Tensor<double> y;
        act.forward(x, y);
        double acc = 0.0;
        for (size_t i = 0; i < y.values.size(); ++i) acc += proj[i] * y.values[i];
        return acc;
    };

    Tensor<double> y, dy, dx;
    act.forward(x, y);
    dy.resize(y.shape);
    dy.values = proj;
    act.backward(y, dy, dx);
    return check_tensor(x.values, dx.values, loss);
}

inline double check_gap(uint64_t seed) {
    Rng rng(seed);
    long n = 1 + static_cast<long>(rng.uniform_index(3));
    long c = 1 + static_cast<long>(rng.uniform_index(4));
    long hw = 2 + static_cast<long>(rng.uniform_index(5));
    tiltlab::nn::GlobalAvgPool<double> gap;
    Tensor<double> x({n, c, hw, hw});
    fill_random(x.values, rng);
    std::vector<double> proj(n * c);
    fill_random(proj, rng);

    auto loss = [&]() {
        Tensor<double> y;
        gap.forward(x, y);
        double acc = 0.0;
        for (size_t i = 0; i < y.values.size(); ++i) acc += proj[i] * y.values[i];
        return acc;
    };

    Tensor<double> y, dy, dx;
    gap.forward(x, y);
    dy.resize(y.shape);
    dy.values = proj;
    gap.backward(x, dy, dx);
    return check_tensor(x.values, dx.values, loss);
}

inline double check_concat(uint64_t seed) {
    Rng rng(seed);
    long n = 1 + static_cast<long>(rng.uniform_index(3));
    long da = 1 + static_cast<long>(rng.uniform_index(4));
    long db = 1 + static_cast<long>(rng.uniform_index(4));
    tiltlab::nn::Concat<double> cat;
    Tensor<double> a({n, da}), b({n, db});
    fill_random(a.values, rng);
    fill_random(b.values, rng);
    std::vector<double> proj(n * (da + db));
    fill_random(proj, rng);

    auto loss = [&]() {
        Tensor<double> y;
        cat.forward(a, b, y);
        double acc = 0.0;
        for (size_t i = 0; i < y.values.size(); ++i) acc += proj[i] * y.values[i];
        return acc;
    };

    Tensor<double> y, dy, da_t, db_t;
    cat.forward(a, b, y);
    dy.resize(y.shape);
    dy.values = proj;
    cat.backward(dy, da, db, da_t, db_t);
    double worst = check_tensor(a.values, da_t.values, loss);
    return std::max(worst, check_tensor(b.values, db_t.values, loss));
}

inline double check_softmax_ce(uint64_t seed) {
    Rng rng(seed);
    long n = 1 + static_cast<long>(rng.uniform_index(4));
    long k = 2 + static_cast<long>(rng.uniform_index(6));
    Tensor<double> logits({n, k});
    fill_random(logits.values, rng, -2.0, 2.0);
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng.uniform_index(k));

    tiltlab::nn::SoftmaxCrossEntropy<double> ce;
    auto loss = [&]() { return ce.forward(logits, labels); };

    loss();
    Tensor<double> dlogits;
    ce.backward(labels, k, 1.0, dlogits);
    return check_tensor(logits.values, dlogits.values, loss);
}

inline double check_mse(uint64_t seed) {
    Rng rng(seed);
    long n = 1 + static_cast<long>(rng.uniform_index(4));
    Tensor<double> pred({n, 2});
    fill_random(pred.values, rng);
    std::vector<double> target(pred.numel());
    fill_random(target, rng);

    tiltlab::nn::MSELoss<double> mse;
    auto loss = [&]() { return mse.forward(pred, target); };
    loss();
    Tensor<double> dpred;
    mse.backward(pred, target, 1.0, dpred);
    return check_tensor(pred.values, dpred.values, loss);
}

/// Worst relative error over every layer type for one seed.
inline double check_all_layers(uint64_t seed) {
    double worst = 0.0;
    worst = std::max(worst, check_conv(seed * 11 + 1, 2));
    worst = std::max(worst, check_conv(seed * 11 + 2, 1));
    worst = std::max(worst, check_linear(seed * 11 + 3));
    worst = std::max(worst, check_activation<tiltlab::nn::ReLU<double>>(seed * 11 + 4, 0.05));
    worst = std::max(worst, check_activation<tiltlab::nn::Tanh<double>>(seed * 11 + 5, 0.0));
    worst = std::max(worst, check_activation<tiltlab::nn::Sigmoid<double>>(seed * 11 + 6, 0.0));
    worst = std::max(worst, check_gap(seed * 11 + 7));
    worst = std::max(worst, check_concat(seed * 11 + 8));
    worst = std::max(worst, check_softmax_ce(seed * 11 + 9));
    worst = std::max(worst, check_mse(seed * 11 + 10));
    return worst;
}

}  // namespace gradcheck
