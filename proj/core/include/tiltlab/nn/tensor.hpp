#pragma once

#include <cassert>
#include <cstdint>
#include <numeric>
#include <vector>

namespace tiltlab::nn {

/// Dense row-major tensor with a gradient slot of the same shape.
template <typename T>
struct Tensor {
    std::vector<long> shape;
    std::vector<T> values;
    std::vector<T> grad;

    Tensor() = default;
    explicit Tensor(std::vector<long> s) { resize(std::move(s)); }

    void resize(std::vector<long> s) {
        shape = std::move(s);
        values.assign(numel(), T(0));
        grad.clear();
    }

    long numel() const {
        long n = 1;
        for (long d : shape) n *= d;
        return n;
    }

    void ensure_grad() {
        if (grad.size() != values.size()) grad.assign(values.size(), T(0));
    }
    void zero_grad() {
        if (!grad.empty()) std::fill(grad.begin(), grad.end(), T(0));
    }

    T* data() { return values.data(); }
    const T* data() const { return values.data(); }
};

}  // namespace tiltlab::nn
