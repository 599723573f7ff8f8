#pragma once

#include <cmath>
#include <stdexcept>

#include "tiltlab/nn/gemm.hpp"
#include "tiltlab/nn/tensor.hpp"
#include "tiltlab/rng.hpp"

namespace tiltlab::nn {

/// Fan-in scaled uniform init: U(-sqrt(1/fan_in), +sqrt(1/fan_in)).
template <typename T>
void init_uniform(Tensor<T>& t, long fan_in, Rng& rng) {
    double s = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (auto& v : t.values) v = static_cast<T>(rng.uniform(-s, s));
}

/// 3x3 convolution, configurable stride, padding 1. Input [N,C,H,W].
template <typename T>
struct Conv2d {
    long cin = 0, cout = 0, stride = 2;
    static constexpr long kKernel = 3;
    static constexpr long kPad = 1;
    Tensor<T> weight;  // [cout, cin*9]
    Tensor<T> bias;    // [cout]

    Conv2d() = default;
    Conv2d(long cin_, long cout_, long stride_, Rng& rng) : cin(cin_), cout(cout_), stride(stride_) {
        weight.resize({cout, cin * kKernel * kKernel});
        bias.resize({cout});
        init_uniform(weight, cin * kKernel * kKernel, rng);
        init_uniform(bias, cin * kKernel * kKernel, rng);
        weight.ensure_grad();
        bias.ensure_grad();
    }

    static long out_dim(long in) { return (in + 2 * kPad - kKernel) / 2 + 1; }  // stride 2
    long out_size(long in) const { return (in + 2 * kPad - kKernel) / stride + 1; }

    void im2col(const T* x, long h, long w, long oh, long ow, T* cols) const {
        const long patch = kKernel * kKernel;
        for (long c = 0; c < cin; ++c) {
            const T* xc = x + c * h * w;
            for (long ky = 0; ky < kKernel; ++ky) {
                for (long kx = 0; kx < kKernel; ++kx) {
                    T* row = cols + (c * patch + ky * kKernel + kx) * (oh * ow);
                    for (long oy = 0; oy < oh; ++oy) {
                        long iy = oy * stride - kPad + ky;
                        for (long ox = 0; ox < ow; ++ox) {
                            long ix = ox * stride - kPad + kx;
                            row[oy * ow + ox] =
                                (iy >= 0 && iy < h && ix >= 0 && ix < w) ? xc[iy * w + ix] : T(0);
                        }
                    }
                }
            }
        }
    }

    void col2im_add(const T* cols, long h, long w, long oh, long ow, T* dx) const {
        const long patch = kKernel * kKernel;
        for (long c = 0; c < cin; ++c) {
            T* xc = dx + c * h * w;
            for (long ky = 0; ky < kKernel; ++ky) {
                for (long kx = 0; kx < kKernel; ++kx) {
                    const T* row = cols + (c * patch + ky * kKernel + kx) * (oh * ow);
                    for (long oy = 0; oy < oh; ++oy) {
                        long iy = oy * stride - kPad + ky;
                        if (iy < 0 || iy >= h) continue;
                        for (long ox = 0; ox < ow; ++ox) {
                            long ix = ox * stride - kPad + kx;
                            if (ix >= 0 && ix < w) xc[iy * w + ix] += row[oy * ow + ox];
                        }
                    }
                }
            }
        }
    }

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        const long n = x.shape[0], h = x.shape[2], w = x.shape[3];
        const long oh = out_size(h), ow = out_size(w);
        y.resize({n, cout, oh, ow});
        const long k = cin * kKernel * kKernel;
        std::vector<T> cols(k * oh * ow);
        for (long s = 0; s < n; ++s) {
            im2col(x.data() + s * cin * h * w, h, w, oh, ow, cols.data());
            T* ys = y.data() + s * cout * oh * ow;
            gemm(false, false, cout, oh * ow, k, T(1), weight.data(), k, cols.data(), oh * ow, T(0), ys,
                 oh * ow);
            for (long co = 0; co < cout; ++co) {
                T b = bias.values[co];
                T* row = ys + co * oh * ow;
                for (long i = 0; i < oh * ow; ++i) row[i] += b;
            }
        }
    }

    /// dx may be null when the input gradient is not needed.
    void backward(const Tensor<T>& x, const Tensor<T>& dy, Tensor<T>* dx) {
        const long n = x.shape[0], h = x.shape[2], w = x.shape[3];
        const long oh = out_size(h), ow = out_size(w);
        const long k = cin * kKernel * kKernel;
        weight.ensure_grad();
        bias.ensure_grad();
        if (dx) {
            dx->resize({n, cin, h, w});
            std::fill(dx->values.begin(), dx->values.end(), T(0));
        }
        std::vector<T> cols(k * oh * ow);
        std::vector<T> dcols(k * oh * ow);
        for (long s = 0; s < n; ++s) {
            im2col(x.data() + s * cin * h * w, h, w, oh, ow, cols.data());
            const T* dys = dy.data() + s * cout * oh * ow;
            // dW += dY * cols^T
            gemm(false, true, cout, k, oh * ow, T(1), dys, oh * ow, cols.data(), oh * ow, T(1),
                 weight.grad.data(), k);
            for (long co = 0; co < cout; ++co) {
                T acc = 0;
                const T* row = dys + co * oh * ow;
                for (long i = 0; i < oh * ow; ++i) acc += row[i];
                bias.grad[co] += acc;
            }
            if (dx) {
                gemm(true, false, k, oh * ow, cout, T(1), weight.data(), k, dys, oh * ow, T(0),
                     dcols.data(), oh * ow);
                col2im_add(dcols.data(), h, w, oh, ow, dx->values.data() + s * cin * h * w);
            }
        }
    }
};

template <typename T>
struct Linear {
    long in = 0, out = 0;
    Tensor<T> weight;  // [out, in]
    Tensor<T> bias;    // [out]

    Linear() = default;
    Linear(long in_, long out_, Rng& rng) : in(in_), out(out_) {
        weight.resize({out, in});
        bias.resize({out});
        init_uniform(weight, in, rng);
        init_uniform(bias, in, rng);
        weight.ensure_grad();
        bias.ensure_grad();
    }

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        const long n = x.shape[0];
        y.resize({n, out});
        gemm(false, true, n, out, in, T(1), x.data(), in, weight.data(), in, T(0), y.data(), out);
        for (long s = 0; s < n; ++s)
            for (long o = 0; o < out; ++o) y.values[s * out + o] += bias.values[o];
    }

    void backward(const Tensor<T>& x, const Tensor<T>& dy, Tensor<T>* dx) {
        const long n = x.shape[0];
        weight.ensure_grad();
        bias.ensure_grad();
        gemm(true, false, out, in, n, T(1), dy.data(), out, x.data(), in, T(1), weight.grad.data(), in);
        for (long s = 0; s < n; ++s)
            for (long o = 0; o < out; ++o) bias.grad[o] += dy.values[s * out + o];
        if (dx) {
            dx->resize({n, in});
            gemm(false, false, n, in, out, T(1), dy.data(), out, weight.data(), in, T(0), dx->data(), in);
        }
    }
};

template <typename T>
struct ReLU {
    void forward(const Tensor<T>& x, Tensor<T>& y) {
        y.resize(x.shape);
        for (size_t i = 0; i < x.values.size(); ++i) y.values[i] = x.values[i] > T(0) ? x.values[i] : T(0);
    }
    void backward(const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>& dx) {
        dx.resize(y.shape);
        for (size_t i = 0; i < y.values.size(); ++i)
            dx.values[i] = y.values[i] > T(0) ? dy.values[i] : T(0);
    }
};

template <typename T>
struct Tanh {
    void forward(const Tensor<T>& x, Tensor<T>& y) {
        y.resize(x.shape);
        for (size_t i = 0; i < x.values.size(); ++i) y.values[i] = std::tanh(x.values[i]);
    }
    void backward(const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>& dx) {
        dx.resize(y.shape);
        for (size_t i = 0; i < y.values.size(); ++i)
            dx.values[i] = dy.values[i] * (T(1) - y.values[i] * y.values[i]);
    }
};

template <typename T>
struct Sigmoid {
    void forward(const Tensor<T>& x, Tensor<T>& y) {
        y.resize(x.shape);
        for (size_t i = 0; i < x.values.size(); ++i) y.values[i] = T(1) / (T(1) + std::exp(-x.values[i]));
    }
    void backward(const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>& dx) {
        dx.resize(y.shape);
        for (size_t i = 0; i < y.values.size(); ++i)
            dx.values[i] = dy.values[i] * y.values[i] * (T(1) - y.values[i]);
    }
};

/// [N,C,H,W] -> [N,C]
template <typename T>
struct GlobalAvgPool {
    void forward(const Tensor<T>& x, Tensor<T>& y) {
        const long n = x.shape[0], c = x.shape[1], hw = x.shape[2] * x.shape[3];
        y.resize({n, c});
        for (long s = 0; s < n; ++s)
            for (long ch = 0; ch < c; ++ch) {
                const T* px = x.data() + (s * c + ch) * hw;
                T acc = 0;
                for (long i = 0; i < hw; ++i) acc += px[i];
                y.values[s * c + ch] = acc / static_cast<T>(hw);
            }
    }
    void backward(const Tensor<T>& x, const Tensor<T>& dy, Tensor<T>& dx) {
        const long n = x.shape[0], c = x.shape[1], hw = x.shape[2] * x.shape[3];
        dx.resize(x.shape);
        for (long s = 0; s < n; ++s)
            for (long ch = 0; ch < c; ++ch) {
                T g = dy.values[s * c + ch] / static_cast<T>(hw);
                T* pdx = dx.values.data() + (s * c + ch) * hw;
                for (long i = 0; i < hw; ++i) pdx[i] = g;
            }
    }
};

/// Feature concatenation [N,A] ++ [N,B] -> [N,A+B].
template <typename T>
struct Concat {
    void forward(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& y) {
        const long n = a.shape[0], da = a.shape[1], db = b.shape[1];
        y.resize({n, da + db});
        for (long s = 0; s < n; ++s) {
            std::copy_n(a.data() + s * da, da, y.data() + s * (da + db));
            std::copy_n(b.data() + s * db, db, y.data() + s * (da + db) + da);
        }
    }
    void backward(const Tensor<T>& dy, long da, long db, Tensor<T>& dxa, Tensor<T>& dxb) {
        const long n = dy.shape[0];
        dxa.resize({n, da});
        dxb.resize({n, db});
        for (long s = 0; s < n; ++s) {
            std::copy_n(dy.data() + s * (da + db), da, dxa.data() + s * da);
            std::copy_n(dy.data() + s * (da + db) + da, db, dxb.data() + s * db);
        }
    }
};

/// Mean cross-entropy over the batch; backward emits d(loss)/d(logits)
/// scaled by an upstream weight.
template <typename T>
struct SoftmaxCrossEntropy {
    std::vector<T> probs;  // cached softmax, [N,K]

    double forward(const Tensor<T>& logits, const std::vector<int>& labels) {
        const long n = logits.shape[0], k = logits.shape[1];
        if (static_cast<long>(labels.size()) != n)
            throw std::invalid_argument("SoftmaxCrossEntropy: label count mismatch");
        probs.assign(n * k, T(0));
        double loss = 0.0;
        for (long s = 0; s < n; ++s) {
            const T* row = logits.data() + s * k;
            T mx = row[0];
            for (long j = 1; j < k; ++j) mx = std::max(mx, row[j]);
            double denom = 0.0;
            for (long j = 0; j < k; ++j) denom += std::exp(static_cast<double>(row[j] - mx));
            for (long j = 0; j < k; ++j)
                probs[s * k + j] = static_cast<T>(std::exp(static_cast<double>(row[j] - mx)) / denom);
            loss -= std::log(static_cast<double>(probs[s * k + labels[s]]) + 1e-12);
        }
        return loss / static_cast<double>(n);
    }

    void backward(const std::vector<int>& labels, long k, T weight, Tensor<T>& dlogits) {
        const long n = static_cast<long>(labels.size());
        dlogits.resize({n, k});
        T invn = weight / static_cast<T>(n);
        for (long s = 0; s < n; ++s)
            for (long j = 0; j < k; ++j)
                dlogits.values[s * k + j] =
                    invn * (probs[s * k + j] - (labels[s] == j ? T(1) : T(0)));
    }
};

/// Mean squared error over every element (samples x components).
template <typename T>
struct MSELoss {
    double forward(const Tensor<T>& pred, const std::vector<T>& target) {
        if (pred.values.size() != target.size())
            throw std::invalid_argument("MSELoss: prediction/target size mismatch");
        double acc = 0.0;
        for (size_t i = 0; i < target.size(); ++i) {
            double d = static_cast<double>(pred.values[i]) - target[i];
            acc += d * d;
        }
        return acc / static_cast<double>(target.size());
    }
    void backward(const Tensor<T>& pred, const std::vector<T>& target, T weight, Tensor<T>& dpred) {
        dpred.resize(pred.shape);
        T scale = T(2) * weight / static_cast<T>(target.size());
        for (size_t i = 0; i < target.size(); ++i)
            dpred.values[i] = scale * (pred.values[i] - target[i]);
    }
};

}  // namespace tiltlab::nn
