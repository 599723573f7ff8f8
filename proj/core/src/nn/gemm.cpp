#include "tiltlab/nn/gemm.hpp"

#include <mutex>

#if TILTLAB_WITH_CBLAS

// Self-declared CBLAS entry points (ABI-stable; avoids header variants).
extern "C" {
void cblas_sgemm(int order, int trans_a, int trans_b, int m, int n, int k, float alpha, const float* a,
                 int lda, const float* b, int ldb, float beta, float* c, int ldc);
void cblas_dgemm(int order, int trans_a, int trans_b, int m, int n, int k, double alpha, const double* a,
                 int lda, const double* b, int ldb, double beta, double* c, int ldc);
}
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace {
constexpr int kRowMajor = 101;
constexpr int kNoTrans = 111;
constexpr int kTrans = 112;

void force_single_thread() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (openblas_set_num_threads) openblas_set_num_threads(1);
    });
}
}  // namespace

namespace tiltlab::nn {

void gemm(bool trans_a, bool trans_b, long m, long n, long k, float alpha, const float* a, long lda,
          const float* b, long ldb, float beta, float* c, long ldc) {
    force_single_thread();
    cblas_sgemm(kRowMajor, trans_a ? kTrans : kNoTrans, trans_b ? kTrans : kNoTrans, static_cast<int>(m),
                static_cast<int>(n), static_cast<int>(k), alpha, a, static_cast<int>(lda), b,
                static_cast<int>(ldb), beta, c, static_cast<int>(ldc));
}

void gemm(bool trans_a, bool trans_b, long m, long n, long k, double alpha, const double* a, long lda,
          const double* b, long ldb, double beta, double* c, long ldc) {
    force_single_thread();
    cblas_dgemm(kRowMajor, trans_a ? kTrans : kNoTrans, trans_b ? kTrans : kNoTrans, static_cast<int>(m),
                static_cast<int>(n), static_cast<int>(k), alpha, a, static_cast<int>(lda), b,
                static_cast<int>(ldb), beta, c, static_cast<int>(ldc));
}

}  // namespace tiltlab::nn

#else  // !TILTLAB_WITH_CBLAS

namespace tiltlab::nn {

namespace {

template <typename T>
void gemm_naive(bool trans_a, bool trans_b, long m, long n, long k, T alpha, const T* a, long lda,
                const T* b, long ldb, T beta, T* c, long ldc) {
    auto at = [&](long i, long j) { return trans_a ? a[j * lda + i] : a[i * lda + j]; };
    auto bt = [&](long i, long j) { return trans_b ? b[j * ldb + i] : b[i * ldb + j]; };
    for (long i = 0; i < m; ++i) {
        for (long j = 0; j < n; ++j) {
            T acc = 0;
            for (long p = 0; p < k; ++p) acc += at(i, p) * bt(p, j);
            // beta == 0 overwrites without reading (BLAS semantics).
            c[i * ldc + j] = alpha * acc + (beta == T(0) ? T(0) : beta * c[i * ldc + j]);
        }
    }
}

}  // namespace

void gemm(bool trans_a, bool trans_b, long m, long n, long k, float alpha, const float* a, long lda,
          const float* b, long ldb, float beta, float* c, long ldc) {
    gemm_naive(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, long m, long n, long k, double alpha, const double* a, long lda,
          const double* b, long ldb, double beta, double* c, long ldc) {
    gemm_naive(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

}  // namespace tiltlab::nn

#endif
