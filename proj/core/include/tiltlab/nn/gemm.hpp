#pragma once

namespace tiltlab::nn {

/// Row-major C[M,N] = alpha * op(A) * op(B) + beta * C. Dispatches to CBLAS
/// when built with one (forced single-threaded for determinism), otherwise a
/// naive loop with identical semantics.
void gemm(bool trans_a, bool trans_b, long m, long n, long k, float alpha, const float* a, long lda,
          const float* b, long ldb, float beta, float* c, long ldc);
void gemm(bool trans_a, bool trans_b, long m, long n, long k, double alpha, const double* a, long lda,
          const double* b, long ldb, double beta, double* c, long ldc);

}  // namespace tiltlab::nn
