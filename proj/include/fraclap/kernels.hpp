#pragma once

#include <cstddef>
#include <string>

namespace fraclap::kernels {

// Data-parallel inner loops of the lab: dense matrix-vector products against
// the gradient operator, elementwise maps and fixed-order reductions.  Each
// kernel has a scalar reference implementation and vectorized variants
// (AVX2 on x86-64, NEON on aarch64) selected once at startup from CPU
// features; the FRACLAP_KERNELS environment variable ("scalar", "avx2",
// "neon") or set_backend() force a specific one.  All reductions accumulate
// in a fixed order, so results are reproducible run to run.

enum class Backend { scalar, avx2, neon };

Backend active_backend();
void set_backend(Backend b);          // throws parameter_error if unavailable
bool backend_available(Backend b);
std::string backend_name(Backend b);

/// sum_i a_i b_i
double dot(const double* a, const double* b, std::size_t n);

/// y_i += alpha * x_i
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// out_i = a_i * b_i
void mul(const double* a, const double* b, double* out, std::size_t n);

/// sum_i x_i^2
double sq_sum(const double* x, std::size_t n);

/// y_r = sum_{c in [0,ncols)} A[r*lda + c] x_c for r in [0, nrows); A row-major.
void matvec(const double* A, std::size_t lda, std::size_t nrows, std::size_t ncols,
            const double* x, double* y);

}  // namespace fraclap::kernels
