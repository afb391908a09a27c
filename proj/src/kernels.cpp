#include "fraclap/kernels.hpp"

#include <cstdlib>
#include <mutex>

#include "fraclap/errors.hpp"

namespace fraclap::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  // four independent accumulators, combined in fixed order; mirrors the
  // vector variants so scalar/simd agreement stays tight
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((s0 + s1) + (s2 + s3)) + tail;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double sq_sum_scalar(const double* x, std::size_t n) { return dot_scalar(x, x, n); }

void matvec_scalar(const double* A, std::size_t lda, std::size_t nrows, std::size_t ncols,
                   const double* x, double* y) {
  for (std::size_t r = 0; r < nrows; ++r) y[r] = dot_scalar(A + r * lda, x, ncols);
}

#if defined(FRACLAP_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void mul_avx2(const double* a, const double* b, double* out, std::size_t n);
double sq_sum_avx2(const double* x, std::size_t n);
void matvec_avx2(const double* A, std::size_t lda, std::size_t nrows, std::size_t ncols,
                 const double* x, double* y);
#endif
#if defined(FRACLAP_HAVE_NEON)
double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
void mul_neon(const double* a, const double* b, double* out, std::size_t n);
double sq_sum_neon(const double* x, std::size_t n);
void matvec_neon(const double* A, std::size_t lda, std::size_t nrows, std::size_t ncols,
                 const double* x, double* y);
#endif

}  // namespace detail

namespace {

struct Dispatch {
  Backend backend;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*mul)(const double*, const double*, double*, std::size_t);
  double (*sq_sum)(const double*, std::size_t);
  void (*matvec)(const double*, std::size_t, std::size_t, std::size_t, const double*, double*);
};

constexpr Dispatch kScalar{Backend::scalar, detail::dot_scalar,    detail::axpy_scalar,
                           detail::mul_scalar, detail::sq_sum_scalar, detail::matvec_scalar};

#if defined(FRACLAP_HAVE_AVX2)
constexpr Dispatch kAvx2{Backend::avx2, detail::dot_avx2,    detail::axpy_avx2,
                         detail::mul_avx2, detail::sq_sum_avx2, detail::matvec_avx2};
#endif
#if defined(FRACLAP_HAVE_NEON)
constexpr Dispatch kNeon{Backend::neon, detail::dot_neon,    detail::axpy_neon,
                         detail::mul_neon, detail::sq_sum_neon, detail::matvec_neon};
#endif

bool cpu_has(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(FRACLAP_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(FRACLAP_HAVE_NEON)
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

const Dispatch* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &kScalar;
    case Backend::avx2:
#if defined(FRACLAP_HAVE_AVX2)
      return &kAvx2;
#else
      return nullptr;
#endif
    case Backend::neon:
#if defined(FRACLAP_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Backend pick_default() {
  if (const char* env = std::getenv("FRACLAP_KERNELS")) {
    std::string want(env);
    Backend b = Backend::scalar;
    if (want == "avx2") b = Backend::avx2;
    else if (want == "neon") b = Backend::neon;
    else if (want != "scalar") return cpu_has(Backend::avx2) ? Backend::avx2
                                      : cpu_has(Backend::neon) ? Backend::neon : Backend::scalar;
    if (cpu_has(b)) return b;
    return Backend::scalar;
  }
  if (cpu_has(Backend::avx2)) return Backend::avx2;
  if (cpu_has(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

const Dispatch* g_active = nullptr;
std::once_flag g_init;

const Dispatch& active() {
  std::call_once(g_init, [] { g_active = table_for(pick_default()); });
  return *g_active;
}

}  // namespace

Backend active_backend() { return active().backend; }

bool backend_available(Backend b) { return cpu_has(b) && table_for(b) != nullptr; }

void set_backend(Backend b) {
  active();  // ensure initialized
  const Dispatch* t = table_for(b);
  if (t == nullptr || !cpu_has(b))
    throw parameter_error("kernel backend '" + backend_name(b) + "' is not available on this machine");
  g_active = t;
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
void mul(const double* a, const double* b, double* out, std::size_t n) { active().mul(a, b, out, n); }
double sq_sum(const double* x, std::size_t n) { return active().sq_sum(x, n); }
void matvec(const double* A, std::size_t lda, std::size_t nrows, std::size_t ncols, const double* x,
            double* y) {
  active().matvec(A, lda, nrows, ncols, x, y);
}

}  // namespace fraclap::kernels
