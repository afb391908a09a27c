#include <cmath>
#include <vector>

#include <doctest.h>

#include "fraclap/kernels.hpp"

namespace k = fraclap::kernels;

namespace {

struct Rng {
  uint64_t state = 0x2545f4914f6cdd1dull;
  double next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return (state >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0;
  }
};

std::vector<double> random_vec(size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.next();
  return v;
}

std::vector<k::Backend> available_backends() {
  std::vector<k::Backend> out = {k::Backend::scalar};
  for (k::Backend b : {k::Backend::avx2, k::Backend::neon})
    if (k::backend_available(b)) out.push_back(b);
  return out;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar reference sanity") {
    k::Backend saved = k::active_backend();
    k::set_backend(k::Backend::scalar);
    std::vector<double> a = {1, 2, 3, 4, 5};
    std::vector<double> b = {2, 0, 1, -1, 3};
    CHECK(k::dot(a.data(), b.data(), 5) == 16.0);
    std::vector<double> y = {1, 1, 1, 1, 1};
    k::axpy(2.0, a.data(), y.data(), 5);
    CHECK(y[4] == 11.0);
    CHECK(k::sq_sum(a.data(), 5) == 55.0);
    std::vector<double> prod(5);
    k::mul(a.data(), b.data(), prod.data(), 5);
    CHECK(prod[3] == -4.0);
    // 2x3 matvec
    std::vector<double> A = {1, 2, 3, 4, 5, 6};
    std::vector<double> x = {1, -1, 2};
    std::vector<double> out(2);
    k::matvec(A.data(), 3, 2, 3, x.data(), out.data());
    CHECK(out[0] == 5.0);
    CHECK(out[1] == 11.0);
    k::set_backend(saved);
  }

  TEST_CASE("vector backends agree with the scalar reference") {
    k::Backend saved = k::active_backend();
    Rng rng;
    for (size_t n : {1u, 5u, 16u, 64u, 257u, 1023u}) {
      std::vector<double> a = random_vec(n, rng);
      std::vector<double> b = random_vec(n, rng);

      k::set_backend(k::Backend::scalar);
      double dot_ref = k::dot(a.data(), b.data(), n);
      double sq_ref = k::sq_sum(a.data(), n);
      std::vector<double> axpy_ref = b;
      k::axpy(0.37, a.data(), axpy_ref.data(), n);
      std::vector<double> mul_ref(n);
      k::mul(a.data(), b.data(), mul_ref.data(), n);

      for (k::Backend backend : available_backends()) {
        k::set_backend(backend);
        CHECK(k::dot(a.data(), b.data(), n) == doctest::Approx(dot_ref).epsilon(1e-13));
        CHECK(k::sq_sum(a.data(), n) == doctest::Approx(sq_ref).epsilon(1e-13));
        std::vector<double> y = b;
        k::axpy(0.37, a.data(), y.data(), n);
        std::vector<double> prod(n);
        k::mul(a.data(), b.data(), prod.data(), n);
        for (size_t i = 0; i < n; ++i) {
          CHECK(y[i] == doctest::Approx(axpy_ref[i]).epsilon(1e-15));
          CHECK(prod[i] == mul_ref[i]);  // plain product, bitwise
        }
      }
    }
    k::set_backend(saved);
  }

  TEST_CASE("matvec equivalence across backends") {
    k::Backend saved = k::active_backend();
    Rng rng;
    size_t rows = 37, cols = 129;
    std::vector<double> A = random_vec(rows * cols, rng);
    std::vector<double> x = random_vec(cols, rng);

    k::set_backend(k::Backend::scalar);
    std::vector<double> ref(rows);
    k::matvec(A.data(), cols, rows, cols, x.data(), ref.data());

    for (k::Backend backend : available_backends()) {
      k::set_backend(backend);
      std::vector<double> y(rows);
      k::matvec(A.data(), cols, rows, cols, x.data(), y.data());
      for (size_t r = 0; r < rows; ++r) CHECK(y[r] == doctest::Approx(ref[r]).epsilon(1e-13));
    }
    k::set_backend(saved);
  }

  TEST_CASE("reductions are reproducible run to run") {
    Rng rng;
    std::vector<double> a = random_vec(1001, rng);
    std::vector<double> b = random_vec(1001, rng);
    double first = k::dot(a.data(), b.data(), a.size());
    for (int i = 0; i < 8; ++i) CHECK(k::dot(a.data(), b.data(), a.size()) == first);
  }
}
