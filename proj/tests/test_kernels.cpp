#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vip/kernels.hpp"

namespace k = vip::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Restores auto-detection when a test case ends.
struct IsaGuard {
  ~IsaGuard() { k::force_isa(std::nullopt); }
};

}  // namespace

TEST_CASE("isa names round-trip") {
  CHECK(k::parse_isa(k::to_string(k::Isa::scalar)) == k::Isa::scalar);
  CHECK(k::parse_isa(k::to_string(k::Isa::avx2)) == k::Isa::avx2);
  CHECK_FALSE(k::parse_isa("sse9").has_value());
  CHECK(k::isa_supported(k::Isa::scalar));
}

TEST_CASE("scalar kernels on hand values") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const std::vector<double> y{4.0, -5.0, 6.0};
  const auto& t = k::scalar_table();
  CHECK(t.dot(x.data(), y.data(), 3) == 12.0);
  std::vector<double> z = y;
  t.axpy(2.0, x.data(), z.data(), 3);
  CHECK(z == std::vector<double>{6.0, -1.0, 12.0});
  std::vector<double> a(9, 0.0);
  t.syr(0.5, x.data(), a.data(), 3);
  CHECK(a == std::vector<double>{0.5, 1.0, 1.5, 1.0, 2.0, 3.0, 1.5, 3.0, 4.5});
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const k::Table* avx = k::avx2_table();
  if (avx == nullptr || !k::isa_supported(k::Isa::avx2)) {
    MESSAGE("AVX2 unavailable on this machine; equivalence not exercised");
    return;
  }
  const auto& ref = k::scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
    CHECK(std::abs(avx->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= 1e-14 * (scale + 1.0));

    auto z_ref = y;
    auto z_avx = y;
    ref.axpy(-1.7, x.data(), z_ref.data(), n);
    avx->axpy(-1.7, x.data(), z_avx.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(z_avx[i] == doctest::Approx(z_ref[i]).epsilon(1e-15));

    if (n <= 40) {
      std::vector<double> a_ref(n * n, 0.25), a_avx(n * n, 0.25);
      ref.syr(0.3, x.data(), a_ref.data(), n);
      avx->syr(0.3, x.data(), a_avx.data(), n);
      for (std::size_t i = 0; i < n * n; ++i) CHECK(a_avx[i] == doctest::Approx(a_ref[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("force_isa pins dispatch") {
  IsaGuard guard;
  k::force_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  const std::vector<double> x{1.0, 1.0};
  CHECK(k::dot(x, x) == 2.0);
  k::force_isa(std::nullopt);
  if (k::isa_supported(k::Isa::avx2)) {
    CHECK(k::active_isa() == k::Isa::avx2);
  } else {
    CHECK_THROWS(k::force_isa(k::Isa::avx2));
  }
}
