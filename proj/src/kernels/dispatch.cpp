#include <atomic>
#include <cassert>

#include "vip/error.hpp"
#include "vip/kernels.hpp"

namespace vip::kernels {

#ifndef VIP_HAVE_AVX2_TU
const Table* avx2_table() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

// -1 means auto-detect.
std::atomic<int> g_forced{-1};

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  return std::nullopt;
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2: {
      static const bool ok = avx2_table() != nullptr && cpu_has_avx2();
      return ok;
    }
  }
  return false;
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

const Table& active_table() {
  return active_isa() == Isa::avx2 ? *avx2_table() : scalar_table();
}

void force_isa(std::optional<Isa> isa) {
  if (isa && !isa_supported(*isa)) {
    throw Error("kernel ISA '" + std::string(to_string(*isa)) + "' is not supported on this CPU");
  }
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active_table().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_table().axpy(alpha, x.data(), y.data(), x.size());
}

void syr(double w, std::span<const double> x, std::span<double> a) {
  assert(a.size() == x.size() * x.size());
  active_table().syr(w, x.data(), a.data(), x.size());
}

}  // namespace vip::kernels
