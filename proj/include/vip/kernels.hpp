#pragma once

// Inner-loop arithmetic used by the ridge solves: dot products, axpy and
// symmetric rank-1 updates. A portable scalar reference lives beside an AVX2
// variant; the variant is picked once at runtime from the CPU's features and
// can be pinned for testing.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace vip::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

struct Table {
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // a[:, c] += w * x[c] * x for every column c of the n-by-n column-major a.
  void (*syr)(double w, const double* x, double* a, std::size_t n);
};

const Table& scalar_table();
// nullptr when the AVX2 unit was not compiled in.
const Table* avx2_table();

bool isa_supported(Isa isa);

// The best ISA the running CPU supports, unless pinned by force_isa.
Isa active_isa();
const Table& active_table();

// Pin dispatch to one ISA (nullopt returns to auto-detection). Throws if the
// requested ISA is not supported on this machine.
void force_isa(std::optional<Isa> isa);

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// a is n*n column-major, n = x.size().
void syr(double w, std::span<const double> x, std::span<double> a);

}  // namespace vip::kernels
