#include "vip/kernels.hpp"

namespace vip::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += x[k] * y[k];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void syr_scalar(double w, const double* x, double* a, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    const double s = w * x[c];
    double* col = a + c * n;
    for (std::size_t r = 0; r < n; ++r) col[r] += s * x[r];
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table table{dot_scalar, axpy_scalar, syr_scalar};
  return table;
}

}  // namespace vip::kernels
