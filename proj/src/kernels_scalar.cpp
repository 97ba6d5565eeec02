#include "qtube/kernels.hpp"

namespace qtube::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void spmv(std::ptrdiff_t rows, const int* outer, const int* inner, const double* values,
          const double* x, double* y) {
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int p = outer[r]; p < outer[r + 1]; ++p) s += values[p] * x[inner[p]];
    y[r] = s;
  }
}

}  // namespace qtube::kernels::scalar
