#pragma once

// Data-parallel inner loops shared by the eigensolver and the tube
// quadratures. Each kernel has a scalar reference implementation and an AVX2
// variant; the variant is picked once at runtime from the CPU feature bits
// (override with QTUBE_SIMD=scalar|avx2).

#include <cstddef>
#include <span>

namespace qtube::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
Isa active_isa() noexcept;

/// Switches the dispatch table; throws std::invalid_argument if the CPU lacks
/// the requested instruction set.
void force_isa(Isa isa);

/// Compressed sparse row view. For the symmetric matrices used here a
/// column-major Eigen matrix can be passed as-is.
struct CsrView {
  std::ptrdiff_t rows = 0;
  std::span<const int> outer;
  std::span<const int> inner;
  std::span<const double> values;
};

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// sum_i w_i a_i b_i
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
void spmv(const CsrView& m, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
void spmv(std::ptrdiff_t rows, const int* outer, const int* inner, const double* values,
          const double* x, double* y);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
void spmv(std::ptrdiff_t rows, const int* outer, const int* inner, const double* values,
          const double* x, double* y);
}  // namespace avx2

}  // namespace qtube::kernels
