#include "qtube/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace qtube::kernels {

namespace {

struct Table {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*weighted_dot)(const double*, const double*, const double*, std::size_t);
  void (*spmv)(std::ptrdiff_t, const int*, const int*, const double*, const double*, double*);
};

constexpr Table kScalar{Isa::Scalar, scalar::dot, scalar::axpy, scalar::weighted_dot,
                        scalar::spmv};
constexpr Table kAvx2{Isa::Avx2, avx2::dot, avx2::axpy, avx2::weighted_dot, avx2::spmv};

bool cpu_has_avx2() noexcept {
#if defined(QTUBE_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* pick_default() noexcept {
  const char* env = std::getenv("QTUBE_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &kScalar;
  return cpu_has_avx2() ? &kAvx2 : &kScalar;
}

std::atomic<const Table*>& table_slot() {
  static std::atomic<const Table*> slot{pick_default()};
  return slot;
}

const Table& table() { return *table_slot().load(std::memory_order_acquire); }

}  // namespace

const char* isa_name(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) noexcept { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() noexcept { return table().isa; }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::invalid_argument("instruction set not supported on this CPU");
  table_slot().store(isa == Isa::Avx2 ? &kAvx2 : &kScalar, std::memory_order_release);
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  table().axpy(alpha, x.data(), y.data(), x.size());
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
  assert(w.size() == a.size() && a.size() == b.size());
  return table().weighted_dot(w.data(), a.data(), b.data(), w.size());
}

void spmv(const CsrView& m, std::span<const double> x, std::span<double> y) {
  assert(static_cast<std::ptrdiff_t>(y.size()) == m.rows);
  table().spmv(m.rows, m.outer.data(), m.inner.data(), m.values.data(), x.data(), y.data());
}

}  // namespace qtube::kernels
