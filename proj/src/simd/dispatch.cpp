#include <atomic>
#include <cstdlib>
#include <string>

#include "afc/error.hpp"
#include "afc/simd/kernels.hpp"

namespace afc::simd {

#if defined(AFC_HAVE_AVX2)
const KernelTable* avx2_kernels_impl();
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(AFC_HAVE_AVX2)
  return avx2_kernels_impl();
#else
  return nullptr;
#endif
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(AFC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("AFC_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return &scalar_kernels();
  }
  if (cpu_supports(Isa::avx2) && avx2_kernels() != nullptr) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{detect()};
  return slot;
}

}  // namespace

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
  if (!cpu_supports(isa)) {
    throw Error(Errc::invalid_argument, std::string("ISA not available: ") + std::string(to_string(isa)));
  }
  const KernelTable* table = isa == Isa::avx2 ? avx2_kernels() : &scalar_kernels();
  if (table == nullptr) throw Error(Errc::invalid_argument, "ISA not compiled in");
  active_slot().store(table, std::memory_order_release);
}

}  // namespace afc::simd
