#include <atomic>
#include <cstdlib>
#include <string>

#include "tvha/errors.hpp"
#include "tvha/kernels.hpp"

namespace tvha::kernels {

#if defined(__x86_64__) && defined(TVHA_HAVE_AVX2)
const Ops* avx2_ops_impl();  // defined in kernels_avx2.cpp
#endif

const Ops* avx2_ops() {
#if defined(__x86_64__) && defined(TVHA_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return avx2_ops_impl();
  }
#endif
  return nullptr;
}

namespace {

const Ops* resolve_default() {
  if (const char* env = std::getenv("TVHA_KERNELS")) {
    const std::string name(env);
    if (name == "scalar") return &scalar_ops();
    if (name == "avx2" && avx2_ops()) return avx2_ops();
    // Unknown or unavailable request: fall through to the best lane.
  }
  if (const Ops* v = avx2_ops()) return v;
  return &scalar_ops();
}

std::atomic<const Ops*>& active_slot() {
  static std::atomic<const Ops*> slot{resolve_default()};
  return slot;
}

}  // namespace

const Ops& active() { return *active_slot().load(std::memory_order_relaxed); }

void select(std::string_view name) {
  if (name == "scalar") {
    active_slot().store(&scalar_ops(), std::memory_order_relaxed);
    return;
  }
  if (name == "avx2") {
    if (const Ops* v = avx2_ops()) {
      active_slot().store(v, std::memory_order_relaxed);
      return;
    }
    throw DomainError("avx2 kernels unavailable on this machine/build");
  }
  throw DomainError("unknown kernel lane: " + std::string(name));
}

}  // namespace tvha::kernels
