#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "sdlab/kernels/kernels.hpp"

namespace sdlab::kernels {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool avx512_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx512f");
#else
  return false;
#endif
}

namespace {

const Kernels* pick(const std::string& name) {
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx512") {
    if (!avx512_supported())
      throw std::runtime_error("kernels: avx512 not supported on this host");
    return &avx512();
  }
  if (name == "avx2") {
    if (!avx2_supported())
      throw std::runtime_error("kernels: avx2 not supported on this host");
    return &avx2();
  }
#endif
  if (name == "scalar") return &scalar();
  if (name == "auto") {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx512_supported()) return &avx512();
    if (avx2_supported()) return &avx2();
#endif
    return &scalar();
  }
  throw std::runtime_error("kernels: unknown backend '" + name + "'");
}

const Kernels* initial() {
  const char* env = std::getenv("SDLAB_KERNELS");
  return pick(env != nullptr ? env : "auto");
}

std::atomic<const Kernels*> g_active{nullptr};

}  // namespace

const Kernels& active() {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (k == nullptr) {
    k = initial();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

void force_backend(const std::string& name) {
  g_active.store(pick(name), std::memory_order_release);
}

std::vector<std::string> available_backends() {
  std::vector<std::string> out{"scalar"};
  if (avx2_supported()) out.emplace_back("avx2");
  if (avx512_supported()) out.emplace_back("avx512");
  return out;
}

}  // namespace sdlab::kernels
