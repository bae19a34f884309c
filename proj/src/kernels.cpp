#include "dynsel/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace dynsel::kernels {

// Defined in kernels_avx2.cpp / kernels_neon.cpp; null when not compiled in.
const Ops* avx2_ops_or_null();
const Ops* neon_ops_or_null();

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return avx2_ops_or_null() != nullptr && __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool neon_available() { return neon_ops_or_null() != nullptr; }

namespace {

const Ops* lookup(const std::string& name) {
  if (name == "scalar") return &scalar_ops();
  if (name == "avx2" && avx2_available()) return avx2_ops_or_null();
  if (name == "neon" && neon_available()) return neon_ops_or_null();
  return nullptr;
}

const Ops* pick_default() {
  if (const char* env = std::getenv("DYNSEL_KERNELS"); env && *env) {
    if (const Ops* o = lookup(env)) return o;
    std::fprintf(stderr, "warning: kernel backend '%s' unavailable, auto-selecting\n", env);
  }
  if (avx2_available()) return avx2_ops_or_null();
  if (neon_available()) return neon_ops_or_null();
  return &scalar_ops();
}

const Ops*& active_slot() {
  static const Ops* slot = pick_default();
  return slot;
}

}  // namespace

const Ops& active() { return *active_slot(); }

void force_backend(const std::string& name) {
  const Ops* o = lookup(name);
  if (!o) throw std::invalid_argument("unknown or unavailable kernel backend: " + name);
  active_slot() = o;
}

}  // namespace dynsel::kernels
