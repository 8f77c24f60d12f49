#include <cstdlib>
#include <cstring>

#include "icp4d/kernels.hpp"
#include "icp4d/log.hpp"

namespace icp4d::kernels {

namespace detail {
const Backend* avx2_backend_impl();
}

const Backend* avx2() {
#if defined(ICP4D_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return detail::avx2_backend_impl();
#endif
  return nullptr;
}

const Backend& active() {
  static const Backend* chosen = [] {
    const char* force = std::getenv("ICP4D_FORCE_SCALAR");
    if (force && std::strcmp(force, "1") == 0) {
      ICP4D_INFO("kernel backend forced to scalar");
      return &scalar();
    }
    const Backend* vec = avx2();
    ICP4D_INFO("kernel backend: " << (vec ? vec->name : scalar().name));
    return vec ? vec : &scalar();
  }();
  return *chosen;
}

}  // namespace icp4d::kernels
