#include <string>

#include "kernels/backends.hpp"
#include "vlz/error.hpp"
#include "vlz/kernels.hpp"

namespace vlz {

const char* to_string(KernelBackend backend) {
  switch (backend) {
    case KernelBackend::scalar: return "scalar";
    case KernelBackend::portable: return "portable";
    case KernelBackend::sse41: return "sse4.1";
    case KernelBackend::avx2: return "avx2";
    case KernelBackend::avx512: return "avx512f";
  }
  return "unknown";
}

bool backend_available(KernelBackend backend) noexcept {
  switch (backend) {
    case KernelBackend::scalar:
    case KernelBackend::portable:
      return true;
#if defined(VLZ_X86_KERNELS)
    case KernelBackend::sse41: return __builtin_cpu_supports("sse4.1");
    case KernelBackend::avx2: return __builtin_cpu_supports("avx2");
    case KernelBackend::avx512: return __builtin_cpu_supports("avx512f");
#else
    default: return false;
#endif
  }
  return false;
}

namespace {

int native_width(KernelBackend backend) {
  switch (backend) {
    case KernelBackend::sse41: return 4;
    case KernelBackend::avx2: return 8;
    case KernelBackend::avx512: return 16;
    case KernelBackend::scalar: return 1;
    case KernelBackend::portable: return 0;
  }
  return 0;
}

}  // namespace

LaneKernel make_kernel(KernelBackend backend, int lanes) {
  if (!backend_available(backend)) {
    throw Error(ErrorCode::config, std::string("kernel backend ") + to_string(backend) + " is not available on this CPU");
  }
  const int width = native_width(backend);
  if (width != 0 && width != lanes) {
    throw Error(ErrorCode::config, std::string("backend ") + to_string(backend) + " runs " + std::to_string(width) +
                                       " lanes, requested " + std::to_string(lanes));
  }
  LaneKernel k;
  k.backend = backend;
  k.lanes = lanes;
  switch (backend) {
    case KernelBackend::scalar:
      k.prequantize = kernels::prequantize_scalar;
      k.postquantize = kernels::postquantize_scalar;
      return k;
    case KernelBackend::portable:
      switch (lanes) {
        case 4:
          k.prequantize = kernels::prequantize_portable4;
          k.postquantize = kernels::postquantize_portable4;
          return k;
        case 8:
          k.prequantize = kernels::prequantize_portable8;
          k.postquantize = kernels::postquantize_portable8;
          return k;
        case 16:
          k.prequantize = kernels::prequantize_portable16;
          k.postquantize = kernels::postquantize_portable16;
          return k;
        default:
          throw Error(ErrorCode::config, "portable kernel supports 4, 8 or 16 lanes, got " + std::to_string(lanes));
      }
#if defined(VLZ_X86_KERNELS)
    case KernelBackend::sse41:
      k.prequantize = kernels::prequantize_sse41;
      k.postquantize = kernels::postquantize_sse41;
      return k;
    case KernelBackend::avx2:
      k.prequantize = kernels::prequantize_avx2;
      k.postquantize = kernels::postquantize_avx2;
      return k;
    case KernelBackend::avx512:
      k.prequantize = kernels::prequantize_avx512;
      k.postquantize = kernels::postquantize_avx512;
      return k;
#else
    default:
      break;
#endif
  }
  throw Error(ErrorCode::internal, "unhandled kernel backend");
}

LaneKernel select_kernel(int lanes) {
  switch (lanes) {
    case 1: return make_kernel(KernelBackend::scalar, 1);
    case 4:
      return backend_available(KernelBackend::sse41) ? make_kernel(KernelBackend::sse41, 4)
                                                     : make_kernel(KernelBackend::portable, 4);
    case 8:
      return backend_available(KernelBackend::avx2) ? make_kernel(KernelBackend::avx2, 8)
                                                    : make_kernel(KernelBackend::portable, 8);
    case 16:
      return backend_available(KernelBackend::avx512) ? make_kernel(KernelBackend::avx512, 16)
                                                      : make_kernel(KernelBackend::portable, 16);
    default:
      throw Error(ErrorCode::config, "unsupported lane width " + std::to_string(lanes));
  }
}

std::vector<int> native_lane_widths() {
  std::vector<int> widths;
  if (backend_available(KernelBackend::sse41)) widths.push_back(4);
  if (backend_available(KernelBackend::avx2)) widths.push_back(8);
  if (backend_available(KernelBackend::avx512)) widths.push_back(16);
  return widths;
}

}  // namespace vlz
