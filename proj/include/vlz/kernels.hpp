#pragma once

#include <vector>

#include "vlz/kernel_abi.hpp"

namespace vlz {

enum class KernelBackend { scalar, portable, sse41, avx2, avx512 };

const char* to_string(KernelBackend backend);

struct LaneKernel {
  KernelBackend backend = KernelBackend::scalar;
  int lanes = 1;
  PrequantFn prequantize = nullptr;
  PostquantFn postquantize = nullptr;
};

/// Whether the backend was compiled in and the running CPU supports it.
bool backend_available(KernelBackend backend) noexcept;

/// Forces a specific backend. Throws ErrorCode::config when the backend is unavailable
/// or cannot run `lanes` (native ISA backends support exactly one width).
LaneKernel make_kernel(KernelBackend backend, int lanes);

/// Runtime selection for a lane width: 1 is the scalar reference; 4/8/16 pick the
/// matching ISA when the CPU has it and fall back to the portable lane kernel.
LaneKernel select_kernel(int lanes);

/// Lane widths with native ISA support on this machine, ascending.
std::vector<int> native_lane_widths();

namespace kernels {
// Instrumented scalar reference; counts match the operation table in metrics.hpp.
std::size_t prequantize_scalar_counted(const float* in, std::int32_t* out, std::size_t n, double two_eb,
                                       OpCounters& counters);
void postquantize_scalar_counted(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                                 std::uint16_t* codes, OpCounters& counters);
}  // namespace kernels

}  // namespace vlz
