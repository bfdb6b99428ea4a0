#pragma once

// Internal backend entry points. Kept free of inline code (see kernel_abi.hpp).

#include "vlz/kernel_abi.hpp"

namespace vlz::kernels {

std::size_t prequantize_scalar(const float* in, std::int32_t* out, std::size_t n, double two_eb);
void postquantize_scalar(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                         std::uint16_t* codes);

std::size_t prequantize_portable4(const float* in, std::int32_t* out, std::size_t n, double two_eb);
std::size_t prequantize_portable8(const float* in, std::int32_t* out, std::size_t n, double two_eb);
std::size_t prequantize_portable16(const float* in, std::int32_t* out, std::size_t n, double two_eb);
void postquantize_portable4(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                            std::uint16_t* codes);
void postquantize_portable8(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                            std::uint16_t* codes);
void postquantize_portable16(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                             std::uint16_t* codes);

#if defined(VLZ_X86_KERNELS)
std::size_t prequantize_sse41(const float* in, std::int32_t* out, std::size_t n, double two_eb);
void postquantize_sse41(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                        std::uint16_t* codes);
std::size_t prequantize_avx2(const float* in, std::int32_t* out, std::size_t n, double two_eb);
void postquantize_avx2(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius, std::uint16_t* codes);
std::size_t prequantize_avx512(const float* in, std::int32_t* out, std::size_t n, double two_eb);
void postquantize_avx512(const std::int32_t* tile, const TileGeometry& geom, std::int32_t radius,
                         std::uint16_t* codes);
#endif

}  // namespace vlz::kernels
