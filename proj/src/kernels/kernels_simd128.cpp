// Baseline-width SIMD kernels: SSE2 on x86-64, NEON on aarch64.

#define FRACSTAB_KERNEL_NS simd128
#define FRACSTAB_KERNEL_NAME "simd128"
#include "kernels_simd.ipp"
