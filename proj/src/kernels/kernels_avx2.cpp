// AVX2+FMA kernels. CMake adds -mavx2 -mfma on x86-64 only; elsewhere the
// guard compiles this TU down to nothing and dispatch skips the variant.

#if defined(__AVX2__) && defined(__FMA__)
#define FRACSTAB_KERNEL_NS avx2
#define FRACSTAB_KERNEL_NAME "avx2"
#include "kernels_simd.ipp"
#endif
