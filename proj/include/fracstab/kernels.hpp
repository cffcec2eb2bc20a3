#pragma once

#include <cstddef>
#include <string_view>

// Inner-loop kernels behind the fractional-integral convolution and the
// weighted norms. A scalar reference implementation always exists; SIMD
// variants (128-bit baseline: SSE2/NEON, and AVX2+FMA on x86-64) are
// selected at runtime and equivalence-tested against the reference.

namespace fracstab::kernels {

struct Ops {
    const char* name;

    // out[i] = x[i]^a for x[i] >= 0 (a may be negative).  x == 0 maps to 0.
    void (*pow_pos)(const double* x, std::size_t n, double a, double* out);

    // d[j] = big - u[j], p[j] = d[j]^a, pa[j] = p[j]*d[j], pa2[j] = pa[j]*d[j]
    void (*row_pow)(const double* u, std::size_t n, double big, double a,
                    double* d, double* p, double* pa, double* pa2);

    // Interior panels j in [1, panels) of one product-integration row with a
    // quadratic interpolant through nodes {j-1, j, j+1}: per panel, with
    // kernel moments m0 = (p[j]-p[j+1])*inv_a, A1 = (pa[j]-pa[j+1])*inv_a1,
    // A2 = (pa2[j]-pa2[j+1])*inv_a2, m1 = d[j]*m0 - A1,
    // m2 = d[j]^2*m0 - 2*d[j]*A1 + A2, and divided differences
    // dd1 = (g[j]-g[j-1])*hinv[j-1], dd2 = ((g[j+1]-g[j])*hinv[j]-dd1)*hs2inv[j],
    // accumulate g[j]*m0 + (dd1 + h[j-1]*dd2)*m1 + dd2*m2.
    // Panel 0 is the caller's (stencil choice differs at the endpoint).
    double (*conv_row)(const double* d, const double* p, const double* pa,
                       const double* pa2, const double* h, const double* hinv,
                       const double* hs2inv, const double* g, std::size_t panels,
                       double inv_a, double inv_a1, double inv_a2);

    // max_i |v[i]| * w[i]
    double (*weighted_abs_max)(const double* v, const double* w, std::size_t n);

    // max_i |a[i] - b[i]| / s[i]
    double (*abs_max_ratio)(const double* a, const double* b, const double* s,
                            std::size_t n);
};

const Ops& scalar_ops();
const Ops* simd128_ops();  // SSE2 / NEON width; null only if not compiled in
const Ops* avx2_ops();     // null when unsupported by the build or target

// Runtime-selected table. Default picks the widest variant the CPU supports;
// FRACSTAB_KERNEL=scalar|simd128|avx2|auto overrides, as does force().
const Ops& active();
void force(std::string_view name);
std::string_view active_name();

}  // namespace fracstab::kernels
