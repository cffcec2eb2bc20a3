// Width-generic SIMD kernels built on std::experimental::simd. Included by
// one translation unit per target (baseline 128-bit, AVX2) so the native
// vector width is fixed by that TU's compile flags. FRACSTAB_KERNEL_NS names
// the namespace, FRACSTAB_KERNEL_NAME the dispatch label.

#include <cmath>
#include <cstring>
#include <experimental/simd>
#include <limits>

#include "fracstab/kernels.hpp"

namespace fracstab::kernels::FRACSTAB_KERNEL_NS {
namespace {

namespace stdx = std::experimental;
using VD = stdx::native_simd<double>;
using VI = stdx::rebind_simd_t<long long, VD>;
constexpr std::size_t W = VD::size();

inline VI bits_of(VD x) {
    VI r;
    std::memcpy(&r, &x, sizeof r);
    return r;
}

inline VD value_of(VI x) {
    VD r;
    std::memcpy(&r, &x, sizeof r);
    return r;
}

// e^r for |r| <= ln(2)/2, truncated Taylor series; tail < 1e-17 relative.
inline VD exp_reduced(VD r) {
    VD q = VD(1.60590438368216146e-10);  // 1/13!
    q = q * r + VD(2.08767569878681002e-9);
    q = q * r + VD(2.50521083854417188e-8);
    q = q * r + VD(2.75573192239858907e-7);
    q = q * r + VD(2.75573192239858883e-6);
    q = q * r + VD(2.48015873015873016e-5);
    q = q * r + VD(1.98412698412698413e-4);
    q = q * r + VD(1.38888888888888889e-3);
    q = q * r + VD(8.33333333333333333e-3);
    q = q * r + VD(4.16666666666666667e-2);
    q = q * r + VD(1.66666666666666667e-1);
    q = q * r + VD(0.5);
    q = q * r + VD(1.0);
    q = q * r + VD(1.0);
    return q;
}

// x^a for x >= 0 (positive normal or zero), a in (0, ~8]; relative error a
// few 1e-14.  Computed as exp2(a*log2(x)) with an atanh-series log2 and the
// scale factor assembled from exponent bits.
inline VD pow_pos(VD x, double a) {
    const VI xb = bits_of(x);
    VD ke = stdx::static_simd_cast<VD>((xb >> 52) - VI(1023));
    VD m = value_of((xb & VI(0x000FFFFFFFFFFFFFLL)) | VI(0x3FF0000000000000LL));

    // shift mantissa into [sqrt(2)/2, sqrt(2)) so |s| stays small
    const auto hi = m > VD(1.4142135623730951);
    stdx::where(hi, m) = m * VD(0.5);
    stdx::where(hi, ke) = ke + VD(1.0);

    const VD s = (m - VD(1.0)) / (m + VD(1.0));
    const VD z = s * s;
    // log2(m) = s * sum_k (2/ln2)/(2k+1) z^k, truncated after z^9
    VD q = VD(0.151862635988311841);
    q = q * z + VD(0.169728828339878082);
    q = q * z + VD(0.192359338785195134);
    q = q * z + VD(0.221953083213686679);
    q = q * z + VD(0.262308189252538837);
    q = q * z + VD(0.320598897975325186);
    q = q * z + VD(0.412198583111132394);
    q = q * z + VD(0.577078016355585357);
    q = q * z + VD(0.961796693925975545);
    q = q * z + VD(2.88539008177792681);
    const VD log2x = ke + s * q;

    VD y = VD(a) * log2x;
    y = stdx::fmin(stdx::fmax(y, VD(-1020.0)), VD(1020.0));
    const VD n = stdx::floor(y + VD(0.5));
    const VD f = y - n;  // exact; |f| <= 0.5
    const VD er = exp_reduced(f * VD(0.6931471805599453094));
    const VD scale = value_of((stdx::static_simd_cast<VI>(n) + VI(1023)) << 52);

    VD res = er * scale;
    stdx::where(x < VD(std::numeric_limits<double>::min()), res) = VD(0.0);
    stdx::where(x < VD(0.0), res) =
        VD(std::numeric_limits<double>::quiet_NaN());
    return res;
}

void pow_pos_arr(const double* x, std::size_t n, double a, double* out) {
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        VD v;
        v.copy_from(x + i, stdx::element_aligned);
        pow_pos(v, a).copy_to(out + i, stdx::element_aligned);
    }
    for (; i < n; ++i) out[i] = std::pow(x[i], a);
}

void row_pow(const double* u, std::size_t n, double big, double a, double* d,
             double* p, double* pa, double* pa2) {
    const VD vbig(big);
    std::size_t j = 0;
    for (; j + W <= n; j += W) {
        VD uu;
        uu.copy_from(u + j, stdx::element_aligned);
        const VD dd = vbig - uu;
        const VD pp = pow_pos(dd, a);
        const VD ppa = pp * dd;
        dd.copy_to(d + j, stdx::element_aligned);
        pp.copy_to(p + j, stdx::element_aligned);
        ppa.copy_to(pa + j, stdx::element_aligned);
        (ppa * dd).copy_to(pa2 + j, stdx::element_aligned);
    }
    for (; j < n; ++j) {
        const double dj = big - u[j];
        d[j] = dj;
        p[j] = std::pow(dj, a);
        pa[j] = p[j] * dj;
        pa2[j] = pa[j] * dj;
    }
}

double conv_row(const double* d, const double* p, const double* pa,
                const double* pa2, const double* h, const double* hinv,
                const double* hs2inv, const double* g, std::size_t panels,
                double inv_a, double inv_a1, double inv_a2) {
    const VD va(inv_a), va1(inv_a1), va2(inv_a2);
    VD acc(0.0);
    std::size_t j = 1;
    for (; j + W <= panels; j += W) {
        VD pj, pj1, paj, paj1, pa2j, pa2j1, dj, hprev, hiprev, hij, hsj, gm, gj, gj1;
        pj.copy_from(p + j, stdx::element_aligned);
        pj1.copy_from(p + j + 1, stdx::element_aligned);
        paj.copy_from(pa + j, stdx::element_aligned);
        paj1.copy_from(pa + j + 1, stdx::element_aligned);
        pa2j.copy_from(pa2 + j, stdx::element_aligned);
        pa2j1.copy_from(pa2 + j + 1, stdx::element_aligned);
        dj.copy_from(d + j, stdx::element_aligned);
        hprev.copy_from(h + j - 1, stdx::element_aligned);
        hiprev.copy_from(hinv + j - 1, stdx::element_aligned);
        hij.copy_from(hinv + j, stdx::element_aligned);
        hsj.copy_from(hs2inv + j, stdx::element_aligned);
        gm.copy_from(g + j - 1, stdx::element_aligned);
        gj.copy_from(g + j, stdx::element_aligned);
        gj1.copy_from(g + j + 1, stdx::element_aligned);

        const VD m0 = (pj - pj1) * va;
        const VD a1 = (paj - paj1) * va1;
        const VD a2 = (pa2j - pa2j1) * va2;
        const VD m1 = dj * m0 - a1;
        const VD m2 = dj * dj * m0 - VD(2.0) * dj * a1 + a2;
        const VD dd1 = (gj - gm) * hiprev;
        const VD dd2 = ((gj1 - gj) * hij - dd1) * hsj;
        acc += gj * m0 + (dd1 + hprev * dd2) * m1 + dd2 * m2;
    }
    double total = stdx::reduce(acc);
    for (; j < panels; ++j) {
        const double m0 = (p[j] - p[j + 1]) * inv_a;
        const double a1 = (pa[j] - pa[j + 1]) * inv_a1;
        const double a2 = (pa2[j] - pa2[j + 1]) * inv_a2;
        const double m1 = d[j] * m0 - a1;
        const double m2 = d[j] * d[j] * m0 - 2.0 * d[j] * a1 + a2;
        const double dd1 = (g[j] - g[j - 1]) * hinv[j - 1];
        const double dd2 = ((g[j + 1] - g[j]) * hinv[j] - dd1) * hs2inv[j];
        total += g[j] * m0 + (dd1 + h[j - 1] * dd2) * m1 + dd2 * m2;
    }
    return total;
}

double weighted_abs_max(const double* v, const double* w, std::size_t n) {
    VD acc(0.0);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        VD vv, ww;
        vv.copy_from(v + i, stdx::element_aligned);
        ww.copy_from(w + i, stdx::element_aligned);
        acc = stdx::fmax(acc, stdx::fabs(vv) * ww);
    }
    double best = stdx::hmax(acc);
    for (; i < n; ++i) {
        const double t = std::fabs(v[i]) * w[i];
        if (t > best) best = t;
    }
    return best;
}

double abs_max_ratio(const double* a, const double* b, const double* s,
                     std::size_t n) {
    VD acc(0.0);
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        VD va, vb, vs;
        va.copy_from(a + i, stdx::element_aligned);
        vb.copy_from(b + i, stdx::element_aligned);
        vs.copy_from(s + i, stdx::element_aligned);
        acc = stdx::fmax(acc, stdx::fabs(va - vb) / vs);
    }
    double best = stdx::hmax(acc);
    for (; i < n; ++i) {
        const double t = std::fabs(a[i] - b[i]) / s[i];
        if (t > best) best = t;
    }
    return best;
}

constexpr Ops kOps{
    FRACSTAB_KERNEL_NAME, pow_pos_arr,      row_pow,
    conv_row,             weighted_abs_max, abs_max_ratio,
};

}  // namespace

const Ops& ops() { return kOps; }

}  // namespace fracstab::kernels::FRACSTAB_KERNEL_NS
