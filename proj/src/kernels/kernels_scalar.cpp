#include "fracstab/kernels.hpp"

#include <cmath>

namespace fracstab::kernels {
namespace {

void pow_pos_scalar(const double* x, std::size_t n, double a, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(x[i], a);
}

void row_pow_scalar(const double* u, std::size_t n, double big, double a,
                    double* d, double* p, double* pa, double* pa2) {
    for (std::size_t j = 0; j < n; ++j) {
        const double dj = big - u[j];
        d[j] = dj;
        p[j] = std::pow(dj, a);
        pa[j] = p[j] * dj;
        pa2[j] = pa[j] * dj;
    }
}

double conv_row_scalar(const double* d, const double* p, const double* pa,
                       const double* pa2, const double* h, const double* hinv,
                       const double* hs2inv, const double* g, std::size_t panels,
                       double inv_a, double inv_a1, double inv_a2) {
    double acc = 0.0;
    for (std::size_t j = 1; j < panels; ++j) {
        const double m0 = (p[j] - p[j + 1]) * inv_a;
        const double a1 = (pa[j] - pa[j + 1]) * inv_a1;
        const double a2 = (pa2[j] - pa2[j + 1]) * inv_a2;
        const double m1 = d[j] * m0 - a1;
        const double m2 = d[j] * d[j] * m0 - 2.0 * d[j] * a1 + a2;
        const double dd1 = (g[j] - g[j - 1]) * hinv[j - 1];
        const double dd2 = ((g[j + 1] - g[j]) * hinv[j] - dd1) * hs2inv[j];
        acc += g[j] * m0 + (dd1 + h[j - 1] * dd2) * m1 + dd2 * m2;
    }
    return acc;
}

double weighted_abs_max_scalar(const double* v, const double* w, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::fabs(v[i]) * w[i];
        if (t > best) best = t;
    }
    return best;
}

double abs_max_ratio_scalar(const double* a, const double* b, const double* s,
                            std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::fabs(a[i] - b[i]) / s[i];
        if (t > best) best = t;
    }
    return best;
}

constexpr Ops kScalarOps{
    "scalar",          pow_pos_scalar,       row_pow_scalar,
    conv_row_scalar,   weighted_abs_max_scalar, abs_max_ratio_scalar,
};

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

}  // namespace fracstab::kernels
