#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fracstab/kernels.hpp"

using namespace fracstab;

namespace {

std::vector<const kernels::Ops*> simd_variants() {
    std::vector<const kernels::Ops*> v;
    if (const auto* o = kernels::simd128_ops()) v.push_back(o);
    if (const auto* o = kernels::avx2_ops()) v.push_back(o);
    return v;
}

}  // namespace

TEST_CASE("pow_pos matches std::pow across magnitudes") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> logd(-30.0, 3.0);
    std::uniform_real_distribution<double> ad(0.05, 6.0);
    for (const auto* ops : simd_variants()) {
        CAPTURE(ops->name);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const double a = ad(rng);
            std::vector<double> x(131), out(131);
            for (auto& v : x) v = std::exp(logd(rng));
            x[0] = 0.0;
            x[1] = 1.0;
            ops->pow_pos(x.data(), x.size(), a, out.data());
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double ref = std::pow(x[i], a);
                const double rel =
                    ref == 0.0 ? std::fabs(out[i]) : std::fabs(out[i] - ref) / ref;
                worst = std::max(worst, rel);
            }
        }
        CHECK(worst < 2e-13);
    }
}

TEST_CASE("pow_pos handles negative exponents") {
    for (const auto* ops : simd_variants()) {
        std::vector<double> x = {0.25, 1.0, 3.5, 1e-6, 12.0, 0.03, 7.7, 2.2};
        std::vector<double> out(x.size());
        ops->pow_pos(x.data(), x.size(), -0.4, out.data());
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(out[i] == doctest::Approx(std::pow(x[i], -0.4)).epsilon(1e-12));
        }
    }
}

TEST_CASE("row_pow equals scalar reference") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ud(0.0, 2.0);
    std::vector<double> u(97);
    double acc = 0.0;
    for (auto& v : u) {
        v = acc;
        acc += ud(rng) + 1e-6;
    }
    const double big = u.back();
    const double a = 0.62;

    const std::size_t n = u.size();
    std::vector<double> d0(n), p0(n), pa0(n), pb0(n);
    kernels::scalar_ops().row_pow(u.data(), n, big, a, d0.data(), p0.data(), pa0.data(),
                                  pb0.data());

    for (const auto* ops : simd_variants()) {
        CAPTURE(ops->name);
        std::vector<double> d(n), p(n), pa(n), pb(n);
        ops->row_pow(u.data(), n, big, a, d.data(), p.data(), pa.data(), pb.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(d[i] == d0[i]);  // subtraction is exact in every variant
            CHECK(p[i] == doctest::Approx(p0[i]).epsilon(1e-12));
            CHECK(pa[i] == doctest::Approx(pa0[i]).epsilon(1e-12));
            CHECK(pb[i] == doctest::Approx(pb0[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("conv_row equals scalar reference on random panels") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> gd(-3.0, 3.0);
    for (const std::size_t n : {2u, 3u, 8u, 33u, 100u, 257u}) {
        std::vector<double> u(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            u[i] = std::pow(double(i) / double(n), 2.0);
        std::vector<double> h(n), hinv(n), hs2inv(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            h[i] = u[i + 1] - u[i];
            hinv[i] = 1.0 / h[i];
        }
        for (std::size_t i = 1; i < n; ++i) hs2inv[i] = 1.0 / (u[i + 1] - u[i - 1]);
        std::vector<double> g(n + 1);
        for (auto& v : g) v = gd(rng);

        const double alpha = 0.47;
        std::vector<double> d(n + 1), p(n + 1), pa(n + 1), pb(n + 1);
        kernels::scalar_ops().row_pow(u.data(), n + 1, u[n], alpha, d.data(), p.data(),
                                      pa.data(), pb.data());
        const double ref = kernels::scalar_ops().conv_row(
            d.data(), p.data(), pa.data(), pb.data(), h.data(), hinv.data(),
            hs2inv.data(), g.data(), n, 1.0 / alpha, 1.0 / (alpha + 1.0),
            1.0 / (alpha + 2.0));

        for (const auto* ops : simd_variants()) {
            CAPTURE(ops->name);
            CAPTURE(n);
            const double got = ops->conv_row(
                d.data(), p.data(), pa.data(), pb.data(), h.data(), hinv.data(),
                hs2inv.data(), g.data(), n, 1.0 / alpha, 1.0 / (alpha + 1.0),
                1.0 / (alpha + 2.0));
            CHECK(got == doctest::Approx(ref).epsilon(1e-11));
        }
    }
}

TEST_CASE("reductions equal scalar reference") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> vd(-5.0, 5.0);
    std::uniform_real_distribution<double> sd(0.1, 4.0);
    for (const std::size_t n : {1u, 2u, 5u, 64u, 111u}) {
        std::vector<double> a(n), b(n), s(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = vd(rng);
            b[i] = vd(rng);
            s[i] = sd(rng);
            w[i] = sd(rng);
        }
        const double ref1 = kernels::scalar_ops().weighted_abs_max(a.data(), w.data(), n);
        const double ref2 =
            kernels::scalar_ops().abs_max_ratio(a.data(), b.data(), s.data(), n);
        for (const auto* ops : simd_variants()) {
            CHECK(ops->weighted_abs_max(a.data(), w.data(), n) == ref1);
            CHECK(ops->abs_max_ratio(a.data(), b.data(), s.data(), n) ==
                  doctest::Approx(ref2).epsilon(1e-15));
        }
    }
}

TEST_CASE("dispatch force and restore") {
    kernels::force("scalar");
    CHECK(kernels::active_name() == "scalar");
    kernels::force("auto");
    CHECK((kernels::active_name() == "avx2" || kernels::active_name() == "simd128" ||
           kernels::active_name() == "scalar"));
    CHECK_THROWS(kernels::force("nope"));
}
