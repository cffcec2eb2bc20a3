#include "fracstab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fracstab {

namespace {

bool eval_ok(double v) { return std::isfinite(v); }

// guarded call: any exception or non-finite value is a diagnostic, not a crash
template <typename F>
bool try_eval(F&& fn, double& out) {
    try {
        out = fn();
    } catch (...) {
        return false;
    }
    return eval_ok(out);
}

}  // namespace

std::vector<Diagnostic> validate_problem(const ProblemSpec& spec,
                                         std::span<const double> mesh) {
    std::vector<Diagnostic> diags;
    auto add = [&](const char* hyp, std::string msg, double at) {
        diags.push_back({hyp, std::move(msg), at});
    };
    if (mesh.size() < 2) {
        add("mesh", "mesh needs at least two points", 0.0);
        return diags;
    }
    for (std::size_t i = 1; i < mesh.size(); ++i) {
        if (!(mesh[i] > mesh[i - 1])) {
            add("mesh", "mesh is not sorted strictly ascending", mesh[i]);
            return diags;
        }
    }

    const double a = spec.psi.domain_start;
    const double scale = mesh.back() - mesh.front();

    bool psi_mono_reported = false, psi_pos_reported = false, psi_fd_reported = false;
    bool delta_hi_reported = false, delta_lo_reported = false;
    bool sigma_pos_reported = false, sigma_mono_reported = false, sigma_band_reported = false;

    double prev_psi = 0.0, prev_sigma = 0.0;
    bool have_prev_psi = false, have_prev_sigma = false;

    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double x = mesh[i];

        double psi_v = 0.0, psi_d = 0.0;
        if (!try_eval([&] { return spec.psi.psi(x); }, psi_v)) {
            add("psi evaluable", "psi fails to evaluate", x);
            return diags;
        }
        if (!try_eval([&] { return spec.psi.psi_prime(x); }, psi_d)) {
            add("psi_prime evaluable", "psi_prime fails to evaluate", x);
            return diags;
        }
        if (!psi_pos_reported && !(psi_d > 0.0)) {
            add("positivity of psi'", "psi_prime is not strictly positive", x);
            psi_pos_reported = true;
        }
        if (have_prev_psi && !psi_mono_reported && !(psi_v > prev_psi)) {
            add("monotonicity of psi", "psi is not strictly increasing", x);
            psi_mono_reported = true;
        }
        prev_psi = psi_v;
        have_prev_psi = true;

        // central-difference consistency of psi' with psi
        if (!psi_fd_reported && i > 0 && i + 1 < mesh.size()) {
            const double h = 1e-5 * scale;
            double lo = 0.0, hi = 0.0;
            if (try_eval([&] { return spec.psi.psi(x - h); }, lo) &&
                try_eval([&] { return spec.psi.psi(x + h); }, hi)) {
                const double fd = (hi - lo) / (2.0 * h);
                if (std::fabs(fd - psi_d) > 1e-3 * std::max(1.0, std::fabs(psi_d))) {
                    add("psi'/psi consistency",
                        "central difference of psi disagrees with psi_prime", x);
                    psi_fd_reported = true;
                }
            }
        }

        double dv = 0.0;
        if (!try_eval([&] { return spec.delta.delta(x); }, dv)) {
            add("delta evaluable", "delta fails to evaluate", x);
            return diags;
        }
        if (!delta_hi_reported && dv > x + 1e-12 * std::max(1.0, std::fabs(x))) {
            add("delta(t) <= t", "delay exceeds argument", x);
            delta_hi_reported = true;
        }
        if (!delta_lo_reported && dv < a - 1e-12 * std::max(1.0, std::fabs(a))) {
            add("delta(t) >= a", "delayed argument leaves the domain", x);
            delta_lo_reported = true;
        }

        double sv = 0.0;
        if (!try_eval([&] { return spec.sigma.sigma(x); }, sv)) {
            add("sigma evaluable", "sigma fails to evaluate", x);
            return diags;
        }
        if (!sigma_pos_reported && !(sv > 0.0)) {
            add("sigma > 0", "sigma non-positive at sampled points", x);
            sigma_pos_reported = true;
        }
        if (have_prev_sigma && !sigma_mono_reported &&
            sv < prev_sigma * (1.0 - 1e-12) - 1e-300) {
            add("sigma non-decreasing", "sigma not non-decreasing", x);
            sigma_mono_reported = true;
        }
        prev_sigma = sv;
        have_prev_sigma = true;

        if (spec.psi.half_line() && !sigma_band_reported &&
            !(sv > spec.sigma.lower && sv < spec.sigma.upper)) {
            add("sigma in (epsilon, omega)", "sigma leaves the required band", x);
            sigma_band_reported = true;
        }

        // f and K must evaluate at representative arguments
        double tmp = 0.0;
        if (spec.f && !try_eval([&] { return spec.f(x, 0.5, 0.5); }, tmp)) {
            add("f evaluable", "f fails to evaluate at a probe point", x);
            return diags;
        }
        if (spec.kernel &&
            !try_eval([&] { return spec.kernel(x, mesh.front(), 0.5, 0.5); }, tmp)) {
            add("K evaluable", "K fails to evaluate at a probe point", x);
            return diags;
        }
    }

    // soundness spot-check of supplied Lipschitz constants
    if (spec.lipschitz_m && spec.f) {
        const double m_hat = estimate_lipschitz_m(spec, mesh) / 1.1;
        if (m_hat > *spec.lipschitz_m * 1.001) {
            add("Lipschitz M", "sampled difference quotient of f exceeds the supplied M",
                mesh.front());
        }
    }
    if (spec.lipschitz_l && spec.kernel) {
        const double l_hat = estimate_lipschitz_l(spec, mesh) / 1.1;
        if (l_hat > *spec.lipschitz_l * 1.001) {
            add("Lipschitz L", "sampled difference quotient of K exceeds the supplied L",
                mesh.front());
        }
    }

    return diags;
}

double estimate_lipschitz_m(const ProblemSpec& spec, std::span<const double> mesh,
                            std::uint64_t seed) {
    if (!spec.f) return 0.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> du(spec.box.u_min, spec.box.u_max);
    std::uniform_real_distribution<double> dg(spec.box.g_min, spec.box.g_max);
    double best = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, mesh.size() / 64);
    for (std::size_t i = 0; i < mesh.size(); i += stride) {
        const double x = mesh[i];
        for (int k = 0; k < 32; ++k) {
            const double u1 = du(rng), u2 = du(rng), g1 = dg(rng), g2 = dg(rng);
            const double den = std::fabs(u1 - u2) + std::fabs(g1 - g2);
            if (den < 1e-9) continue;
            const double num = std::fabs(spec.f(x, u1, g1) - spec.f(x, u2, g2));
            if (std::isfinite(num)) best = std::max(best, num / den);
        }
    }
    return best * 1.1;
}

double estimate_lipschitz_l(const ProblemSpec& spec, std::span<const double> mesh,
                            std::uint64_t seed) {
    if (!spec.kernel) return 0.0;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> du(spec.box.u_min, spec.box.u_max);
    std::uniform_real_distribution<double> dw(spec.box.w_min, spec.box.w_max);
    double best = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, mesh.size() / 32);
    for (std::size_t i = 0; i < mesh.size(); i += stride) {
        const double x = mesh[i];
        for (std::size_t j = 0; j <= i; j += stride) {
            const double tau = mesh[j];
            for (int k = 0; k < 8; ++k) {
                const double uu = du(rng);
                const double w1 = dw(rng), w2 = dw(rng);
                const double den = std::fabs(w1 - w2);
                if (den < 1e-9) continue;
                const double num =
                    std::fabs(spec.kernel(x, tau, uu, w1) - spec.kernel(x, tau, uu, w2));
                if (std::isfinite(num)) best = std::max(best, num / den);
            }
        }
    }
    return best * 1.1;
}

std::pair<double, double> resolve_lipschitz(const ProblemSpec& spec,
                                            std::span<const double> mesh) {
    const double m = spec.lipschitz_m ? *spec.lipschitz_m : estimate_lipschitz_m(spec, mesh);
    const double l = spec.lipschitz_l ? *spec.lipschitz_l : estimate_lipschitz_l(spec, mesh);
    return {m, l};
}

}  // namespace fracstab
