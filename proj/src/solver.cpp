#include "fracstab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracstab/kernels.hpp"

namespace fracstab {

std::optional<double> estimate_xi(const WeightFunction& sigma, double alpha,
                                  const PsiGridPtr& grid, double* offending) {
    const auto x = grid->x();
    std::vector<double> sv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sv[i] = sigma.sigma(x[i]);
        if (!(sv[i] > 0.0))
            throw std::invalid_argument("estimate_xi: sigma must be positive on the mesh");
    }
    const GridFunction isv = frac_integral(GridFunction::plain(grid, sv), alpha);
    double ratio = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        ratio = std::max(ratio, isv.values()[i] / sv[i]);
    }
    if (offending) *offending = ratio;
    if (ratio < 1.0) return ratio;
    return std::nullopt;
}

double bielecki_distance(const GridFunction& u, const GridFunction& v,
                         std::span<const double> sigma_values) {
    if (u.size() != v.size() || u.size() != sigma_values.size())
        throw std::invalid_argument("bielecki_distance: mesh mismatch");
    const std::size_t n = u.size();

    // same weighted representation: difference of weighted parts, rescaled;
    // matching singular amplitudes at node 0 contribute nothing
    if (u.rep() == Rep::weighted && v.rep() == Rep::weighted &&
        u.exponent() == v.exponent() && u.exponent() > 0.0) {
        const double e = u.exponent();
        const auto pw = u.grid()->du0_pow(-e);
        double best = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double diff = (u.values()[i] - v.values()[i]) * pw[i];
            best = std::max(best, std::fabs(diff) / sigma_values[i]);
        }
        if (u.values()[0] != v.values()[0])
            return std::numeric_limits<double>::infinity();
        return best;
    }

    const auto pu = u.plain_values();
    const auto pv = v.plain_values();
    return kernels::active().abs_max_ratio(pu.data(), pv.data(), sigma_values.data(), n);
}

TOperator::TOperator(const ProblemSpec& spec, PsiGridPtr grid)
    : spec_(spec), grid_(std::move(grid)) {
    gamma_ = spec_.order.gamma();
    weight_exp_ = 1.0 - gamma_;
    c_over_gamma_ = spec_.c / std::tgamma(gamma_);

    const auto x = grid_->x();
    const auto u = grid_->u();
    const std::size_t n = grid_->size();

    sigma_vals_.resize(n);
    for (std::size_t i = 0; i < n; ++i) sigma_vals_[i] = spec_.sigma.sigma(x[i]);

    delay_idx_.resize(n);
    delay_t_.resize(n);
    delay_pow_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double dj = spec_.delta.delta(x[j]);
        const double lo_tol = 1e-12 * std::max(1.0, std::fabs(x[0]));
        if (dj > x[j] + lo_tol || dj < x[0] - lo_tol)
            throw std::invalid_argument("TOperator: delta(t) outside [a, t] at a mesh node");
        const double dc = std::clamp(dj, x[0], x[j]);
        const double ud = spec_.psi.psi(dc);
        // left node of the enclosing panel
        std::size_t k = static_cast<std::size_t>(
            std::upper_bound(x.begin(), x.end(), dc) - x.begin());
        k = k == 0 ? 0 : k - 1;
        if (k >= n - 1) k = n - 2;
        delay_idx_[j] = k;
        delay_t_[j] = std::clamp((ud - u[k]) / (u[k + 1] - u[k]), 0.0, 1.0);
        const double du0 = ud - u[0];
        delay_pow_[j] =
            weight_exp_ == 0.0 ? 1.0 : (du0 > 0.0 ? std::pow(du0, gamma_ - 1.0) : 0.0);
        if (weight_exp_ > 0.0 && du0 == 0.0)
            delay_pow_[j] = std::numeric_limits<double>::infinity();
    }
}

GridFunction TOperator::initial_iterate() const {
    std::vector<double> w(grid_->size(), c_over_gamma_);
    return GridFunction::weighted(grid_, std::move(w), weight_exp_);
}

std::vector<double> TOperator::volterra(const GridFunction& y) const {
    const std::size_t n = grid_->size();
    const auto x = grid_->x();
    const GridFunction yweighted = y.to_weighted(weight_exp_);
    const auto yw = yweighted.values();

    // plain samples and delayed samples, interpolated in the weighted part
    const auto pw = grid_->du0_pow(-weight_exp_);
    std::vector<double> yp(n), yd(n);
    for (std::size_t i = 0; i < n; ++i) {
        yp[i] = i == 0 ? yweighted.plain_at(0) : yw[i] * pw[i];
        const std::size_t k = delay_idx_[i];
        const double wval = yw[k] + delay_t_[i] * (yw[k + 1] - yw[k]);
        yd[i] = weight_exp_ == 0.0 ? wval
                                   : (wval == 0.0 && !std::isfinite(delay_pow_[i])
                                          ? 0.0
                                          : wval * delay_pow_[i]);
    }

    std::vector<double> g(n, 0.0);
    if (!spec_.kernel) return g;

    // row i: trapezoid of K(x_i, tau, y(tau), y(delta(tau))) over tau<=x_i.
    // If the tau = a endpoint is singular (weighted data with nonzero w_0),
    // the first panel falls back to a right-endpoint rectangle.
    std::vector<double> krow(n);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) krow[j] = spec_.kernel(x[i], x[j], yp[j], yd[j]);
        for (std::size_t j = 1; j <= i; ++j) {
            if (!std::isfinite(krow[j]))
                throw std::runtime_error("apply_T: kernel evaluated non-finite inside the domain");
        }
        if (!std::isfinite(krow[0])) {
            acc += (x[1] - x[0]) * krow[1];
        } else {
            acc += 0.5 * (x[1] - x[0]) * (krow[0] + krow[1]);
        }
        for (std::size_t j = 1; j < i; ++j) {
            acc += 0.5 * (x[j + 1] - x[j]) * (krow[j] + krow[j + 1]);
        }
        g[i] = acc;
    }
    return g;
}

GridFunction TOperator::apply(const GridFunction& y) const {
    const std::size_t n = grid_->size();
    const auto x = grid_->x();
    const auto du0 = grid_->du0();

    const std::vector<double> g = volterra(y);

    // F_i = f(x_i, y_i, g_i), handled through its weighted limit at the left
    // endpoint so singular iterates stay representable
    std::vector<double> fv(n, 0.0);
    const auto ypl = y.plain_values();
    if (spec_.f) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0 && weight_exp_ > 0.0) continue;  // may be singular; unused
            fv[i] = spec_.f(x[i], ypl[i], g[i]);
            if (!std::isfinite(fv[i]))
                throw std::runtime_error("apply_T: f evaluated non-finite inside the domain");
        }
    }

    // split off the singular amplitude s0 = lim (u-u0)^(1-gamma) F
    double s0;
    if (weight_exp_ == 0.0) {
        s0 = fv[0];
    } else {
        const double w1 = fv[1] * std::pow(du0[1], weight_exp_);
        const double w2 = fv[2] * std::pow(du0[2], weight_exp_);
        s0 = w1 - (w2 - w1) * du0[1] / (du0[2] - du0[1]);
        if (!std::isfinite(s0)) s0 = 0.0;
    }

    std::vector<double> remainder(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        remainder[i] =
            weight_exp_ == 0.0 ? fv[i] - s0 : fv[i] - s0 * std::pow(du0[i], gamma_ - 1.0);
    }
    GridFunction smooth =
        frac_integral(GridFunction::plain(grid_, std::move(remainder)), spec_.order.alpha);

    // closed-form I^alpha of s0 (u-u0)^(gamma-1), then assemble in weighted form
    const double alpha = spec_.order.alpha;
    const double factor = s0 * std::tgamma(gamma_) / std::tgamma(gamma_ + alpha);
    std::vector<double> w(n);
    w[0] = c_over_gamma_;
    for (std::size_t i = 1; i < n; ++i) {
        // (u-u0)^(1-gamma) * [ factor (u-u0)^(gamma+alpha-1) + smooth_i ]
        const double upow = std::pow(du0[i], weight_exp_);
        w[i] = c_over_gamma_ + factor * std::pow(du0[i], alpha) + smooth.values()[i] * upow;
    }
    return GridFunction::weighted(grid_, std::move(w), weight_exp_);
}

ContractionCertificate contraction_certificate(const ProblemSpec& spec,
                                               const PsiGridPtr& grid) {
    ContractionCertificate cert;
    auto [m, l] = resolve_lipschitz(spec, grid->x());
    cert.m = m;
    cert.l = l;
    double offending = 0.0;
    const auto xi = estimate_xi(spec.sigma, spec.order.alpha, grid, &offending);
    if (xi) {
        cert.xi = *xi;
        cert.xi_ok = true;
        if (cert.q() >= 1.0)
            cert.reason = "q = M(xi + L xi^2) = " + std::to_string(cert.q()) + " >= 1";
    } else {
        cert.xi = offending;
        cert.xi_offending = offending;
        cert.xi_ok = false;
        cert.reason = "no xi < 1: max (I^alpha sigma)/sigma = " + std::to_string(offending);
    }
    return cert;
}

PicardResult picard_solve(const TOperator& op, ContractionCertificate cert, double tol,
                          int max_iter) {
    if (!cert.valid())
        throw CertificateError("picard_solve: contraction certificate invalid (" +
                                   (cert.reason.empty() ? std::string("q >= 1") : cert.reason) +
                                   ")",
                               cert);
    if (!(tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be > 0");

    const double q = cert.q();
    const double threshold =
        q > 0.0 ? tol * (1.0 - q) / q : std::numeric_limits<double>::infinity();

    IterationTrace trace;
    GridFunction y = op.initial_iterate();
    for (int k = 1; k <= max_iter; ++k) {
        GridFunction ynext = op.apply(y);
        const double d = bielecki_distance(ynext, y, op.sigma_values());
        double sup = 0.0;
        {
            const auto a = ynext.plain_values();
            const auto b = y.plain_values();
            for (std::size_t i = 1; i < a.size(); ++i)
                sup = std::max(sup, std::fabs(a[i] - b[i]));
        }
        trace.steps.push_back({k, d, sup});
        y = std::move(ynext);
        if (!(d < std::numeric_limits<double>::infinity()))
            throw std::runtime_error("picard_solve: iteration diverged (non-finite distance)");
        if (d <= threshold) {
            trace.converged = true;
            break;
        }
    }
    trace.iterations = static_cast<int>(trace.steps.size());
    return {std::move(y), std::move(trace), std::move(cert)};
}

PicardResult picard_solve(const ProblemSpec& spec, const PsiGridPtr& grid, double tol,
                          int max_iter) {
    TOperator op(spec, grid);
    return picard_solve(op, contraction_certificate(spec, grid), tol, max_iter);
}

GridFunction apply_T(const GridFunction& u, const ProblemSpec& spec, const PsiGridPtr& grid) {
    return TOperator(spec, grid).apply(u);
}

double aposteriori_bound(const IterationTrace& trace, double q) {
    if (!(q < 1.0)) throw std::invalid_argument("aposteriori_bound: requires q < 1");
    if (trace.steps.empty()) throw std::invalid_argument("aposteriori_bound: empty trace");
    return trace.steps.back().distance / (1.0 - q);
}

}  // namespace fracstab
