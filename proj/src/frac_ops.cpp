#include "fracstab/frac_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fracstab/kernels.hpp"

namespace fracstab {

namespace {

// Product integration of a plain (finite-valued) grid function: quadratic
// interpolation through {j-1, j, j+1} on interior panels, forward stencil
// {0,1,2} on panel 0, and a linear panel for the very first row so row i
// never reads data beyond node max(2, i).
std::vector<double> prodint_plain(const PsiGrid& grid, std::span<const double> g,
                                  double alpha) {
    const std::size_t n = grid.size();
    const double inv_a = 1.0 / alpha;
    const double inv_a1 = 1.0 / (alpha + 1.0);
    const double inv_a2 = 1.0 / (alpha + 2.0);
    const double inv_gamma = 1.0 / std::tgamma(alpha);
    const auto& ops = kernels::active();
    const double* u = grid.u().data();
    const double* h = grid.h().data();
    const double* hinv = grid.hinv().data();
    const double* hs2inv = grid.hs2inv().data();

    std::vector<double> d(n), p(n), pa(n), pa2(n), out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        ops.row_pow(u, i + 1, u[i], alpha, d.data(), p.data(), pa.data(), pa2.data());
        double acc = ops.conv_row(d.data(), p.data(), pa.data(), pa2.data(), h, hinv,
                                  hs2inv, g.data(), i, inv_a, inv_a1, inv_a2);
        // panel 0
        const double m0 = (p[0] - p[1]) * inv_a;
        const double a1 = (pa[0] - pa[1]) * inv_a1;
        const double m1 = d[0] * m0 - a1;
        if (i == 1) {
            const double wr = m1 * hinv[0];
            acc += (m0 - wr) * g[0] + wr * g[1];
        } else {
            const double a2 = (pa2[0] - pa2[1]) * inv_a2;
            const double m2 = d[0] * d[0] * m0 - 2.0 * d[0] * a1 + a2;
            const double dd1 = (g[1] - g[0]) * hinv[0];
            const double dd2 = ((g[2] - g[1]) * hinv[1] - dd1) / (h[0] + h[1]);
            acc += g[0] * m0 + (dd1 - h[0] * dd2) * m1 + dd2 * m2;
        }
        out[i] = inv_gamma * acc;
    }
    return out;
}

// derivative of the interpolating parabola through (t0,f0),(t1,f1),(t2,f2) at t
double lagrange3_deriv(double t, double t0, double f0, double t1, double f1, double t2,
                       double f2) {
    return f0 * (2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2)) +
           f1 * (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2)) +
           f2 * (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
}

std::vector<double> derivative_in_u(const PsiGrid& grid, std::span<const double> f) {
    const auto u = grid.u();
    const std::size_t n = grid.size();
    std::vector<double> out(n);
    out[0] = lagrange3_deriv(u[0], u[0], f[0], u[1], f[1], u[2], f[2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = lagrange3_deriv(u[i], u[i - 1], f[i - 1], u[i], f[i], u[i + 1], f[i + 1]);
    }
    out[n - 1] =
        lagrange3_deriv(u[n - 1], u[n - 3], f[n - 3], u[n - 2], f[n - 2], u[n - 1], f[n - 1]);
    return out;
}

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
}

// endpoint value of h ~= C + A u^mu fitted through the first two interior nodes
double endpoint_fit(const PsiGrid& grid, std::span<const double> h, double mu) {
    const auto du = grid.du0();
    if (mu <= 0.0) {
        // I^0 = identity; linear extrapolation in u
        const double t = du[1] / (du[2] - du[1]);
        return h[1] - t * (h[2] - h[1]);
    }
    const double w1 = std::pow(du[1], mu);
    const double w2 = std::pow(du[2], mu);
    return (h[1] * w2 - h[2] * w1) / (w2 - w1);
}

}  // namespace

GridFunction frac_integral(const GridFunction& g, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("frac_integral: alpha must be > 0");
    const PsiGrid& grid = *g.grid();

    if (g.rep() == Rep::plain || g.exponent() == 0.0) {
        std::span<const double> vals = g.values();
        require_finite(vals, "frac_integral");
        return GridFunction::plain(g.grid(), prodint_plain(grid, vals, alpha));
    }

    // weighted input: split off the exact power-rule part
    const double e = g.exponent();        // 1 - gamma
    const double gamma = 1.0 - e;
    const double s0 = g.values()[0];
    require_finite(g.values(), "frac_integral");

    const std::size_t n = grid.size();
    std::vector<double> remainder(n, 0.0);
    const auto wneg = grid.du0_pow(-e);  // (u-u0)^(gamma-1), node 0 unused
    for (std::size_t i = 1; i < n; ++i) {
        remainder[i] = (g.values()[i] - s0) * wneg[i];
    }
    std::vector<double> out = prodint_plain(grid, remainder, alpha);

    const double factor = s0 * std::tgamma(gamma) / std::tgamma(gamma + alpha);
    const double expo = gamma + alpha - 1.0;
    const auto du = grid.du0();
    for (std::size_t i = 1; i < n; ++i) out[i] += factor * std::pow(du[i], expo);
    if (expo > 0.0 || s0 == 0.0) {
        // out[0] stays 0
    } else if (expo == 0.0) {
        out[0] = factor;
    } else {
        out[0] = std::copysign(std::numeric_limits<double>::infinity(), factor);
    }
    return GridFunction::plain(g.grid(), std::move(out));
}

namespace {

// the full composition pipeline on finite data
std::vector<double> hilfer_pipeline(const GridFunction& g, double mu, double nu) {
    const PsiGrid& grid = *g.grid();
    GridFunction inner = mu == 0.0 ? g.to_plain() : frac_integral(g, mu);
    require_finite(inner.values(), "hilfer_derivative (inner integral)");
    std::vector<double> dz = derivative_in_u(grid, inner.values());
    require_finite(dz, "hilfer_derivative (inner derivative)");
    if (nu == 0.0) return dz;
    return frac_integral(GridFunction::plain(g.grid(), std::move(dz)), nu).mutable_values();
}

}  // namespace

GridFunction hilfer_derivative(const GridFunction& g, const FractionalOrder& order) {
    const PsiGrid& grid = *g.grid();
    if (grid.size() < 8) throw std::invalid_argument("hilfer_derivative: mesh too coarse (N < 8)");
    const double mu = (1.0 - order.beta) * (1.0 - order.alpha);
    const double nu = order.beta * (1.0 - order.alpha);

    // For beta < 1 the derivative of the constant mode g(a) is singular,
    // D const = const (u-u0)^(-alpha)/Gamma(1-alpha), and finite differences
    // of its mu-integral never converge near a. Split it off analytically and
    // differentiate only the part that vanishes at the left endpoint.
    if (g.rep() == Rep::plain && mu > 0.0 && g.values()[0] != 0.0) {
        const double s = g.values()[0];
        std::vector<double> shifted(g.values().begin(), g.values().end());
        for (double& v : shifted) v -= s;
        std::vector<double> out =
            hilfer_pipeline(GridFunction::plain(g.grid(), std::move(shifted)), mu, nu);
        const double coeff = s / std::tgamma(1.0 - order.alpha);
        const auto du = grid.du0();
        for (std::size_t i = 1; i < out.size(); ++i)
            out[i] += coeff * std::pow(du[i], -order.alpha);
        out[0] = std::copysign(std::numeric_limits<double>::infinity(), s);
        return GridFunction::plain(g.grid(), std::move(out));
    }
    return GridFunction::plain(g.grid(), hilfer_pipeline(g, mu, nu));
}

double verify_left_inverse(const GridFunction& g, const FractionalOrder& order) {
    const GridFunction ig = frac_integral(g, order.alpha);
    const GridFunction dig = hilfer_derivative(ig, order);
    const auto got = dig.values();
    const auto want = g.values();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < got.size(); ++i) {
        worst = std::max(worst, std::fabs(got[i] - want[i]));
    }
    return worst;
}

double verify_composition(const GridFunction& g, const FractionalOrder& order) {
    const PsiGrid& grid = *g.grid();
    const double gamma = order.gamma();
    const double mu = (1.0 - order.beta) * (1.0 - order.alpha);

    const GridFunction dg = hilfer_derivative(g, order);
    // D g carries a u^(gamma-1-alpha)-type endpoint blowup; hand the integral
    // its weighted form so the singular part integrates by the power rule
    const GridFunction idg = frac_integral(dg.to_weighted(order.alpha), order.alpha);

    const GridFunction imu = mu == 0.0 ? g.to_plain() : frac_integral(g, mu);
    const double at_a = endpoint_fit(grid, imu.values(), mu);

    const auto du = grid.du0();
    const double inv_gamma = 1.0 / std::tgamma(gamma);
    const auto left = idg.values();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double correction =
            gamma == 1.0 ? at_a * inv_gamma : at_a * inv_gamma * std::pow(du[i], gamma - 1.0);
        const double right = g.plain_at(i) - correction;
        worst = std::max(worst, std::fabs(left[i] - right));
    }
    return worst;
}

double weighted_norm(const GridFunction& g, const FractionalOrder& order) {
    const double e = 1.0 - order.gamma();
    if (g.rep() == Rep::weighted && g.exponent() == e) {
        double best = 0.0;
        for (double v : g.values()) best = std::max(best, std::fabs(v));
        return best;
    }
    const GridFunction p = g.to_plain();
    const auto w = g.grid()->du0_pow(e);
    const auto v = p.values();
    if (e == 0.0) {
        return kernels::active().weighted_abs_max(v.data(), w.data(), v.size());
    }
    // node 0 carries weight 0; skip it so a singular plain value cannot poison the max
    return kernels::active().weighted_abs_max(v.data() + 1, w.data() + 1, v.size() - 1);
}

}  // namespace fracstab
