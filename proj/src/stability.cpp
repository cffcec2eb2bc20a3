#include "fracstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fracstab {

namespace {

std::vector<double> abs_plain_difference(const GridFunction& a, const GridFunction& b) {
    const std::size_t n = a.size();
    std::vector<double> out(n, 0.0);
    if (a.rep() == Rep::weighted && b.rep() == Rep::weighted &&
        a.exponent() == b.exponent() && a.exponent() > 0.0) {
        const auto pw = a.grid()->du0_pow(-a.exponent());
        for (std::size_t i = 1; i < n; ++i)
            out[i] = std::fabs((a.values()[i] - b.values()[i]) * pw[i]);
        out[0] = a.values()[0] == b.values()[0] ? 0.0
                                                : std::numeric_limits<double>::infinity();
        return out;
    }
    const auto pa = a.plain_values();
    const auto pb = b.plain_values();
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(pa[i] - pb[i]);
    return out;
}

std::vector<double> envelope_values(const PerturbationSpec& pert, const TOperator& op) {
    const auto x = op.grid()->x();
    std::vector<double> env(x.size());
    if (pert.kind == PerturbationKind::theta_bounded) {
        if (!(pert.theta > 0.0))
            throw std::invalid_argument("perturbation: theta envelope must be positive");
        std::fill(env.begin(), env.end(), pert.theta);
    } else {
        const auto sv = op.sigma_values();
        env.assign(sv.begin(), sv.end());
        for (double s : env) {
            if (!(s > 0.0))
                throw std::invalid_argument("perturbation: sigma envelope must be positive");
        }
    }
    return env;
}

}  // namespace

bool StabilityReport::recompute_pass() const {
    if (!residual_ok) return false;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < deviation.size(); ++i)
        m = std::min(m, bound[i] - deviation[i]);
    return m >= 0.0;
}

GridFunction residual_integral_form(const GridFunction& y, const TOperator& op) {
    const GridFunction ty = op.apply(y);
    return GridFunction::plain(y.grid(),
                               abs_plain_difference(y.to_weighted(op.weight_exponent()), ty));
}

GridFunction residual_differential_form(const GridFunction& y, const TOperator& op) {
    const GridFunction dy = hilfer_derivative(y, op.spec().order);
    const std::vector<double> g = op.volterra(y);
    const auto x = op.grid()->x();
    const auto ypl = y.plain_values();
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double fx = op.spec().f ? op.spec().f(x[i], ypl[i], g[i]) : 0.0;
        out[i] = std::fabs(dy.values()[i] - fx);
    }
    return GridFunction::plain(y.grid(), std::move(out));
}

GridFunction make_perturbed_solution(const GridFunction& y0, const PerturbationSpec& pert,
                                     const TOperator& op, double q) {
    if (!(pert.amplitude > 0.0 && pert.amplitude <= 1.0))
        throw std::invalid_argument("perturbation: amplitude must lie in (0, 1]");
    const auto x = op.grid()->x();
    const std::size_t n = x.size();
    const std::vector<double> env = envelope_values(pert, op);

    std::vector<double> raw(n);
    if (pert.shape) {
        for (std::size_t i = 0; i < n; ++i) raw[i] = pert.shape(x[i]);
    } else {
        std::mt19937_64 rng(pert.seed);
        std::uniform_real_distribution<double> amp(-1.0, 1.0);
        std::uniform_real_distribution<double> freq(0.5, 4.0);
        std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
        double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
        double b1 = freq(rng), b2 = freq(rng), b3 = freq(rng);
        double p1 = phase(rng), p2 = phase(rng), p3 = phase(rng);
        const double span = x.back() - x.front();
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (x[i] - x.front()) / span;
            raw[i] = a1 * std::sin(b1 * 3.141592653589793 * t + p1) +
                     a2 * std::sin(b2 * 3.141592653589793 * t + p2) +
                     a3 * std::cos(b3 * 3.141592653589793 * t + p3);
        }
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::fabs(raw[i]) / env[i]);
    const double lam = pert.amplitude / (1.0 + std::max(q, 0.0));
    std::vector<double> r(n);
    if (worst == 0.0) {
        std::fill(r.begin(), r.end(), 0.0);
    } else {
        for (std::size_t i = 0; i < n; ++i) r[i] = raw[i] * (lam / worst);
    }

    const GridFunction ir =
        frac_integral(GridFunction::plain(op.grid(), std::move(r)), op.spec().order.alpha);

    GridFunction y0w = y0.to_weighted(op.weight_exponent());
    std::vector<double> w(y0w.values().begin(), y0w.values().end());
    const auto upow = op.grid()->du0_pow(op.weight_exponent());
    for (std::size_t i = 1; i < n; ++i) {
        w[i] += ir.values()[i] * (op.weight_exponent() == 0.0 ? 1.0 : upow[i]);
    }
    if (op.weight_exponent() == 0.0) w[0] += ir.values()[0];
    return GridFunction::weighted(op.grid(), std::move(w), op.weight_exponent());
}

namespace {

struct CheckInputs {
    TOperator op;
    PicardResult solved;
    std::vector<double> resid;
    std::vector<double> deviation;
};

CheckInputs prepare(const GridFunction& y, const ProblemSpec& spec, const PsiGridPtr& grid,
                    double tol, int max_iter) {
    TOperator op(spec, grid);
    PicardResult solved = picard_solve(op, contraction_certificate(spec, grid), tol, max_iter);
    GridFunction ty = op.apply(y);
    std::vector<double> resid =
        abs_plain_difference(y.to_weighted(op.weight_exponent()), ty);
    std::vector<double> deviation =
        abs_plain_difference(y.to_weighted(op.weight_exponent()),
                             solved.solution.to_weighted(op.weight_exponent()));
    return {std::move(op), std::move(solved), std::move(resid), std::move(deviation)};
}

}  // namespace

StabilityReport check_uhr(const GridFunction& y, const ProblemSpec& spec,
                          const PsiGridPtr& grid, double tol, int max_iter) {
    CheckInputs in = prepare(y, spec, grid, tol, max_iter);
    const auto sv = in.op.sigma_values();
    const auto x = grid->x();
    const double q = in.solved.certificate.q();
    const double xi = in.solved.certificate.xi;

    StabilityReport rep;
    rep.kind = StabilityKind::uhr;
    rep.certificate = in.solved.certificate;
    rep.slack = 2.0 * tol;
    rep.x.assign(x.begin(), x.end());
    rep.deviation = std::move(in.deviation);

    rep.residual_max_ratio = 0.0;
    for (std::size_t i = 0; i < sv.size(); ++i)
        rep.residual_max_ratio = std::max(rep.residual_max_ratio, in.resid[i] / sv[i]);
    rep.residual_ok = rep.residual_max_ratio <= 1.0 + 1e-12;

    rep.bound.resize(sv.size());
    for (std::size_t i = 0; i < sv.size(); ++i)
        rep.bound[i] = xi * sv[i] / (1.0 - q) + rep.slack * sv[i];
    rep.bound_printed = rep.bound;  // Eq. (21) has a single form

    rep.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sv.size(); ++i)
        rep.margin = std::min(rep.margin, rep.bound[i] - rep.deviation[i]);
    rep.margin_printed = rep.margin;
    rep.printed_ok = rep.margin >= 0.0;
    rep.pass = rep.residual_ok && rep.margin >= 0.0;
    return rep;
}

namespace {

StabilityReport check_theta_bounded(const GridFunction& y, const ProblemSpec& spec,
                                    const PsiGridPtr& grid, double theta, double tol,
                                    int max_iter, StabilityKind kind) {
    if (!(theta > 0.0)) throw std::invalid_argument("stability check: theta must be > 0");
    CheckInputs in = prepare(y, spec, grid, tol, max_iter);
    const auto sv = in.op.sigma_values();
    const auto x = grid->x();
    const double q = in.solved.certificate.q();
    const double alpha = spec.order.alpha;
    const double gamma = spec.order.gamma();
    const double psi_span = grid->u_end() - grid->u0();
    const double span = x.back() - x.front();
    const double sigma_a = sv.front();
    const double sigma_b = sv.back();

    StabilityReport rep;
    rep.kind = kind;
    rep.certificate = in.solved.certificate;
    rep.theta = theta;
    rep.slack = 2.0 * tol * theta;
    rep.x.assign(x.begin(), x.end());
    rep.deviation = std::move(in.deviation);

    rep.residual_max_ratio = 0.0;
    for (double rv : in.resid) rep.residual_max_ratio = std::max(rep.residual_max_ratio, rv);
    rep.residual_max_ratio /= theta;
    rep.residual_ok = rep.residual_max_ratio <= 1.0 + 1e-12;

    rep.bound.resize(sv.size());
    rep.bound_printed.resize(sv.size());
    const double derived_scale =
        theta * std::pow(psi_span, alpha) / ((1.0 - q) * std::tgamma(alpha + 1.0) * sigma_a);
    if (kind == StabilityKind::semi_uhr) {
        // printed Eq. (30): (b-a) theta sigma(x) / ((1-q) sigma(a));
        // derivation-implied: theta (psi(b)-psi(a))^alpha sigma(x) /
        //                     ((1-q) Gamma(alpha+1) sigma(a))
        const double printed_scale = span * theta / ((1.0 - q) * sigma_a);
        for (std::size_t i = 0; i < sv.size(); ++i) {
            rep.bound[i] = derived_scale * sv[i] + rep.slack;
            rep.bound_printed[i] = printed_scale * sv[i] + rep.slack;
        }
    } else {
        // UH corollary: constant bounds; printed uses Gamma(gamma+1)
        const double printed_const = theta * std::pow(psi_span, alpha) * sigma_b /
                                     ((1.0 - q) * std::tgamma(gamma + 1.0) * sigma_a);
        const double derived_const = derived_scale * sigma_b;
        for (std::size_t i = 0; i < sv.size(); ++i) {
            rep.bound[i] = derived_const + rep.slack;
            rep.bound_printed[i] = printed_const + rep.slack;
        }
    }

    rep.margin = std::numeric_limits<double>::infinity();
    rep.margin_printed = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sv.size(); ++i) {
        rep.margin = std::min(rep.margin, rep.bound[i] - rep.deviation[i]);
        rep.margin_printed =
            std::min(rep.margin_printed, rep.bound_printed[i] - rep.deviation[i]);
    }
    rep.printed_ok = rep.margin_printed >= 0.0;
    rep.pass = rep.residual_ok && rep.margin >= 0.0;
    return rep;
}

}  // namespace

StabilityReport check_semi_uhr(const GridFunction& y, const ProblemSpec& spec,
                               const PsiGridPtr& grid, double theta, double tol,
                               int max_iter) {
    return check_theta_bounded(y, spec, grid, theta, tol, max_iter, StabilityKind::semi_uhr);
}

StabilityReport check_uh(const GridFunction& y, const ProblemSpec& spec,
                         const PsiGridPtr& grid, double theta, double tol, int max_iter) {
    return check_theta_bounded(y, spec, grid, theta, tol, max_iter, StabilityKind::uh);
}

HalflineResult extend_to_halfline(const ProblemSpec& spec, int n_max,
                                  std::size_t mesh_per_unit, double grading, double tol,
                                  int max_iter, std::uint64_t pert_seed) {
    HalflineResult res;
    res.consistency_tol = 5.0 * tol;
    if (n_max < 1) {
        res.error = "n_max must be >= 1";
        return res;
    }
    const double a = spec.psi.domain_start;

    std::optional<GridFunction> prev;
    std::vector<double> prev_sigma;
    for (int n = 1; n <= n_max; ++n) {
        const Mesh mesh = Mesh::stacked_units(a, n, mesh_per_unit, grading);
        PsiGridPtr grid;
        try {
            grid = make_grid(mesh, spec.psi);
        } catch (const std::exception& e) {
            res.error = "interval " + std::to_string(n) + ": " + e.what();
            return res;
        }

        HalflineInterval rec;
        rec.n = n;
        TOperator op(spec, grid);
        rec.certificate = contraction_certificate(spec, grid);
        if (!rec.certificate.valid()) {
            res.intervals.push_back(rec);
            res.error = "contraction certificate fails on interval I_" + std::to_string(n) +
                        (rec.certificate.reason.empty() ? "" : ": " + rec.certificate.reason);
            return res;
        }
        std::optional<PicardResult> solved_opt;
        try {
            solved_opt = picard_solve(op, rec.certificate, tol, max_iter);
        } catch (const std::exception& e) {
            res.intervals.push_back(rec);
            res.error = "interval " + std::to_string(n) + ": " + e.what();
            return res;
        }
        PicardResult& solved = *solved_opt;
        rec.converged = solved.trace.converged;
        rec.iterations = solved.trace.iterations;

        if (prev) {
            // the I_{n-1} mesh is an exact prefix; compare nodewise
            const std::size_t m = prev->size();
            const auto pw = prev->grid()->du0_pow(-prev->exponent());
            double worst = 0.0;
            for (std::size_t i = 1; i < m; ++i) {
                const double da =
                    (solved.solution.values()[i] - prev->values()[i]) *
                    (prev->exponent() == 0.0 ? 1.0 : pw[i]);
                worst = std::max(worst, std::fabs(da) / prev_sigma[i]);
            }
            rec.mismatch_vs_prev = worst;
            res.max_mismatch = std::max(res.max_mismatch, worst);
        }
        res.intervals.push_back(rec);
        prev = solved.solution;
        prev_sigma.assign(op.sigma_values().begin(), op.sigma_values().end());

        if (n == n_max) {
            res.assembled = solved.solution;
            PerturbationSpec pert;
            pert.kind = PerturbationKind::sigma_bounded;
            pert.seed = pert_seed;
            const GridFunction y =
                make_perturbed_solution(solved.solution, pert, op, rec.certificate.q());
            res.uhr_report = check_uhr(y, spec, grid, tol, max_iter);
        }
    }

    res.consistent = res.max_mismatch <= res.consistency_tol;
    res.pass = res.consistent && res.uhr_report && res.uhr_report->pass;
    return res;
}

}  // namespace fracstab
