#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fracstab/solver.hpp"

// Generation of perturbed approximate solutions and verification of the
// Ulam-Hyers (UH), Ulam-Hyers-Rassias (UHR) and semi-UHR deviation bounds,
// plus the nested-interval construction on [a, infinity).

namespace fracstab {

enum class StabilityKind { uh, uhr, semi_uhr };

enum class PerturbationKind { sigma_bounded, theta_bounded };

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::sigma_bounded;
    double theta = 1.0;  // envelope level for theta_bounded
    // residual shape before scaling; empty => seeded trigonometric mix
    std::function<double(double)> shape;
    std::uint64_t seed = 1;
    double amplitude = 1.0;  // in (0, 1]
};

struct StabilityReport {
    StabilityKind kind = StabilityKind::uhr;
    bool pass = false;
    bool residual_ok = false;      // premise held: residual within its envelope
    double residual_max_ratio = 0; // max |y - Ty| / envelope
    double theta = 0.0;            // envelope level (UH / semi-UHR)
    double slack = 0.0;            // additive slack folded into the bounds

    std::vector<double> x;
    std::vector<double> deviation;      // |y - y0| per node
    std::vector<double> bound;          // derivation-implied bound per node
    std::vector<double> bound_printed;  // bound exactly as printed (semi-UHR/UH)

    double margin = 0.0;          // min(bound - deviation)
    double margin_printed = 0.0;  // min over the printed variant
    bool printed_ok = true;

    ContractionCertificate certificate;

    // pass is recomputable from the stored grids
    bool recompute_pass() const;
};

// |y - Ty| nodewise: the integral-form residual, the faithful discretized
// surrogate for the differential residual.
GridFunction residual_integral_form(const GridFunction& y, const TOperator& op);

// |D^{a,b} y - f(x, y, int K)| nodewise. Noisier than the integral form;
// cross-validation only. Node 0 is reported as 0.
GridFunction residual_differential_form(const GridFunction& y, const TOperator& op);

// y = y0 + I^{alpha} r with |r| <= amplitude/(1+q) * envelope nodewise, so the
// integral-form residual of y stays within the envelope (exact for f == 0).
GridFunction make_perturbed_solution(const GridFunction& y0, const PerturbationSpec& pert,
                                     const TOperator& op, double q);

StabilityReport check_uhr(const GridFunction& y, const ProblemSpec& spec,
                          const PsiGridPtr& grid, double tol, int max_iter = 200);
StabilityReport check_semi_uhr(const GridFunction& y, const ProblemSpec& spec,
                               const PsiGridPtr& grid, double theta, double tol,
                               int max_iter = 200);
StabilityReport check_uh(const GridFunction& y, const ProblemSpec& spec,
                         const PsiGridPtr& grid, double theta, double tol,
                         int max_iter = 200);

struct HalflineInterval {
    int n = 0;  // interval [a, a+n]
    ContractionCertificate certificate;
    bool converged = false;
    int iterations = 0;
    double mismatch_vs_prev = 0.0;  // Bielecki restriction mismatch against I_{n-1}
};

struct HalflineResult {
    std::vector<HalflineInterval> intervals;
    std::optional<GridFunction> assembled;  // solution on the widest interval
    double max_mismatch = 0.0;
    double consistency_tol = 0.0;
    bool consistent = false;
    std::optional<StabilityReport> uhr_report;  // bound check on the union
    bool pass = false;
    std::string error;
};

// Solves on the nested intervals I_n = [a, a+n], n = 1..n_max, with meshes
// built so each is an exact prefix of the next; verifies that restrictions
// agree, assembles the half-line solution from the widest interval, and
// checks the UHR bound there against a generated perturbation.
HalflineResult extend_to_halfline(const ProblemSpec& spec, int n_max,
                                  std::size_t mesh_per_unit, double grading, double tol,
                                  int max_iter = 200, std::uint64_t pert_seed = 1);

}  // namespace fracstab
