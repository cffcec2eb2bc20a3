#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracstab/frac_ops.hpp"
#include "fracstab/grid.hpp"
#include "fracstab/problem.hpp"

// Fixed-point machinery for
//   Tu(x) = c (u-u0)^(gamma-1)/Gamma(gamma)
//         + I^{alpha;psi} f(x, u(x), int_a^x K(x,tau,u(tau),u(delta(tau))) dtau)
// in the Bielecki metric d(u,v) = sup |u-v|/sigma.

namespace fracstab {

struct ContractionCertificate {
    double xi = 0.0;
    double m = 0.0;
    double l = 0.0;
    bool xi_ok = false;          // a valid xi < 1 was found
    double xi_offending = 0.0;   // the ratio that broke xi when !xi_ok
    std::string reason;

    double q() const { return m * (xi + l * xi * xi); }
    bool valid() const { return xi_ok && xi < 1.0 && q() < 1.0; }
};

struct IterationStep {
    int index;
    double distance;    // Bielecki distance of the update
    double sup_update;  // plain sup-norm of the update (node 0 excluded)
};

struct IterationTrace {
    std::vector<IterationStep> steps;
    bool converged = false;
    int iterations = 0;
};

struct CertificateError : std::runtime_error {
    CertificateError(const std::string& what, ContractionCertificate cert)
        : std::runtime_error(what), certificate(std::move(cert)) {}
    ContractionCertificate certificate;
};

// xi_hat = max_i (I^{alpha} sigma)(x_i) / sigma(x_i); nullopt when >= 1,
// with the offending value reported through *offending.
std::optional<double> estimate_xi(const WeightFunction& sigma, double alpha,
                                  const PsiGridPtr& grid, double* offending = nullptr);

double bielecki_distance(const GridFunction& u, const GridFunction& v,
                         std::span<const double> sigma_values);

// Precomputed application context: sigma on the grid, delayed-argument
// interpolation table, weighted bookkeeping. Immutable after construction.
class TOperator {
  public:
    TOperator(const ProblemSpec& spec, PsiGridPtr grid);

    GridFunction apply(const GridFunction& y) const;
    GridFunction initial_iterate() const;  // the homogeneous term

    // trapezoidal Volterra integral per node, with the delayed argument read
    // through weighted interpolation
    std::vector<double> volterra(const GridFunction& y) const;

    const ProblemSpec& spec() const { return spec_; }
    const PsiGridPtr& grid() const { return grid_; }
    double gamma() const { return gamma_; }
    double weight_exponent() const { return weight_exp_; }
    std::span<const double> sigma_values() const { return sigma_vals_; }

  private:
    ProblemSpec spec_;
    PsiGridPtr grid_;
    double gamma_, weight_exp_, c_over_gamma_;
    std::vector<double> sigma_vals_;
    std::vector<std::size_t> delay_idx_;  // left node of the delta(x_j) panel
    std::vector<double> delay_t_;         // interpolation weight in u
    std::vector<double> delay_pow_;       // (psi(delta_j)-u0)^(gamma-1)
};

ContractionCertificate contraction_certificate(const ProblemSpec& spec,
                                               const PsiGridPtr& grid);

struct PicardResult {
    GridFunction solution;
    IterationTrace trace;
    ContractionCertificate certificate;
};

// Iterates y <- T y from the homogeneous term until the Banach a-posteriori
// criterion certifies bielecki distance <= tol to the fixed point. Throws
// CertificateError when q >= 1.
PicardResult picard_solve(const ProblemSpec& spec, const PsiGridPtr& grid, double tol,
                          int max_iter = 200);
PicardResult picard_solve(const TOperator& op, ContractionCertificate cert, double tol,
                          int max_iter = 200);

GridFunction apply_T(const GridFunction& u, const ProblemSpec& spec,
                     const PsiGridPtr& grid);

// d(T y, y)/(1-q) from the final trace entry; the rigorous distance bound to
// the fixed point up to discretization
double aposteriori_bound(const IterationTrace& trace, double q);

}  // namespace fracstab
