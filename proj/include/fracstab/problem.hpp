#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracstab {

// The increasing map psi and its derivative; they define the operator
// geometry. psi_prime is supplied, not differentiated, and consistency is
// checked by validate_problem.
struct PsiMap {
    std::function<double(double)> psi;
    std::function<double(double)> psi_prime;
    double domain_start = 0.0;
    double domain_end = 1.0;  // +infinity for half-line problems

    bool half_line() const { return !std::isfinite(domain_end); }
};

struct FractionalOrder {
    double alpha;
    double beta;

    FractionalOrder(double a, double b) : alpha(a), beta(b) {
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("FractionalOrder: alpha must lie in (0,1)");
        if (!(b >= 0.0 && b <= 1.0))
            throw std::invalid_argument("FractionalOrder: beta must lie in [0,1]");
    }

    // gamma = alpha + beta(1-alpha), always recomputed
    double gamma() const { return alpha + beta * (1.0 - alpha); }
};

struct DelayFunction {
    std::function<double(double)> delta;
};

struct WeightFunction {
    std::function<double(double)> sigma;
    double lower = 0.0;  // epsilon; only enforced on half-line problems
    double upper = std::numeric_limits<double>::infinity();  // omega
};

// Box over which sampled Lipschitz estimation draws (u,g,w) values.
struct SamplingBox {
    double u_min = -2.0, u_max = 2.0;
    double g_min = -2.0, g_max = 2.0;
    double w_min = -2.0, w_max = 2.0;
};

struct ProblemSpec {
    FractionalOrder order{0.5, 1.0};
    PsiMap psi;
    double c = 0.0;  // weighted initial datum I^{1-gamma;psi} y(a) = c
    std::function<double(double, double, double)> f;          // f(x, u, g)
    std::function<double(double, double, double, double)> kernel;  // K(x, tau, u, w)
    DelayFunction delta;
    WeightFunction sigma;
    std::optional<double> lipschitz_m;  // nullopt => estimate by sampling
    std::optional<double> lipschitz_l;
    SamplingBox box;
    std::string name;
};

struct Diagnostic {
    std::string hypothesis;  // which standing hypothesis failed
    std::string message;
    double at = 0.0;
};

// Empty result means every standing hypothesis holds at all mesh points;
// evaluation failures become diagnostics, never exceptions.
std::vector<Diagnostic> validate_problem(const ProblemSpec& spec,
                                         std::span<const double> mesh);

// Sampled difference quotients over the box, inflated by 10%.
double estimate_lipschitz_m(const ProblemSpec& spec, std::span<const double> mesh,
                            std::uint64_t seed = 0x4c69707363686974ULL);
double estimate_lipschitz_l(const ProblemSpec& spec, std::span<const double> mesh,
                            std::uint64_t seed = 0x4c69707363686974ULL);

// (M, L): supplied values are passed through, missing ones estimated.
std::pair<double, double> resolve_lipschitz(const ProblemSpec& spec,
                                            std::span<const double> mesh);

}  // namespace fracstab
