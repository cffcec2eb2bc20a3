#pragma once

// Test-side oracles, independent of the library's numerical paths:
//  - ml_series_30: truncated Mittag-Leffler power series (30 terms)
//  - frac_integral_oracle: tanh-sinh quadrature of the defining integral,
//    evaluated straight from psi and psi', no product integration involved.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>

namespace oracles {

inline double ml_series_30(double alpha, double z) {
    double sum = 0.0;
    for (int k = 0; k < 30; ++k) {
        sum += std::pow(z, k) / std::tgamma(alpha * k + 1.0);
    }
    return sum;
}

// (1/Gamma(alpha)) int_a^x psi'(s) (psi(x)-psi(s))^(alpha-1) g(s) ds
inline double frac_integral_oracle(const std::function<double(double)>& g,
                                   const std::function<double(double)>& psi,
                                   const std::function<double(double)>& psi_prime,
                                   double a, double x, double alpha) {
    if (x <= a) return 0.0;
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double ux = psi(x);
    auto f = [&](double s) {
        return psi_prime(s) * std::pow(ux - psi(s), alpha - 1.0) * g(s);
    };
    const double val = integrator.integrate(f, a, x);
    return val / std::tgamma(alpha);
}

}  // namespace oracles
