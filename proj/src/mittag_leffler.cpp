#include "fracstab/mittag_leffler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fracstab {

namespace {

double series(double a, double b, double z) {
    // terms via lgamma so large a*k+b cannot overflow the intermediate
    long double sum = 0.0L;
    const double alz = std::log(std::fabs(z));
    double sign_z = z < 0 ? -1.0 : 1.0;
    double sgn = 1.0;
    for (int k = 0; k < 320; ++k) {
        const double arg = a * k + b;
        double term;
        if (arg <= 0.0 && arg == std::floor(arg)) {
            term = 0.0;  // 1/Gamma at a non-positive integer
        } else if (k == 0) {
            term = 1.0 / std::tgamma(b);
        } else {
            term = sgn * std::exp(k * alz - std::lgamma(arg));
            if (arg < 0.0 && std::fmod(std::ceil(-arg), 2.0) == 1.0) term = -term;
        }
        sum += term;
        if (k > 4 && std::fabs(term) < 1e-18 * std::fabs(static_cast<double>(sum)) + 1e-300)
            break;
        sgn *= sign_z;
    }
    return static_cast<double>(sum);
}

}  // namespace

double mittag_leffler(double a, double b, double z) {
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z))
        throw std::domain_error("mittag_leffler: requires finite arguments and a > 0");
    if (z == 0.0) return 1.0 / std::tgamma(b);
    if (std::fabs(z) <= 40.0) return series(a, b, z);
    if (z > 0.0 && a <= 2.0) {
        // leading exponential branch plus the algebraic tail
        const double zr = std::pow(z, 1.0 / a);
        double s = std::pow(z, (1.0 - b) / a) * std::exp(zr) / a;
        for (int k = 1; k <= 10; ++k) {
            const double arg = b - a * k;
            if (arg <= 0.0 && arg == std::floor(arg)) continue;
            s -= std::pow(z, -k) / std::tgamma(arg);
        }
        return s;
    }
    throw std::domain_error("mittag_leffler: |z| = " + std::to_string(std::fabs(z)) +
                            " outside the supported evaluation range");
}

}  // namespace fracstab
