#pragma once

namespace fracstab {

// Two-parameter Mittag-Leffler function E_{a,b}(z) = sum_k z^k / Gamma(a*k+b)
// for a > 0 and real z. Power series with compensated accumulation on
// |z| <= 40, exponential asymptotics for large positive z; throws
// std::domain_error outside the supported range.
double mittag_leffler(double a, double b, double z);

inline double mittag_leffler(double a, double z) { return mittag_leffler(a, 1.0, z); }

}  // namespace fracstab
