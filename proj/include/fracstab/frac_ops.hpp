#pragma once

#include "fracstab/grid.hpp"
#include "fracstab/problem.hpp"

// psi-fractional operators on grid functions.
//
// The integral I^{a;psi} g (x) = 1/Gamma(a) * int_a^x psi'(s)
// (psi(x)-psi(s))^(a-1) g(s) ds is computed by product integration after the
// substitution u = psi(s): g is interpolated piecewise-linearly in the
// u-coordinate and each panel is integrated against the kernel in closed
// form, so the weak singularity never meets a quadrature rule.
//
// For a weighted input g = (u-u0)^(gamma-1) w(u) the leading singular part
// s0 (u-u0)^(gamma-1), s0 = w(u0), is integrated by the exact power rule and
// only the remainder goes through product integration.

namespace fracstab {

GridFunction frac_integral(const GridFunction& g, double alpha);

// I^{beta(1-a)} o (d/du) o I^{(1-beta)(1-a)}, the n = 1 Hilfer composition;
// the inner derivative uses three-point finite differences in u.
GridFunction hilfer_derivative(const GridFunction& g, const FractionalOrder& order);

// max interior-node residual of D^{a,b} I^{a} g - g (left-inverse identity)
double verify_left_inverse(const GridFunction& g, const FractionalOrder& order);

// max interior-node residual of
//   I^{a} D^{a,b} g - [ g - (u-u0)^(gamma-1)/Gamma(gamma) * I^{(1-b)(1-a)}g(a) ]
// with the endpoint value recovered by a {1, u^mu} fit from the first nodes.
double verify_composition(const GridFunction& g, const FractionalOrder& order);

// max_i (u_i-u0)^(1-gamma) |g_i|
double weighted_norm(const GridFunction& g, const FractionalOrder& order);

}  // namespace fracstab
