#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fracstab {

struct PsiMap;

// Node set x_0 = a < ... < x_N. graded() clusters nodes at the left endpoint
// as x_i = a + (b-a)(i/N)^r to resolve the (psi(x)-psi(a))^(gamma-1) layer.
struct Mesh {
    std::vector<double> nodes;
    double grading = 1.0;

    static Mesh graded(double a, double b, std::size_t panels, double r);

    // First unit [a, a+1] graded, subsequent units uniform: the mesh for
    // [a, a+n] is then an exact prefix of the mesh for [a, a+n+1].
    static Mesh stacked_units(double a, int units, std::size_t per_unit, double r);

    std::size_t size() const { return nodes.size(); }
};

// Mesh plus the psi-coordinate geometry every operator works in.
class PsiGrid {
  public:
    PsiGrid(Mesh mesh, const PsiMap& psi);

    std::span<const double> x() const { return mesh_.nodes; }
    std::span<const double> u() const { return u_; }
    std::span<const double> h() const { return h_; }        // u_{j+1}-u_j
    std::span<const double> hinv() const { return hinv_; }  // 1/(u_{j+1}-u_j)
    std::span<const double> hs2inv() const { return hs2inv_; }  // 1/(u_{j+1}-u_{j-1})
    std::span<const double> du0() const { return du0_; }    // u_i - u_0
    double u0() const { return u_.front(); }
    double u_end() const { return u_.back(); }
    std::size_t size() const { return mesh_.nodes.size(); }
    const Mesh& mesh() const { return mesh_; }

    // (u_i - u_0)^e elementwise; node 0 by the continuous limit (0 for e>0).
    std::vector<double> du0_pow(double e) const;

  private:
    Mesh mesh_;
    std::vector<double> u_, h_, hinv_, hs2inv_, du0_;
};

using PsiGridPtr = std::shared_ptr<const PsiGrid>;

PsiGridPtr make_grid(Mesh mesh, const PsiMap& psi);

enum class Rep { plain, weighted };

// Scalar function sampled on a PsiGrid. The weighted representation stores
// w_i = (u_i - u_0)^e * y(x_i) with e = 1-gamma, which stays finite at x_0
// for solutions with the admissible endpoint singularity.
class GridFunction {
  public:
    static GridFunction plain(PsiGridPtr grid, std::vector<double> values);
    static GridFunction weighted(PsiGridPtr grid, std::vector<double> values,
                                 double exponent);

    Rep rep() const { return rep_; }
    double exponent() const { return exponent_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }
    const PsiGridPtr& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double plain_at(std::size_t i) const;
    std::vector<double> plain_values() const;

    GridFunction to_plain() const;
    // Node 0 of a plain->weighted conversion is set by linear extrapolation
    // of the weighted values in u, matching the continuous limit.
    GridFunction to_weighted(double exponent) const;

  private:
    GridFunction(PsiGridPtr grid, std::vector<double> values, Rep rep, double exponent);

    PsiGridPtr grid_;
    std::vector<double> values_;
    Rep rep_;
    double exponent_;
};

}  // namespace fracstab
