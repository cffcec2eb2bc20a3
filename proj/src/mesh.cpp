#include "fracstab/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracstab/kernels.hpp"
#include "fracstab/problem.hpp"

namespace fracstab {

Mesh Mesh::graded(double a, double b, std::size_t panels, double r) {
    if (!(b > a)) throw std::invalid_argument("Mesh::graded: requires b > a");
    if (panels < 2) throw std::invalid_argument("Mesh::graded: requires at least 2 panels");
    if (!(r >= 1.0)) throw std::invalid_argument("Mesh::graded: grading must be >= 1");
    Mesh m;
    m.grading = r;
    m.nodes.resize(panels + 1);
    const double span = b - a;
    for (std::size_t i = 0; i <= panels; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(panels);
        m.nodes[i] = a + span * std::pow(t, r);
    }
    m.nodes.front() = a;
    m.nodes.back() = b;
    return m;
}

Mesh Mesh::stacked_units(double a, int units, std::size_t per_unit, double r) {
    if (units < 1) throw std::invalid_argument("Mesh::stacked_units: units must be >= 1");
    Mesh m = graded(a, a + 1.0, per_unit, r);
    for (int k = 1; k < units; ++k) {
        const double left = a + static_cast<double>(k);
        for (std::size_t i = 1; i <= per_unit; ++i) {
            m.nodes.push_back(left + static_cast<double>(i) / static_cast<double>(per_unit));
        }
    }
    return m;
}

PsiGrid::PsiGrid(Mesh mesh, const PsiMap& psi) : mesh_(std::move(mesh)) {
    const std::size_t n = mesh_.nodes.size();
    if (n < 2) throw std::invalid_argument("PsiGrid: mesh needs at least 2 nodes");
    u_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        u_[i] = psi.psi(mesh_.nodes[i]);
        if (!std::isfinite(u_[i]))
            throw std::invalid_argument("PsiGrid: psi evaluates non-finite at a mesh node");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(u_[i] > u_[i - 1]))
            throw std::invalid_argument("PsiGrid: psi is not strictly increasing on the mesh");
    }
    h_.resize(n - 1);
    hinv_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h_[i] = u_[i + 1] - u_[i];
        hinv_[i] = 1.0 / h_[i];
    }
    hs2inv_.resize(n - 1, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) hs2inv_[i] = 1.0 / (u_[i + 1] - u_[i - 1]);
    du0_.resize(n);
    for (std::size_t i = 0; i < n; ++i) du0_[i] = u_[i] - u_[0];
}

std::vector<double> PsiGrid::du0_pow(double e) const {
    std::vector<double> out(du0_.size());
    if (e == 0.0) {
        out.assign(du0_.size(), 1.0);
        return out;
    }
    kernels::active().pow_pos(du0_.data(), du0_.size(), e, out.data());
    out[0] = 0.0;  // continuous limit for e > 0; e < 0 callers skip node 0
    return out;
}

PsiGridPtr make_grid(Mesh mesh, const PsiMap& psi) {
    return std::make_shared<const PsiGrid>(std::move(mesh), psi);
}

GridFunction::GridFunction(PsiGridPtr grid, std::vector<double> values, Rep rep,
                           double exponent)
    : grid_(std::move(grid)), values_(std::move(values)), rep_(rep), exponent_(exponent) {
    if (!grid_) throw std::invalid_argument("GridFunction: null grid");
    if (values_.size() != grid_->size())
        throw std::invalid_argument("GridFunction: value count does not match mesh");
}

GridFunction GridFunction::plain(PsiGridPtr grid, std::vector<double> values) {
    return GridFunction(std::move(grid), std::move(values), Rep::plain, 0.0);
}

GridFunction GridFunction::weighted(PsiGridPtr grid, std::vector<double> values,
                                    double exponent) {
    if (!(exponent >= 0.0))
        throw std::invalid_argument("GridFunction::weighted: exponent must be >= 0");
    return GridFunction(std::move(grid), std::move(values), Rep::weighted, exponent);
}

double GridFunction::plain_at(std::size_t i) const {
    if (rep_ == Rep::plain || exponent_ == 0.0) return values_[i];
    if (i == 0) {
        if (values_[0] == 0.0) return 0.0;
        return std::copysign(std::numeric_limits<double>::infinity(), values_[0]);
    }
    return values_[i] * std::pow(grid_->du0()[i], -exponent_);
}

std::vector<double> GridFunction::plain_values() const {
    if (rep_ == Rep::plain || exponent_ == 0.0) return values_;
    std::vector<double> out(values_.size());
    const auto w = grid_->du0_pow(-exponent_);
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = values_[i] * w[i];
    out[0] = plain_at(0);
    return out;
}

GridFunction GridFunction::to_plain() const {
    if (rep_ == Rep::plain) return *this;
    return plain(grid_, plain_values());
}

GridFunction GridFunction::to_weighted(double exponent) const {
    if (rep_ == Rep::weighted && exponent_ == exponent) return *this;
    if (rep_ == Rep::weighted) return to_plain().to_weighted(exponent);
    if (exponent == 0.0) return weighted(grid_, values_, 0.0);

    std::vector<double> out(values_.size());
    const auto w = grid_->du0_pow(exponent);
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = values_[i] * w[i];
    // limit at the left endpoint from the first two interior nodes
    if (out.size() >= 3) {
        const auto du = grid_->du0();
        const double t = du[1] / (du[2] - du[1]);
        out[0] = out[1] - t * (out[2] - out[1]);
    } else {
        out[0] = out[1];
    }
    return weighted(grid_, std::move(out), exponent);
}

}  // namespace fracstab
