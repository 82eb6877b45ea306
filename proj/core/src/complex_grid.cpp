#include "dbar/complex_grid.hpp"

#include <cmath>
#include <limits>

#include "dbar/errors.hpp"

namespace dbar {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

ComplexGrid::ComplexGrid(int nx, double L) : nx_(nx), L_(L), samples_(std::size_t(nx) * nx) {
    if (nx < 8 || !power_of_two(nx))
        throw PreconditionError("ComplexGrid: nx must be a power of two >= 8, got " +
                                std::to_string(nx));
    if (!(L > 0.0)) throw PreconditionError("ComplexGrid: L must be positive");
}

ComplexGrid::ComplexGrid(int nx, double L, std::vector<cplx> samples) : ComplexGrid(nx, L) {
    if (samples.size() != std::size_t(nx) * nx)
        throw PreconditionError("ComplexGrid: sample count does not match nx*nx");
    samples_ = std::move(samples);
}

void ComplexGrid::check_finite() const {
    for (const cplx& v : samples_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw PreconditionError("ComplexGrid: non-finite sample");
}

bool ComplexGrid::vanishes_outside(double radius) const {
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < nx_; ++j)
            if (std::abs(node(i, j)) > radius && at(i, j) != cplx(0.0, 0.0)) return false;
    return true;
}

void ComplexGrid::mask_outside(double radius) {
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < nx_; ++j)
            if (std::abs(node(i, j)) > radius) at(i, j) = 0.0;
}

Potential::Potential(ComplexGrid grid, double support_radius)
    : grid_(std::move(grid)), support_radius_(support_radius) {
    const double limit = (1.0 - kSupportMargin) * grid_.L();
    if (support_radius > limit + 1e-12)
        throw PreconditionError("Potential: support_radius " + std::to_string(support_radius) +
                                " exceeds (1-margin)*L = " + std::to_string(limit));
    grid_.check_finite();
    grid_.mask_outside(support_radius);
}

double grid_norm(const ComplexGrid& f, double p) {
    if (p == std::numeric_limits<double>::infinity()) {
        double m = 0.0;
        for (const cplx& v : f.samples()) m = std::max(m, std::abs(v));
        return m;
    }
    if (p < 1.0) throw PreconditionError("grid_norm: p must be >= 1 or inf");
    const double h2 = f.h() * f.h();
    double acc = 0.0;
    if (p == 2.0) {
        for (const cplx& v : f.samples()) acc += std::norm(v);
    } else if (p == 1.0) {
        for (const cplx& v : f.samples()) acc += std::abs(v);
    } else {
        for (const cplx& v : f.samples()) acc += std::pow(std::abs(v), p);
    }
    return std::pow(h2 * acc, 1.0 / p);
}

double relative_l2(const ComplexGrid& a, const ComplexGrid& b) {
    if (!a.same_layout(b)) throw PreconditionError("relative_l2: grid layouts differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(a[i]);
    }
    num = std::sqrt(num);
    den = std::sqrt(den);
    return den == 0.0 ? num : num / den;
}

}  // namespace dbar
