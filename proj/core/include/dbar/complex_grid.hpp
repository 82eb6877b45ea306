#pragma once

#include <complex>
#include <vector>

namespace dbar {

using cplx = std::complex<double>;

/// Uniform square grid of complex samples on [-L,L)^2.
///
/// Node (i,j) sits at z = (-L + i*h) + i(-L + j*h), h = 2L/nx, stored
/// row-major (index = i*nx + j): the first index walks the real axis.
class ComplexGrid {
public:
    ComplexGrid() = default;
    /// Zero-initialized grid. nx must be a power of two >= 8, L > 0.
    ComplexGrid(int nx, double L);
    ComplexGrid(int nx, double L, std::vector<cplx> samples);

    int nx() const { return nx_; }
    double L() const { return L_; }
    double h() const { return 2.0 * L_ / nx_; }
    std::size_t size() const { return samples_.size(); }

    cplx& at(int i, int j) { return samples_[std::size_t(i) * nx_ + j]; }
    const cplx& at(int i, int j) const { return samples_[std::size_t(i) * nx_ + j]; }
    cplx& operator[](std::size_t idx) { return samples_[idx]; }
    const cplx& operator[](std::size_t idx) const { return samples_[idx]; }

    /// z-coordinate of node (i,j).
    cplx node(int i, int j) const {
        const double h = this->h();
        return {-L_ + i * h, -L_ + j * h};
    }

    std::vector<cplx>& samples() { return samples_; }
    const std::vector<cplx>& samples() const { return samples_; }

    /// Throws PreconditionError if any sample is non-finite.
    void check_finite() const;

    /// True when every sample with |z| > radius is exactly zero.
    bool vanishes_outside(double radius) const;

    /// Zero all samples with |z| > radius.
    void mask_outside(double radius);

    bool same_layout(const ComplexGrid& other) const {
        return nx_ == other.nx_ && L_ == other.L_;
    }

private:
    int nx_ = 0;
    double L_ = 0.0;
    std::vector<cplx> samples_;
};

/// Compactly supported coefficient field on a grid. Samples are masked to
/// zero outside support_radius at construction; the radius must respect the
/// periodization margin support_radius <= (1 - margin) * L.
class Potential {
public:
    static constexpr double kSupportMargin = 0.2;

    Potential() = default;
    Potential(ComplexGrid grid, double support_radius);

    const ComplexGrid& grid() const { return grid_; }
    ComplexGrid& grid() { return grid_; }
    double support_radius() const { return support_radius_; }

private:
    ComplexGrid grid_;
    double support_radius_ = 0.0;
};

/// Unitary phase e(z,k) = exp(i(zk + conj(zk))) = exp(2i Re(zk)).
inline cplx e_phase(cplx z, cplx k) {
    return std::polar(1.0, 2.0 * (z * k).real());
}

/// Discrete L^p norm with area weight h^2: (h^2 sum |f|^p)^(1/p); p = inf -> max.
double grid_norm(const ComplexGrid& f, double p);

/// Relative L^2 distance ||a-b||_2 / ||a||_2 (plain ||a-b||_2 when a is zero).
double relative_l2(const ComplexGrid& a, const ComplexGrid& b);

}  // namespace dbar
