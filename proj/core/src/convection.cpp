#include "dbar/convection.hpp"

#include <cmath>
#include <numbers>

#include "dbar/errors.hpp"
#include "dbar/field_ops.hpp"

namespace dbar {

namespace {

void require_real(const ComplexGrid& g, const char* name) {
    for (const cplx& v : g.samples())
        if (v.imag() != 0.0)
            throw PreconditionError(std::string("ConvectionField: ") + name +
                                    " must be real-valued");
}

ComplexGrid conj_b_phase(const ConvectionField& f, cplx k) {
    const ComplexGrid& bg = f.b().grid();
    ComplexGrid a(bg.nx(), bg.L());
    for (int i = 0; i < a.nx(); ++i)
        for (int j = 0; j < a.nx(); ++j) {
            const cplx bv = bg.at(i, j);
            a.at(i, j) = bv == cplx(0.0) ? cplx(0.0)
                                         : e_phase(a.node(i, j), -k) * std::conj(bv);
        }
    return a;
}

double variant_sign(char variant) {
    if (variant == 'r') return +1.0;
    if (variant == 'i') return -1.0;
    throw PreconditionError("solve_w: variant must be 'r' or 'i'");
}

}  // namespace

ConvectionField::ConvectionField(ComplexGrid b1, ComplexGrid b2, double support_radius)
    : b1_(std::move(b1)), b2_(std::move(b2)) {
    if (!b1_.same_layout(b2_)) throw PreconditionError("ConvectionField: b1/b2 layouts differ");
    require_real(b1_, "b1");
    require_real(b2_, "b2");
    b1_.mask_outside(support_radius);
    b2_.mask_outside(support_radius);
    ComplexGrid bc(b1_.nx(), b1_.L());
    for (std::size_t i = 0; i < bc.size(); ++i)
        bc[i] = cplx(b1_[i].real(), b2_[i].real()) * 0.25;
    b_ = Potential(std::move(bc), support_radius);
}

Potential q_from_b(const ConvectionField& f) {
    const ComplexGrid& bg = f.b().grid();
    ComplexGrid A = cauchy_transform(bg);
    ComplexGrid qg(bg.nx(), bg.L());
    for (std::size_t i = 0; i < qg.size(); ++i) {
        const cplx bv = bg[i];
        // unit-modulus factor keeps |q| = |b| to the last bit
        qg[i] = bv == cplx(0.0) ? cplx(0.0)
                                : std::conj(bv) * std::polar(1.0, 2.0 * A[i].imag());
    }
    return Potential(std::move(qg), f.support_radius());
}

ComplexGrid solve_w(const ConvectionField& f, cplx k, char variant, const DbarSolveOptions& opt) {
    const double s = variant_sign(variant);
    ComplexGrid a = conj_b_phase(f, k);
    return solve_dbar_system(&f.b().grid(), a, s, opt).psi;
}

std::vector<cplx> solve_w_trace(const ConvectionField& f, cplx k, char variant, int m,
                                const DbarSolveOptions& opt) {
    if (f.support_radius() >= 1.0)
        throw PreconditionError("solve_w_trace: support must stay inside the unit circle");
    const double s = variant_sign(variant);
    ComplexGrid a = conj_b_phase(f, k);
    ComplexGrid w = solve_dbar_system(&f.b().grid(), a, s, opt).psi;
    ComplexGrid src = dbar_source_field(w, &f.b().grid(), a, s);
    std::vector<cplx> circle(m);
    for (int j = 0; j < m; ++j)
        circle[j] = std::polar(1.0, 2.0 * std::numbers::pi * j / m);
    std::vector<cplx> tail = cauchy_transform_at(src, circle);
    std::vector<cplx> trace(m);
    for (int j = 0; j < m; ++j) trace[j] = 1.0 - tail[j];
    return trace;
}

PhaseUnwrapResult phase_unwrap(const Potential& q, const DbarSolveOptions& opt) {
    const ComplexGrid& qg = q.grid();
    ComplexGrid a(qg.nx(), qg.L());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::conj(qg[i]);
    DbarSolution sol = solve_dbar_system(nullptr, a, +1.0, opt);

    double vmax = 0.0;
    for (const cplx& v : sol.psi.samples()) vmax = std::max(vmax, std::abs(v));
    const double tau = 1e-8 * vmax;

    ComplexGrid bg(qg.nx(), qg.L());
    int fallback = 0;
    for (std::size_t i = 0; i < bg.size(); ++i) {
        const cplx v = sol.psi[i];
        if (std::abs(v) > tau) {
            bg[i] = std::conj(qg[i]) * std::conj(v) / v;
        } else {
            bg[i] = qg[i];
            if (qg[i] != cplx(0.0)) ++fallback;
        }
    }
    PhaseUnwrapResult out{Potential(std::move(bg), q.support_radius()), std::move(sol.psi),
                          fallback, sol.residual};
    return out;
}

std::pair<double, double> elliptic_residual(const ConvectionField& f, const ComplexGrid& u) {
    const ComplexGrid& b1 = f.b1();
    if (!u.same_layout(b1)) throw PreconditionError("elliptic_residual: layout");
    require_real(u, "u");
    const int n = u.nx();
    const double h = u.h();

    // w = d u on the 1-cell interior
    ComplexGrid w(n, u.L());
    for (int i = 1; i < n - 1; ++i)
        for (int j = 1; j < n - 1; ++j) {
            const double ux = (u.at(i + 1, j).real() - u.at(i - 1, j).real()) / (2 * h);
            const double uy = (u.at(i, j + 1).real() - u.at(i, j - 1).real()) / (2 * h);
            w.at(i, j) = cplx(ux, -uy) * 0.5;
        }

    const double h2w = h * h;
    double acc1 = 0.0, acc2 = 0.0;
    for (int i = 2; i < n - 2; ++i)
        for (int j = 2; j < n - 2; ++j) {
            const double ux = (u.at(i + 1, j).real() - u.at(i - 1, j).real()) / (2 * h);
            const double uy = (u.at(i, j + 1).real() - u.at(i, j - 1).real()) / (2 * h);
            const double lap = (u.at(i + 1, j).real() + u.at(i - 1, j).real() +
                                u.at(i, j + 1).real() + u.at(i, j - 1).real() -
                                4.0 * u.at(i, j).real()) /
                               (h * h);
            const double r1 = lap + b1.at(i, j).real() * ux + f.b2().at(i, j).real() * uy;
            acc1 += r1 * r1;

            const cplx wx = (w.at(i + 1, j) - w.at(i - 1, j)) / (2 * h);
            const cplx wy = (w.at(i, j + 1) - w.at(i, j - 1)) / (2 * h);
            const cplx dbar_w = 0.5 * (wx + cplx(0.0, 1.0) * wy);
            const cplx bv = f.b().grid().at(i, j);
            const cplx wv = w.at(i, j);
            const cplx r2 = dbar_w + std::conj(bv) * std::conj(wv) + bv * wv;
            acc2 += std::norm(r2);
        }
    return {std::sqrt(h2w * acc1), 4.0 * std::sqrt(h2w * acc2)};
}

}  // namespace dbar
