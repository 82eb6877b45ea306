#include "dbar/dbar_system.hpp"

#include <cstring>

#include "dbar/errors.hpp"
#include "dbar/field_ops.hpp"

namespace dbar {

namespace {

void to_vector(const ComplexGrid& g, Eigen::VectorXd& v) {
    v.resize(2 * Eigen::Index(g.size()));
    std::memcpy(v.data(), g.samples().data(), sizeof(cplx) * g.size());
}

void from_vector(const Eigen::VectorXd& v, ComplexGrid& g) {
    std::memcpy(static_cast<void*>(g.samples().data()), v.data(), sizeof(cplx) * g.size());
}

}  // namespace

ComplexGrid dbar_source_field(const ComplexGrid& psi, const ComplexGrid* c,
                              const ComplexGrid& a, double sign) {
    ComplexGrid w(a.nx(), a.L());
    for (std::size_t i = 0; i < w.size(); ++i) {
        cplx v = sign * a[i] * std::conj(psi[i]);
        if (c) v += (*c)[i] * psi[i];
        w[i] = v;
    }
    return w;
}

DbarSolution solve_dbar_system(const ComplexGrid* c, const ComplexGrid& a, double sign,
                               const DbarSolveOptions& opt) {
    if (c && !c->same_layout(a))
        throw PreconditionError("solve_dbar_system: coefficient grids differ in layout");
    const int nx = a.nx();
    const double L = a.L();

    // right-hand side field: -dbar^{-1}[c + s a]
    ComplexGrid rhs_field(nx, L);
    bool all_zero = true;
    for (std::size_t i = 0; i < rhs_field.size(); ++i) {
        cplx v = sign * a[i];
        if (c) v += (*c)[i];
        rhs_field[i] = v;
        if (v != cplx(0.0)) all_zero = false;
    }
    DbarSolution sol{ComplexGrid(nx, L), 0, 0.0};
    if (all_zero) {
        for (cplx& v : sol.psi.samples()) v = 1.0;
        return sol;
    }
    rhs_field = cauchy_transform(rhs_field);
    for (cplx& v : rhs_field.samples()) v = -v;

    ComplexGrid scratch(nx, L);
    auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
        from_vector(in, scratch);
        ComplexGrid w(nx, L);
        for (std::size_t i = 0; i < w.size(); ++i) {
            cplx v = sign * a[i] * std::conj(scratch[i]);
            if (c) v += (*c)[i] * scratch[i];
            w[i] = v;
        }
        w = cauchy_transform(w);
        out.resize(in.size());
        const auto* ws = reinterpret_cast<const double*>(w.samples().data());
        for (Eigen::Index i = 0; i < in.size(); ++i) out[i] = in[i] + ws[i];
    };

    Eigen::VectorXd b, x;
    to_vector(rhs_field, b);
    x = Eigen::VectorXd::Zero(b.size());

    GmresOptions gopt;
    gopt.tol = opt.tol;
    gopt.restart = opt.restart;
    gopt.max_iterations = opt.max_iterations;
    GmresResult res = gmres(apply, b, x, gopt);

    // re-evaluate the residual of the integral equation on the grid
    Eigen::VectorXd check;
    apply(x, check);
    const double rel = (check - b).norm() / b.norm();
    if (!res.converged && rel > opt.tol * 10.0)
        throw SolverError("solve_dbar_system: GMRES did not converge (relative residual " +
                              std::to_string(rel) + ")",
                          rel);

    from_vector(x, sol.psi);
    for (cplx& v : sol.psi.samples()) v += 1.0;  // psi = 1 + mu
    sol.iterations = res.iterations;
    sol.residual = rel;
    return sol;
}

}  // namespace dbar
