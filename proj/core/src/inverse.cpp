#include "dbar/inverse.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "dbar/errors.hpp"
#include "dbar/parallel.hpp"

namespace dbar {

namespace {

ComplexGrid phase_times_t(const ScatteringTransform& t, cplx z) {
    const ComplexGrid& tg = t.grid;
    ComplexGrid a(tg.nx(), tg.L());
    for (int i = 0; i < a.nx(); ++i)
        for (int j = 0; j < a.nx(); ++j) {
            const cplx tv = tg.at(i, j);
            a.at(i, j) = tv == cplx(0.0) ? cplx(0.0) : tv * e_phase(z, -a.node(i, j));
        }
    return a;
}

}  // namespace

ComplexGrid solve_phi(const ScatteringTransform& t, cplx z, int sign, const DbarSolveOptions& opt) {
    if (sign != 1 && sign != -1) throw PreconditionError("solve_phi: sign must be +1 or -1");
    ComplexGrid a = phase_times_t(t, z);
    // dbar phi = sign t e conj(phi)  <=>  dbar phi + (-sign) t e conj(phi) = 0
    return solve_dbar_system(nullptr, a, -double(sign), opt).psi;
}

PhiPair solve_phi_pair(const ScatteringTransform& t, cplx z, const DbarSolveOptions& opt) {
    ComplexGrid a = phase_times_t(t, z);
    DbarSolution r = solve_dbar_system(nullptr, a, +1.0, opt);   // phi_r (spec sign -1)
    DbarSolution i = solve_dbar_system(nullptr, a, -1.0, opt);   // phi_i (spec sign +1)
    return {std::move(r.psi), std::move(i.psi), z, r.iterations + i.iterations,
            std::max(r.residual, i.residual)};
}

cplx reconstruct_q_at(const ScatteringTransform& t, const PhiPair& pair) {
    const ComplexGrid& tg = t.grid;
    if (!tg.same_layout(pair.phi_r)) throw PreconditionError("reconstruct_q_at: layout");
    const double h2 = tg.h() * tg.h();
    cplx acc = 0.0;
    for (int i = 0; i < tg.nx(); ++i)
        for (int j = 0; j < tg.nx(); ++j) {
            const cplx tv = tg.at(i, j);
            if (tv == cplx(0.0)) continue;
            const cplx k = tg.node(i, j);
            acc += e_phase(pair.z, k) * std::conj(tv) *
                   (pair.phi_r.at(i, j) + pair.phi_i.at(i, j));
        }
    return cplx(0.0, -1.0 / (2.0 * std::numbers::pi)) * acc * h2;
}

cplx reconstruct_q_at(const ScatteringTransform& t, cplx z, const DbarSolveOptions& opt) {
    return reconstruct_q_at(t, solve_phi_pair(t, z, opt));
}

Potential reconstruct_q(const ScatteringTransform& t, int z_nx, double z_L, double eval_radius,
                        const DbarSolveOptions& opt, int threads) {
    if (eval_radius > (1.0 - Potential::kSupportMargin) * z_L + 1e-12)
        throw PreconditionError("reconstruct_q: eval_radius exceeds the grid margin");
    ComplexGrid qg(z_nx, z_L);
    std::vector<std::size_t> nodes;
    for (int i = 0; i < z_nx; ++i)
        for (int j = 0; j < z_nx; ++j)
            if (std::abs(qg.node(i, j)) <= eval_radius) nodes.push_back(std::size_t(i) * z_nx + j);

    std::mutex fail_mutex;
    std::vector<std::pair<cplx, std::string>> failures;
    parallel_for(
        nodes.size(),
        [&](std::size_t w) {
            const std::size_t idx = nodes[w];
            const cplx z = qg.node(int(idx) / z_nx, int(idx) % z_nx);
            try {
                qg[idx] = reconstruct_q_at(t, z, opt);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                failures.emplace_back(z, e.what());
            }
        },
        threads);

    if (!failures.empty()) {
        std::ostringstream os;
        os << "reconstruct_q: " << failures.size() << " per-z solves failed; first at z=("
           << failures.front().first.real() << "," << failures.front().first.imag()
           << "): " << failures.front().second;
        throw SolverError(os.str(), 0.0);
    }
    return Potential(std::move(qg), eval_radius);
}

double identities_check(const PsiPair& psi, const PhiPair& phi, int iz, int jz, int ik, int jk) {
    const cplx z = psi.psi_r.node(iz, jz);
    const cplx k = phi.phi_r.node(ik, jk);
    if (std::abs(z - phi.z) > 1e-12 || std::abs(k - psi.k) > 1e-12)
        throw PreconditionError("identities_check: (z,k) indices do not match the pair points");

    const cplx E = std::exp(cplx(0.0, 1.0) * z * k);
    const cplx Psi_r = E * psi.psi_r.at(iz, jz);
    const cplx Psi_i = cplx(0.0, 1.0) * E * psi.psi_i.at(iz, jz);
    const cplx Phi_r = E * phi.phi_r.at(ik, jk);
    const cplx Phi_i = cplx(0.0, 1.0) * E * phi.phi_i.at(ik, jk);

    double dev = std::abs(Phi_i.real() + Psi_r.imag());
    dev = std::max(dev, std::abs(Phi_r.real() - Psi_r.real()));
    dev = std::max(dev, std::abs(Phi_i.imag() - Psi_i.imag()));
    dev = std::max(dev, std::abs(Phi_r.imag() + Psi_i.real()));
    dev = std::max(dev, std::abs((Phi_r - cplx(0.0, 1.0) * Phi_i) -
                                 (Psi_r - cplx(0.0, 1.0) * Psi_i)));
    return dev;
}

}  // namespace dbar
