#include "dbar/forward.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "dbar/errors.hpp"
#include "dbar/field_ops.hpp"
#include "dbar/parallel.hpp"

namespace dbar {

ScatteringTransform::ScatteringTransform(ComplexGrid g, double K_) : grid(std::move(g)), K(K_) {
    if (!(K > 0.0)) throw PreconditionError("ScatteringTransform: K must be positive");
    if (K > (1.0 - Potential::kSupportMargin) * grid.L() + 1e-12)
        throw PreconditionError("ScatteringTransform: K exceeds the grid margin (K <= 0.8 L)");
    grid.check_finite();
    grid.mask_outside(K);
}

namespace {

ComplexGrid phase_times_conj_q(const Potential& q, cplx k) {
    const ComplexGrid& qg = q.grid();
    ComplexGrid a(qg.nx(), qg.L());
    for (int i = 0; i < a.nx(); ++i)
        for (int j = 0; j < a.nx(); ++j) {
            const cplx qv = qg.at(i, j);
            a.at(i, j) = qv == cplx(0.0) ? cplx(0.0) : qv * e_phase(a.node(i, j), -k);
        }
    return a;
}

}  // namespace

ComplexGrid solve_psi(const Potential& q, cplx k, int sign, const DbarSolveOptions& opt) {
    if (sign != 1 && sign != -1) throw PreconditionError("solve_psi: sign must be +1 or -1");
    ComplexGrid a = phase_times_conj_q(q, k);
    return solve_dbar_system(nullptr, a, double(sign), opt).psi;
}

PsiPair solve_psi_pair(const Potential& q, cplx k, const DbarSolveOptions& opt) {
    ComplexGrid a = phase_times_conj_q(q, k);
    DbarSolution r = solve_dbar_system(nullptr, a, +1.0, opt);
    DbarSolution i = solve_dbar_system(nullptr, a, -1.0, opt);
    PsiPair pair{std::move(r.psi), std::move(i.psi), k, r.iterations + i.iterations,
                 std::max(r.residual, i.residual)};
    return pair;
}

cplx scattering_transform_volume(const Potential& q, const PsiPair& pair) {
    const ComplexGrid& qg = q.grid();
    if (!qg.same_layout(pair.psi_r)) throw PreconditionError("scattering_transform_volume: layout");
    const double h2 = qg.h() * qg.h();
    cplx acc = 0.0;
    for (int i = 0; i < qg.nx(); ++i)
        for (int j = 0; j < qg.nx(); ++j) {
            const cplx qv = qg.at(i, j);
            if (qv == cplx(0.0)) continue;
            const cplx z = qg.node(i, j);
            acc += e_phase(z, pair.k) * std::conj(qv) * (pair.psi_r.at(i, j) + pair.psi_i.at(i, j));
        }
    return cplx(0.0, -1.0 / (2.0 * std::numbers::pi)) * acc * h2;
}

cplx scattering_transform_volume(const Potential& q, cplx k, const DbarSolveOptions& opt) {
    return scattering_transform_volume(q, solve_psi_pair(q, k, opt));
}

ScatteringTransform scattering_grid(const Potential& q, int k_nx, double k_L, double K,
                                    const DbarSolveOptions& opt, int threads) {
    ComplexGrid tg(k_nx, k_L);
    std::vector<std::size_t> nodes;
    for (int i = 0; i < k_nx; ++i)
        for (int j = 0; j < k_nx; ++j)
            if (std::abs(tg.node(i, j)) <= K) nodes.push_back(std::size_t(i) * k_nx + j);

    std::mutex fail_mutex;
    std::vector<std::pair<cplx, std::string>> failures;
    parallel_for(
        nodes.size(),
        [&](std::size_t w) {
            const std::size_t idx = nodes[w];
            const cplx k = tg.node(int(idx) / k_nx, int(idx) % k_nx);
            try {
                tg[idx] = scattering_transform_volume(q, k, opt);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                failures.emplace_back(k, e.what());
            }
        },
        threads);

    if (!failures.empty()) {
        std::ostringstream os;
        os << "scattering_grid: " << failures.size() << " per-k solves failed; first at k=("
           << failures.front().first.real() << "," << failures.front().first.imag()
           << "): " << failures.front().second;
        throw SolverError(os.str(), 0.0);
    }
    return {std::move(tg), K};
}

JostColumns jost_columns(const PsiPair& pair) {
    const int nx = pair.psi_r.nx();
    JostColumns j{ComplexGrid(nx, pair.psi_r.L()), ComplexGrid(nx, pair.psi_r.L()), pair.k};
    for (int i = 0; i < nx; ++i)
        for (int jj = 0; jj < nx; ++jj) {
            const cplx pr = pair.psi_r.at(i, jj), pi = pair.psi_i.at(i, jj);
            j.m1.at(i, jj) = 0.5 * (pr + pi);
            j.m2.at(i, jj) =
                0.5 * e_phase(j.m1.node(i, jj), -pair.k) * (std::conj(pi) - std::conj(pr));
        }
    return j;
}

std::pair<double, double> dsys_residual(const JostColumns& j, const Potential& q) {
    const ComplexGrid& qg = q.grid();
    const int nx = qg.nx();
    if (!qg.same_layout(j.m1)) throw PreconditionError("dsys_residual: layout");

    // r1: (m1 - 1) - dbar^{-1}(q m2)
    ComplexGrid qm2(nx, qg.L());
    for (std::size_t i = 0; i < qm2.size(); ++i) qm2[i] = qg[i] * j.m2[i];
    ComplexGrid t1 = cauchy_transform(qm2);
    for (std::size_t i = 0; i < t1.size(); ++i) t1[i] = (j.m1[i] - 1.0) - t1[i];

    // r2: conj(m2) - e(z,k) dbar^{-1}( e(z,-k) q conj(m1) )
    ComplexGrid src(nx, qg.L());
    for (int i = 0; i < nx; ++i)
        for (int jj = 0; jj < nx; ++jj) {
            const cplx qv = qg.at(i, jj);
            src.at(i, jj) = qv == cplx(0.0) ? cplx(0.0)
                                            : e_phase(src.node(i, jj), -j.k) * qv *
                                                  std::conj(j.m1.at(i, jj));
        }
    ComplexGrid t2 = cauchy_transform(src);
    for (int i = 0; i < nx; ++i)
        for (int jj = 0; jj < nx; ++jj)
            t2.at(i, jj) = std::conj(j.m2.at(i, jj)) - e_phase(t2.node(i, jj), j.k) * t2.at(i, jj);

    return {grid_norm(t1, 2.0), grid_norm(t2, 2.0)};
}

}  // namespace dbar
