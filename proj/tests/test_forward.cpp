#include <doctest.h>

#include <cmath>
#include <random>

#include "dbar/errors.hpp"
#include "dbar/field_ops.hpp"
#include "dbar/forward.hpp"
#include "dbar/phantom.hpp"
#include "oracles.hpp"

using namespace dbar;

namespace {

Potential zero_potential(int nx = 64, double L = 1.0) { return {ComplexGrid(nx, L), 0.8 * L}; }

Potential test_gaussian(double amp_scale = 1.0, int nx = 64) {
    return oracle::gaussian_potential(nx, 1.0, amp_scale * cplx(0.4, 0.3), {0.12, -0.08}, 0.25,
                                      0.8);
}

}  // namespace

TEST_CASE("zero potential gives the trivial solution exactly") {
    Potential q = zero_potential();
    for (cplx k : {cplx(0.0), cplx(1.5, -2.0), cplx(7.0, 3.0)}) {
        PsiPair pair = solve_psi_pair(q, k);
        CHECK(pair.iterations == 0);
        for (const cplx& v : pair.psi_r.samples()) CHECK(v == cplx(1.0));
        for (const cplx& v : pair.psi_i.samples()) CHECK(v == cplx(1.0));
        CHECK(scattering_transform_volume(q, pair) == cplx(0.0));
    }
}

TEST_CASE("born regime: one explicit neumann iteration is the oracle") {
    // small q: psi - 1 ~ -sign dbar^{-1}[q e(.,-k)], deviation O(|q|^2)
    Potential q = test_gaussian(0.02);
    const cplx k(0.9, 0.4);
    for (int sign : {+1, -1}) {
        ComplexGrid psi = solve_psi(q, k, sign);
        ComplexGrid first = oracle::neumann_first_term(q, k, sign);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            num = std::max(num, std::abs(psi[i] - first[i]));
            den = std::max(den, std::abs(first[i] - 1.0));
        }
        // remaining terms are O(|q|^2): about |q| relative to the first term
        CHECK(num / den < 5e-2);
    }
}

TEST_CASE("psi solution residual is re-evaluated and small") {
    Potential q = test_gaussian();
    PsiPair pair = solve_psi_pair(q, {1.0, -0.5});
    CHECK(pair.residual < 1e-9);
    CHECK(pair.iterations > 0);
}

TEST_CASE("decay of psi - 1 in k") {
    Potential q = test_gaussian();
    double prev = std::numeric_limits<double>::infinity();
    for (double ak : {2.0, 4.0, 8.0, 16.0}) {
        const cplx k = std::polar(ak, 0.37);
        ComplexGrid psi = solve_psi(q, k, +1);
        for (cplx& v : psi.samples()) v -= 1.0;
        const double norm = grid_norm(psi, 2.0);
        CHECK(norm < prev);
        prev = norm;
    }
}

TEST_CASE("boundary-ring decay of psi_r - 1 between |k|=2 and |k|=16") {
    Potential q = test_gaussian();
    auto ring_max = [&](const ComplexGrid& psi) {
        const int n = psi.nx();
        double mx = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j : {0, n - 1}) {
                mx = std::max(mx, std::abs(psi.at(i, j) - 1.0));
                mx = std::max(mx, std::abs(psi.at(j, i) - 1.0));
            }
        return mx;
    };
    ComplexGrid lo = solve_psi(q, std::polar(2.0, 0.2), +1);
    ComplexGrid hi = solve_psi(q, std::polar(16.0, 0.2), +1);
    CHECK(ring_max(hi) < ring_max(lo));
}

TEST_CASE("conjugate-reflection symmetry of the solve") {
    // psi_s(q', -conj k)(z) = conj(psi_s(q, k)(conj z)) for q'(z) = conj(q(conj z))
    const int nx = 64;
    auto fml = [](cplx z) -> cplx {
        return cplx(0.4, 0.3) * std::exp(-std::norm(z - cplx(0.12, -0.08)) / (2 * 0.25 * 0.25)) *
               bump_mask(std::abs(z), 0.8);
    };
    ComplexGrid qg(nx, 1.0), qg_refl(nx, 1.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
            qg.at(i, j) = fml(qg.node(i, j));
            qg_refl.at(i, j) = std::conj(fml(std::conj(qg_refl.node(i, j))));
        }
    Potential q(std::move(qg), 0.8), q_refl(std::move(qg_refl), 0.8);

    const cplx k(1.1, 0.6);
    ComplexGrid psi = solve_psi(q, k, +1);
    ComplexGrid psi_refl = solve_psi(q_refl, -std::conj(k), +1);
    double dev = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 1; j < nx; ++j)  // j=0 row has no mirror node
            dev = std::max(dev, std::abs(psi_refl.at(i, nx - j) - std::conj(psi.at(i, j))));
    CHECK(dev < 1e-8);
}

TEST_CASE("solve against the dense LU oracle (32x32)") {
    Potential q = test_gaussian(1.0, 32);
    const cplx k(1.0, 0.0);
    ComplexGrid a(32, 1.0);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j)
            a.at(i, j) = q.grid().at(i, j) * e_phase(a.node(i, j), -k);

    for (int sign : {+1, -1}) {
        ComplexGrid psi = solve_psi(q, k, sign);
        ComplexGrid dense = oracle::dense_dbar_solve(nullptr, a, sign);
        CHECK(relative_l2(dense, psi) < 1e-8);
    }
}

TEST_CASE("scattering transform against the dense LU oracle (64x64)") {
    // same discrete system, two independent solve routes at production size
    Potential q = test_gaussian();
    const cplx k(1.0, 0.0);
    ComplexGrid a(64, 1.0);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            a.at(i, j) = q.grid().at(i, j) * e_phase(a.node(i, j), -k);

    PsiPair pair = solve_psi_pair(q, k);
    ComplexGrid dense_r = oracle::dense_dbar_solve(nullptr, a, +1);
    ComplexGrid dense_i = oracle::dense_dbar_solve(nullptr, a, -1);
    CHECK(relative_l2(dense_r, pair.psi_r) < 1e-8);

    PsiPair dense_pair{std::move(dense_r), std::move(dense_i), k, 0, 0.0};
    const cplx t_krylov = scattering_transform_volume(q, pair);
    const cplx t_dense = scattering_transform_volume(q, dense_pair);
    CHECK(std::abs(t_krylov - t_dense) / std::abs(t_dense) < 1e-6);
}

TEST_CASE("scattering grid: zero potential, k=0 node included, determinism") {
    Potential q0 = zero_potential(32);
    ScatteringTransform t0 = scattering_grid(q0, 16, 5.0, 4.0);
    CHECK(oracle::max_abs(t0.grid) == 0.0);

    Potential q = test_gaussian();
    ScatteringTransform t1 = scattering_grid(q, 16, 5.0, 4.0, {}, 1);
    ScatteringTransform t2 = scattering_grid(q, 16, 5.0, 4.0, {}, 2);
    CHECK(oracle::max_abs_diff(t1.grid, t2.grid) == 0.0);  // bit identical across threads

    // the k = 0 node carries the (regular) zero-frequency value
    const int i0 = 8;  // node(8,8) = 0 on a 16-point grid
    CHECK(t1.grid.node(i0, i0) == cplx(0.0));
    CHECK(std::abs(t1.grid.at(i0, i0)) > 1e-6);
}

TEST_CASE("jost columns: trivial cases and the transition formulas") {
    Potential q0 = zero_potential();
    PsiPair pair0 = solve_psi_pair(q0, {0.7, 0.2});
    JostColumns j0 = jost_columns(pair0);
    CHECK(oracle::max_abs(j0.m2) == 0.0);
    for (const cplx& v : j0.m1.samples()) CHECK(v == cplx(1.0));

    // psi_r == psi_i forces m2 == 0 by the formula
    PsiPair same{pair0.psi_r, pair0.psi_r, {0.7, 0.2}, 0, 0.0};
    CHECK(oracle::max_abs(jost_columns(same).m2) == 0.0);
}

TEST_CASE("first-order system residuals") {
    Potential q0 = zero_potential();
    JostColumns j0 = jost_columns(solve_psi_pair(q0, {1.0, 0.0}));
    auto [z1, z2] = dsys_residual(j0, q0);
    CHECK(z1 == 0.0);
    CHECK(z2 == 0.0);

    Potential q = test_gaussian(1.0, 128);
    const cplx k(1.2, -0.4);

    DbarSolveOptions loose;
    loose.tol = 1e-6;
    DbarSolveOptions tight;
    tight.tol = 1e-10;
    auto [r1_loose, r2_loose] = dsys_residual(jost_columns(solve_psi_pair(q, k, loose)), q);
    auto [r1_tight, r2_tight] = dsys_residual(jost_columns(solve_psi_pair(q, k, tight)), q);
    CHECK(r1_tight < r1_loose);
    CHECK(r2_tight < r2_loose);
    CHECK(r1_tight < 1e-6);
    CHECK(r2_tight < 1e-6);
}

TEST_CASE("lemma identity: m1 - 1 = dbar^{-1}(q m2)") {
    Potential q = test_gaussian();
    JostColumns j = jost_columns(solve_psi_pair(q, {1.5, 0.7}));
    ComplexGrid qm2(64, 1.0);
    for (std::size_t i = 0; i < qm2.size(); ++i) qm2[i] = q.grid()[i] * j.m2[i];
    ComplexGrid rhs = cauchy_transform(qm2);
    double dev = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i)
        dev = std::max(dev, std::abs(j.m1[i] - 1.0 - rhs[i]));
    CHECK(dev < 1e-7);
}

TEST_CASE("solver failure carries the residual") {
    Potential q = test_gaussian();
    DbarSolveOptions opt;
    opt.max_iterations = 1;
    opt.tol = 1e-14;
    CHECK_THROWS_AS(solve_psi(q, {1.0, 0.0}, +1, opt), SolverError);
}
