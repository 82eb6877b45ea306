// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Thresholds are pinned here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dbar/boundary.hpp"
#include "dbar/convection.hpp"
#include "dbar/field_ops.hpp"
#include "dbar/forward.hpp"
#include "dbar/grid_io.hpp"
#include "dbar/inverse.hpp"
#include "dbar/phantom.hpp"
#include "dbar/pipeline.hpp"
#include "oracles.hpp"

using namespace dbar;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void run(int num, const std::string& what, const std::function<std::string()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
        detail = fn();
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!ok || detail.rfind("FAIL", 0) == 0) {
        ++g_failures;
        std::printf("[FAIL] criterion %2d: %s -- %s (%.1fs)\n", num, what.c_str(), detail.c_str(),
                    secs);
    } else {
        std::printf("[PASS] criterion %2d: %s -- %s (%.1fs)\n", num, what.c_str(), detail.c_str(),
                    secs);
    }
    std::fflush(stdout);
}

std::string pass(double value, double threshold, const char* label) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s = %.3e (<= %.1e)", label, value, threshold);
    return (value <= threshold ? std::string(buf) : "FAIL " + std::string(buf));
}

Phantom standard_phantom() {
    Phantom p;
    p.kind = Phantom::Kind::gauss;
    p.amplitude = 0.3;
    p.centers = {{0.15, 0.1}, {-0.1, 0.12}};
    p.widths = {0.25, 0.3};
    p.support_radius = 0.8;
    return p;
}

const std::vector<cplx>& low_k_samples() {
    static std::vector<cplx> ks = {{1.5, -0.7}, {3.0, 0.0}, {2.0, 2.0}, {0.0, 0.5}, {-2.5, 0.5}};
    return ks;
}

BoundaryFunction oracle_trace(const ConvectionField& f, cplx k, char variant, int m = 256) {
    std::vector<cplx> w = solve_w_trace(f, k, variant, m);
    BoundaryFunction h(m);
    const cplx ii(0.0, 1.0);
    const cplx pre = variant == 'i' ? ii : cplx(1.0);
    for (int j = 0; j < m; ++j) h.values[j] = pre * std::exp(ii * h.node(j) * k) * w[j];
    return h;
}

// ---------------------------------------------------------------------------

std::string c1_zero_potential() {
    const auto t0 = std::chrono::steady_clock::now();
    Potential q0(ComplexGrid(128, 1.1), 0.88);
    PsiPair pair = solve_psi_pair(q0, {1.0, -2.0});
    for (const cplx& v : pair.psi_r.samples())
        if (v != cplx(1.0)) return "FAIL psi_r not identically 1";
    for (const cplx& v : pair.psi_i.samples())
        if (v != cplx(1.0)) return "FAIL psi_i not identically 1";

    double tmax = 0.0;
    for (int i = 0; i < 33; ++i)
        for (int j = 0; j < 33; ++j) {
            const cplx k(-8.0 + 0.5 * i, -8.0 + 0.5 * j);
            if (std::abs(k) > 8.0) continue;
            tmax = std::max(tmax, std::abs(scattering_transform_volume(q0, k)));
        }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 10.0) return "FAIL runtime " + std::to_string(secs) + "s (>= 10s)";
    return pass(tmax, 1e-12, "max |t| on 33x33 grid");
}

double disk_error(int nx) {
    const double L = 1.25;
    ComplexGrid f(nx, L);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) f.at(i, j) = std::abs(f.node(i, j)) < 1.0 ? 1.0 : 0.0;
    ComplexGrid g = cauchy_transform(f);
    double err = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
            const cplx z = g.node(i, j);
            const cplx exact = std::abs(z) < 1.0 ? std::conj(z) : 1.0 / z;
            err = std::max(err, std::abs(g.at(i, j) - exact));
        }
    return err;
}

std::string c2_disk() {
    const double e256 = disk_error(256);
    const double e128 = disk_error(128);
    const double h256 = 2.0 * 1.25 / 256;
    if (e256 > 3.0 * h256)
        return "FAIL max err " + std::to_string(e256) + " > 3h = " + std::to_string(3 * h256);
    const double ratio = e128 / e256;
    if (ratio < 1.5) return "FAIL error ratio " + std::to_string(ratio) + " < 1.5";
    char buf[120];
    std::snprintf(buf, sizeof(buf), "max err %.3e <= 3h = %.3e, ratio %.2f >= 1.5", e256,
                  3 * h256, ratio);
    return buf;
}

std::string c3_born() {
    const std::vector<cplx> ks = {{1.0, 0.5}, {2.0, 0.0}, {0.5, -1.0}};
    std::vector<double> devs;
    for (double delta : {0.1, 0.05, 0.025}) {
        Potential q =
            oracle::gaussian_potential(64, 1.0, delta * cplx(0.8, 0.6), {0.1, -0.05}, 0.25, 0.8);
        double worst = 0.0;
        for (cplx k : ks) {
            const cplx t = scattering_transform_volume(q, k);
            const cplx tl = oracle::born_linearized_t(q, k);
            worst = std::max(worst, std::abs(t - tl) / std::abs(tl));
        }
        devs.push_back(worst);
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf), "deviation %.2e -> %.2e -> %.2e, ratios %.2f, %.2f", devs[0],
                  devs[1], devs[2], devs[0] / devs[1], devs[1] / devs[2]);
    for (int i = 0; i + 1 < int(devs.size()); ++i) {
        const double r = devs[i] / devs[i + 1];
        if (r < 1.5 || r > 2.5) return "FAIL halving ratio out of [1.5, 2.5]: " + std::string(buf);
    }
    return buf;
}

struct RoundTripState {
    Potential q;                        // ||q||_inf = 0.5, nx = 128
    ScatteringTransform t;              // K = 8 on a 64-point grid
    double forward_seconds = 0.0;
};

RoundTripState& round_trip_state() {
    static RoundTripState st = [] {
        const auto t0 = std::chrono::steady_clock::now();
        Potential q =
            oracle::gaussian_potential(128, 1.1, {0.4, 0.3}, {0.12, -0.08}, 0.25, 0.8);
        ScatteringTransform t = scattering_grid(q, 64, 10.0, 8.0);
        return RoundTripState{
            std::move(q), std::move(t),
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
    }();
    return st;
}

std::string c4_identities() {
    // dedicated transform at ||q||_inf = 0.3
    Potential q = oracle::gaussian_potential(128, 1.1, {0.18, 0.24}, {0.12, -0.08}, 0.25, 0.8);
    ScatteringTransform t = scattering_grid(q, 64, 10.0, 8.0);

    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> zi(40, 88), ki(16, 48);
    double dev = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const int iz = zi(rng), jz = zi(rng), ik = ki(rng), jk = ki(rng);
        PsiPair psi = solve_psi_pair(q, t.grid.node(ik, jk));
        PhiPair phi = solve_phi_pair(t, q.grid().node(iz, jz));
        dev = std::max(dev, identities_check(psi, phi, iz, jz, ik, jk));
    }
    return pass(dev, 1e-4, "max identity deviation over 5 (z,k) pairs");
}

std::string c5_roundtrip() {
    RoundTripState& st = round_trip_state();
    const auto t0 = std::chrono::steady_clock::now();
    Potential qhat = reconstruct_q(st.t, 128, 1.1, 0.85);
    const double rel = relative_l2(st.q.grid(), qhat.grid());
    const double secs =
        st.forward_seconds +
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 600.0) return "FAIL runtime " + std::to_string(secs) + "s (>= 600s)";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "rel L2 err %.4f (<= 0.05), forward+invert %.0fs", rel, secs);
    return rel <= 0.05 ? std::string(buf) : "FAIL " + std::string(buf);
}

std::string c6_link() {
    ConvectionField f = make_phantom(standard_phantom(), 128, 1.1);
    Potential q = q_from_b(f);
    double mod_dev = 0.0;
    for (std::size_t i = 0; i < q.grid().size(); ++i)
        mod_dev = std::max(mod_dev,
                           std::abs(std::abs(q.grid()[i]) - std::abs(f.b().grid()[i])));
    if (mod_dev > 1e-12) return pass(mod_dev, 1e-12, "max ||q|-|b||");
    PhaseUnwrapResult r = phase_unwrap(q);
    const double rel = relative_l2(f.b().grid(), r.b.grid());
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max ||q|-|b|| = %.1e (<= 1e-12), unwrap rel %.2e (<= 1e-5)",
                  mod_dev, rel);
    return rel <= 1e-5 ? std::string(buf) : "FAIL " + std::string(buf);
}

struct DtnState {
    ConvectionField field;
    ConvectionField zero;
    DtNOperator dtn;
    DtNOperator dtn0;
};

DtnState& dtn_state() {
    static DtnState st = [] {
        ConvectionField f = make_phantom(standard_phantom(), 128, 1.1);
        Phantom pz = standard_phantom();
        pz.amplitude = 0.0;
        ConvectionField z = make_phantom(pz, 128, 1.1);
        DtNOperator d = assemble_dtn(f, 32);
        DtNOperator d0 = assemble_dtn(z, 32);
        return DtnState{std::move(f), std::move(z), std::move(d), std::move(d0)};
    }();
    return st;
}

std::string c7_dtn() {
    DtnState& st = dtn_state();
    const int M = st.dtn0.modes;
    double diag_dev = 0.0;
    for (int a = -16; a <= 16; ++a)
        for (int b = -16; b <= 16; ++b)
            diag_dev = std::max(diag_dev, std::abs(st.dtn0.matrix(b + M, a + M) -
                                                   cplx(a == b ? std::abs(a) : 0.0)));
    if (diag_dev > 1e-8) return pass(diag_dev, 1e-8, "b=0 DtN diagonal deviation");

    double hdev = 0.0;
    for (int n = 1; n <= 8; ++n) {
        BoundaryFunction f(256);
        for (int j = 0; j < 256; ++j) f.values[j] = std::sin(n * f.theta(j));
        BoundaryFunction Hf = hilbert_Hb(st.dtn0, f);
        for (int j = 0; j < 256; ++j)
            hdev = std::max(hdev, std::abs(Hf.values[j] - std::cos(n * Hf.theta(j))));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "diag dev %.1e (<= 1e-8), H0 dev %.1e (<= 1e-8)", diag_dev,
                  hdev);
    return hdev <= 1e-8 ? std::string(buf) : "FAIL " + std::string(buf);
}

std::string c8_traces() {
    DtnState& st = dtn_state();
    double worst = 0.0;
    for (cplx k : low_k_samples()) {
        TraceRecovery rec = recover_traces(st.dtn, k, 16, 1e-8);
        BoundaryFunction h = oracle_trace(st.field, k, 'r');
        double dev = 0.0, ref = 0.0;
        for (int j = 0; j < h.m(); ++j) {
            dev = std::max(dev, std::abs(rec.h_r.values[j] - h.values[j]));
            ref = std::max(ref, std::abs(h.values[j]));
        }
        worst = std::max(worst, dev / ref);
    }
    return pass(worst, 1e-3, "trace rel sup error over |k| <= 3");
}

std::string c9_boundary_t() {
    DtnState& st = dtn_state();
    Potential q = q_from_b(st.field);

    BoundaryFunction einvb(256);
    std::vector<cplx> circle(256);
    for (int j = 0; j < 256; ++j) circle[j] = einvb.node(j);
    std::vector<cplx> A = cauchy_transform_at(st.field.b().grid(), circle);
    for (int j = 0; j < 256; ++j) einvb.values[j] = std::exp(-A[j]);

    double worst = 0.0;
    for (cplx k : low_k_samples()) {
        BoundaryFunction hr = oracle_trace(st.field, k, 'r');
        BoundaryFunction hi = oracle_trace(st.field, k, 'i');
        const cplx tb = boundary_scattering_transform(hr, hi, einvb, k);
        const cplx tv = scattering_transform_volume(q, k);
        worst = std::max(worst, std::abs(tb - tv) / std::abs(tv));
    }
    return pass(worst, 1e-3, "boundary vs volume t over |k| <= 3");
}

std::string c10_pipeline() {
    RunConfig cfg;
    cfg.nx = 128;
    cfg.L = 1.1;
    cfg.K = 6.0;
    cfg.kgrid_n = 64;
    cfg.outdir = (fs::temp_directory_path() / "dbar_acceptance_pipeline").string();
    Phantom p = standard_phantom();

    PipelineReport rep = run_pipeline(cfg, p);
    if (rep.err_b1 > 0.10 || rep.err_b2 > 0.10) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "FAIL b errors %.3f / %.3f (<= 0.10)", rep.err_b1,
                      rep.err_b2);
        return buf;
    }

    // determinism: identical run, different worker count, byte-identical grids
    RunConfig cfg2 = cfg;
    cfg2.outdir = cfg.outdir + "_rerun";
    cfg2.threads = 1 + (std::thread::hardware_concurrency() > 1 ? 1 : 0);
    PipelineReport rep2 = run_pipeline(cfg2, p);
    auto bytes = [](const fs::path& f) {
        std::ifstream is(f, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    };
    for (const char* name : {"t.grid", "qhat.grid", "bhat1.grid", "bhat2.grid"}) {
        if (bytes(fs::path(cfg.outdir) / name) != bytes(fs::path(cfg2.outdir) / name))
            return std::string("FAIL rerun not bit-identical on ") + name;
    }
    if (rep.err_b1 != rep2.err_b1 || rep.err_b2 != rep2.err_b2 || rep.err_q != rep2.err_q)
        return "FAIL rerun reports differ";
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "b1 err %.3f, b2 err %.3f (<= 0.10), q err %.3f, rerun bit-identical",
                  rep.err_b1, rep.err_b2, rep.err_q);
    return buf;
}

}  // namespace

int main() {
    std::printf("dbar acceptance suite\n");
    run(1, "zero-potential sanity", c1_zero_potential);
    run(2, "cauchy transform disk closed form", c2_disk);
    run(3, "born normalization scaling", c3_born);
    run(4, "psi/phi identities", c4_identities);
    run(5, "nonlinear fourier round trip", c5_roundtrip);
    run(6, "potential/coefficient link + unwrap", c6_link);
    run(7, "dtn correctness (b = 0)", c7_dtn);
    run(8, "trace recovery vs whole-plane oracle", c8_traces);
    run(9, "boundary t(k) vs volume t(k)", c9_boundary_t);
    run(10, "end-to-end reconstruction + determinism", c10_pipeline);

    std::printf("%s: %d/10 passed\n", g_failures == 0 ? "OK" : "FAILED", 10 - g_failures);
    return g_failures;
}
