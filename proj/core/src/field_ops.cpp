#include "dbar/field_ops.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "dbar/errors.hpp"
#include "dbar/fft.hpp"

namespace dbar {

namespace {

constexpr int kPad = 3;           // padded torus side = kPad * nx
constexpr double kRho = 2.6;      // kernel truncation radius, in units of L

double freq(int idx, int n, double period) {
    const int k = (idx <= n / 2) ? idx : idx - n;
    return 2.0 * std::numbers::pi * k / period;
}

/// Cached Fourier multiplier of the truncated Cauchy kernel on the padded torus.
const std::vector<cplx>& kernel_multiplier(int nx, double L) {
    static std::mutex mtx;
    static std::map<std::pair<int, double>, std::unique_ptr<std::vector<cplx>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(nx, L);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    const int N = kPad * nx;
    const double period = kPad * 2.0 * L;
    const double rho = kRho * L;
    auto mult = std::make_unique<std::vector<cplx>>(std::size_t(N) * N);
    for (int p = 0; p < N; ++p) {
        const double w1 = freq(p, N, period);
        for (int q = 0; q < N; ++q) {
            const double w2 = freq(q, N, period);
            const double aw = std::hypot(w1, w2);
            cplx v = 0.0;
            if (aw > 0.0) {
                const double j0 = std::cyl_bessel_j(0.0, rho * aw);
                v = cplx(0.0, -2.0) * (1.0 - j0) / cplx(w1, w2);
            }
            (*mult)[std::size_t(p) * N + q] = v;
        }
    }
    auto& ref = *mult;
    cache.emplace(key, std::move(mult));
    return ref;
}

void check_boundary_ring(const ComplexGrid& f) {
    const int n = f.nx();
    double ring = 0.0, overall = 0.0;
    for (const cplx& v : f.samples()) overall = std::max(overall, std::abs(v));
    for (int i = 0; i < n; ++i) {
        ring = std::max({ring, std::abs(f.at(i, 0)), std::abs(f.at(i, n - 1)),
                         std::abs(f.at(0, i)), std::abs(f.at(n - 1, i))});
    }
    if (overall > 0.0 && ring > 1e-8 * overall)
        throw PreconditionError("cauchy_transform: support touches the boundary ring");
}

}  // namespace

ComplexGrid cauchy_transform(const ComplexGrid& f) {
    check_boundary_ring(f);
    const int nx = f.nx();
    const int N = kPad * nx;
    std::vector<cplx> buf(std::size_t(N) * N, cplx(0.0));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) buf[std::size_t(i) * N + j] = f.at(i, j);

    fft::forward(buf.data(), N);
    const auto& mult = kernel_multiplier(nx, f.L());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= mult[i];
    fft::inverse(buf.data(), N);

    ComplexGrid g(nx, f.L());
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) g.at(i, j) = buf[std::size_t(i) * N + j];
    return g;
}

ComplexGrid anti_cauchy_transform(const ComplexGrid& f) {
    ComplexGrid fc(f.nx(), f.L());
    for (std::size_t i = 0; i < f.size(); ++i) fc[i] = std::conj(f[i]);
    ComplexGrid g = cauchy_transform(fc);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::conj(g[i]);
    return g;
}

namespace detail {

void spectral_derivative(ComplexGrid& f, bool dbar) {
    const int n = f.nx();
    const double period = 2.0 * f.L();
    fft::forward(f.samples().data(), n);
    const int nyq = n / 2;
    for (int p = 0; p < n; ++p) {
        const double w1 = freq(p, n, period);
        for (int q = 0; q < n; ++q) {
            const double w2 = freq(q, n, period);
            cplx sym = dbar ? cplx(-w2, w1) * 0.5 : cplx(w2, w1) * 0.5;
            if (p == nyq || q == nyq) sym = 0.0;  // unpaired odd mode
            f.at(p, q) *= sym;
        }
    }
    fft::inverse(f.samples().data(), n);
}

}  // namespace detail

ComplexGrid dbar_derivative(const ComplexGrid& f) {
    ComplexGrid g = f;
    detail::spectral_derivative(g, true);
    return g;
}

ComplexGrid d_derivative(const ComplexGrid& f) {
    ComplexGrid g = f;
    detail::spectral_derivative(g, false);
    return g;
}

std::vector<cplx> cauchy_transform_at(const ComplexGrid& f, std::span<const cplx> targets) {
    const int n = f.nx();
    const double w = f.h() * f.h() / std::numbers::pi;
    std::vector<cplx> out(targets.size(), cplx(0.0));
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const cplx x = targets[t];
        cplx acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const cplx fv = f.at(i, j);
                if (fv == cplx(0.0)) continue;
                const cplx d = x - f.node(i, j);
                if (d != cplx(0.0)) acc += fv / d;
            }
        out[t] = w * acc;
    }
    return out;
}

}  // namespace dbar
