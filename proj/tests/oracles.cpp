#include "oracles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "dbar/fft.hpp"
#include "dbar/phantom.hpp"

namespace oracle {

using std::numbers::pi;

cplx quadrature_cauchy(const std::function<cplx(cplx)>& f, cplx z, int n, double L) {
    const double h = 2.0 * L / n;
    cplx acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx zeta(-L + i * h, -L + j * h);
            const cplx d = z - zeta;
            if (std::abs(d) < 0.5 * h) continue;  // singular cell, odd kernel
            acc += f(zeta) / d;
        }
    return acc * h * h / pi;
}

namespace {

// Discrete translation kernel of the library's Cauchy transform: the same
// truncated-kernel Fourier symbol, tabulated by one inverse FFT on the
// padded torus. Only the symbol formula is shared; the oracle path below
// never goes through the library FFT pipeline.
std::vector<cplx> kernel_table(int nx, double L, int& N) {
    N = 3 * nx;
    const double period = 6.0 * L;
    const double rho = 2.6 * L;
    std::vector<cplx> K(std::size_t(N) * N);
    auto freq = [&](int idx) {
        const int k = (idx <= N / 2) ? idx : idx - N;
        return 2.0 * pi * k / period;
    };
    for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q) {
            const double w1 = freq(p), w2 = freq(q);
            const double aw = std::hypot(w1, w2);
            K[std::size_t(p) * N + q] =
                aw == 0.0 ? cplx(0.0)
                          : cplx(0.0, -2.0) * (1.0 - std::cyl_bessel_j(0.0, rho * aw)) /
                                cplx(w1, w2);
        }
    dbar::fft::inverse(K.data(), N);
    return K;
}

}  // namespace

ComplexGrid dense_dbar_solve(const ComplexGrid* c, const ComplexGrid& a, double sign) {
    const int nx = a.nx();
    const int n2 = nx * nx;
    int N = 0;
    std::vector<cplx> kt = kernel_table(nx, a.L(), N);
    auto kern = [&](int di, int dj) -> cplx {
        return kt[std::size_t((di + N) % N) * N + ((dj + N) % N)];
    };

    // real-linear matrix of mu + dbar^{-1}[c mu + s a conj(mu)]
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2 * n2, 2 * n2);
    for (int ci = 0; ci < nx; ++ci)
        for (int cj = 0; cj < nx; ++cj) {
            const int col = ci * nx + cj;
            const cplx av = sign * a.at(ci, cj);
            const cplx cv = c ? c->at(ci, cj) : cplx(0.0);
            if (av == cplx(0.0) && cv == cplx(0.0)) continue;
            for (int ri = 0; ri < nx; ++ri)
                for (int rj = 0; rj < nx; ++rj) {
                    const int row = ri * nx + rj;
                    const cplx kv = kern(ri - ci, rj - cj);
                    // d/dRe: kv (cv + av); d/dIm: kv (i cv - i av)
                    const cplx dre = kv * (cv + av);
                    const cplx dim = kv * cplx(0.0, 1.0) * (cv - av);
                    M(2 * row, 2 * col) += dre.real();
                    M(2 * row + 1, 2 * col) += dre.imag();
                    M(2 * row, 2 * col + 1) += dim.real();
                    M(2 * row + 1, 2 * col + 1) += dim.imag();
                }
        }

    // rhs = -dbar^{-1}[c + s a]
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n2);
    for (int ri = 0; ri < nx; ++ri)
        for (int rj = 0; rj < nx; ++rj) {
            cplx acc = 0.0;
            for (int ci = 0; ci < nx; ++ci)
                for (int cj = 0; cj < nx; ++cj) {
                    const cplx src = (c ? c->at(ci, cj) : cplx(0.0)) + sign * a.at(ci, cj);
                    if (src != cplx(0.0)) acc += kern(ri - ci, rj - cj) * src;
                }
            rhs(2 * (ri * nx + rj)) = -acc.real();
            rhs(2 * (ri * nx + rj) + 1) = -acc.imag();
        }

    Eigen::VectorXd mu = Eigen::PartialPivLU<Eigen::MatrixXd>(M).solve(rhs);
    ComplexGrid psi(nx, a.L());
    for (int i = 0; i < n2; ++i) psi[i] = cplx(mu(2 * i) + 1.0, mu(2 * i + 1));
    return psi;
}

cplx born_linearized_t(const Potential& q, cplx k) {
    const ComplexGrid& qg = q.grid();
    const double h2 = qg.h() * qg.h();
    cplx acc = 0.0;
    for (int i = 0; i < qg.nx(); ++i)
        for (int j = 0; j < qg.nx(); ++j)
            acc += dbar::e_phase(qg.node(i, j), k) * std::conj(qg.at(i, j));
    return cplx(0.0, -1.0 / pi) * acc * h2;
}

ComplexGrid neumann_first_term(const Potential& q, cplx k, int sign) {
    const ComplexGrid& qg = q.grid();
    const int nx = qg.nx();
    const double h = qg.h();
    ComplexGrid out(nx, qg.L());
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
            const cplx z = qg.node(i, j);
            cplx acc = 0.0;
            for (int ci = 0; ci < nx; ++ci)
                for (int cj = 0; cj < nx; ++cj) {
                    const cplx qv = qg.at(ci, cj);
                    if (qv == cplx(0.0)) continue;
                    const cplx zeta = qg.node(ci, cj);
                    const cplx d = z - zeta;
                    if (std::abs(d) < 0.5 * h) continue;
                    acc += qv * dbar::e_phase(zeta, -k) / d;
                }
            out.at(i, j) = 1.0 - double(sign) * acc * h * h / pi;
        }
    return out;
}

Potential gaussian_potential(int nx, double L, cplx amplitude, cplx center, double sigma,
                             double support_radius) {
    ComplexGrid g(nx, L);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
            const cplx z = g.node(i, j);
            g.at(i, j) = amplitude * std::exp(-std::norm(z - center) / (2.0 * sigma * sigma)) *
                         dbar::bump_mask(std::abs(z), support_radius);
        }
    return Potential(std::move(g), support_radius);
}

ComplexGrid random_smooth_field(int nx, double L, std::mt19937_64& rng, int bumps, double spread,
                                double sigma_min, double sigma_max) {
    std::normal_distribution<double> gauss01;
    std::uniform_real_distribution<double> uni(sigma_min, sigma_max);
    ComplexGrid f(nx, L);
    std::vector<cplx> cs(bumps);
    std::vector<double> ss(bumps);
    std::vector<cplx> amps(bumps);
    for (int b = 0; b < bumps; ++b) {
        cplx c(spread * gauss01(rng), spread * gauss01(rng));
        if (std::abs(c) > 0.35 * L) c *= 0.35 * L / std::abs(c);
        cs[b] = c;
        ss[b] = uni(rng);
        amps[b] = {gauss01(rng), gauss01(rng)};
    }
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
            const cplx z = f.node(i, j);
            cplx acc = 0.0;
            for (int b = 0; b < bumps; ++b)
                acc += amps[b] * std::exp(-std::norm(z - cs[b]) / (2.0 * ss[b] * ss[b]));
            f.at(i, j) = acc * smooth_cutoff(std::abs(z), 0.6 * L, 0.78 * L);
        }
    double m = max_abs(f);
    if (m > 0)
        for (cplx& v : f.samples()) v /= m;
    return f;
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double smooth_cutoff(double r, double r_in, double r_out) {
    return smooth_step((r_out - r) / (r_out - r_in));
}

double max_abs_diff(const ComplexGrid& a, const ComplexGrid& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(const ComplexGrid& a) {
    double m = 0.0;
    for (const cplx& v : a.samples()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace oracle
