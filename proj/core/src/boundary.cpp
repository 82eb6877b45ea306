#include "dbar/boundary.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "dbar/errors.hpp"
#include "dbar/fft.hpp"

namespace dbar {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// BoundaryFunction
// ---------------------------------------------------------------------------

double BoundaryFunction::theta(int j) const { return 2.0 * pi * j / m(); }
cplx BoundaryFunction::node(int j) const { return std::polar(1.0, theta(j)); }

cplx BoundaryFunction::mean() const {
    cplx acc = 0.0;
    for (const cplx& v : values) acc += v;
    return acc / double(m());
}

void BoundaryFunction::validate() const {
    if (m() < 64 || m() % 2 != 0)
        throw PreconditionError("BoundaryFunction: sample count must be even and >= 64");
    for (const cplx& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw PreconditionError("BoundaryFunction: non-finite sample");
}

namespace {

int signed_freq(int idx, int m) { return idx <= m / 2 ? idx : idx - m; }

std::vector<cplx> fft_coeffs(const std::vector<cplx>& v) {
    std::vector<cplx> c = v;
    fft::forward_1d(c.data(), int(c.size()));
    const double s = 1.0 / double(c.size());
    for (cplx& x : c) x *= s;
    return c;
}

// synthesize sum c_n e^{i n theta} back onto the grid
std::vector<cplx> fft_synth(std::vector<cplx> c) {
    fft::inverse_1d(c.data(), int(c.size()));
    for (cplx& x : c) x *= double(c.size());
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// DtNOperator
// ---------------------------------------------------------------------------

BoundaryFunction DtNOperator::apply(const BoundaryFunction& g) const {
    const int m = g.m();
    if (2 * modes + 2 > m)
        throw PreconditionError("DtNOperator::apply: boundary grid too coarse for the modes");
    std::vector<cplx> c = fft_coeffs(g.values);
    Eigen::VectorXcd in(2 * modes + 1);
    for (int n = -modes; n <= modes; ++n) in(n + modes) = c[(n + m) % m];
    Eigen::VectorXcd out = matrix * in;
    std::vector<cplx> full(m, cplx(0.0));
    for (int n = -modes; n <= modes; ++n) full[(n + m) % m] = out(n + modes);
    return BoundaryFunction(fft_synth(std::move(full)));
}

// ---------------------------------------------------------------------------
// DiskSolver
// ---------------------------------------------------------------------------

namespace {

// Chebyshev differentiation matrix on x_i = cos(pi i / N), i = 0..N.
Eigen::MatrixXd cheb_matrix(int N, std::vector<double>& x) {
    x.resize(N + 1);
    for (int i = 0; i <= N; ++i) x[i] = std::cos(pi * i / N);
    Eigen::VectorXd c(N + 1);
    for (int i = 0; i <= N; ++i) c(i) = ((i == 0 || i == N) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0);
    Eigen::MatrixXd D(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            D(i, j) = i == j ? 0.0 : c(i) / c(j) / (x[i] - x[j]);
    for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
    return D;
}

// Periodic spectral differentiation matrices on nt equispaced nodes (nt even).
void fourier_matrices(int nt, Eigen::MatrixXd& D1, Eigen::MatrixXd& D2) {
    D1.setZero(nt, nt);
    D2.setZero(nt, nt);
    for (int p = 0; p < nt; ++p)
        for (int q = 0; q < nt; ++q) {
            if (p == q) {
                D2(p, q) = -double(nt) * nt / 12.0 - 1.0 / 6.0;
                continue;
            }
            const int d = p - q;
            const double sgn = (d % 2) ? -1.0 : 1.0;
            D1(p, q) = 0.5 * sgn / std::tan(pi * d / nt);
            const double s = std::sin(pi * d / nt);
            D2(p, q) = -0.5 * sgn / (s * s);
        }
}

// Catmull-Rom sampling of the real part of a grid field; zero outside.
double sample_real(const ComplexGrid& g, double xx, double yy) {
    auto kern = [](double t) {
        t = std::abs(t);
        if (t <= 1.0) return 1.5 * t * t * t - 2.5 * t * t + 1.0;
        if (t < 2.0) return -0.5 * t * t * t + 2.5 * t * t - 4.0 * t + 2.0;
        return 0.0;
    };
    const int n = g.nx();
    const double h = g.h();
    const double u = (xx + g.L()) / h;
    const double v = (yy + g.L()) / h;
    const int iu = int(std::floor(u)), iv = int(std::floor(v));
    double acc = 0.0;
    for (int a = iu - 1; a <= iu + 2; ++a) {
        if (a < 0 || a >= n) continue;
        const double wx = kern(u - a);
        if (wx == 0.0) continue;
        for (int b = iv - 1; b <= iv + 2; ++b) {
            if (b < 0 || b >= n) continue;
            acc += wx * kern(v - b) * g.at(a, b).real();
        }
    }
    return acc;
}

}  // namespace

DiskSolver::DiskSolver(const ConvectionField& f, Options opt) {
    int Nr = opt.radial_degree;
    if (Nr % 2 == 0) ++Nr;  // odd degree keeps r = 0 off the grid
    nt_ = opt.ntheta + (opt.ntheta % 2);
    if (f.support_radius() > 0.8 + 1e-12)
        throw PreconditionError("DiskSolver: b must be supported in radius <= 0.8");

    cheb_d_ = cheb_matrix(Nr, x_);
    Eigen::MatrixXd cheb_d2 = cheb_d_ * cheb_d_;
    nk_ = (Nr + 1) / 2;
    radii_.assign(x_.begin(), x_.begin() + nk_);

    Eigen::MatrixXd D1t, D2t;
    fourier_matrices(nt_, D1t, D2t);

    const int n = nk_ * nt_;
    const int half = nt_ / 2;
    A_.setZero(n, n);
    for (int jr = 0; jr < nk_; ++jr) {
        for (int p = 0; p < nt_; ++p) {
            const int row = jr * nt_ + p;
            if (jr == 0) {  // r = 1: Dirichlet row
                A_(row, row) = 1.0;
                continue;
            }
            const double r = radii_[jr];
            const double th = 2.0 * pi * p / nt_;
            const double ct = std::cos(th), st = std::sin(th);
            const double b1v = sample_real(f.b1(), r * ct, r * st);
            const double b2v = sample_real(f.b2(), r * ct, r * st);
            // radial couplings, with the (-r, theta) ~ (r, theta+pi) identification
            for (int jp = 0; jp <= Nr; ++jp) {
                const double w1 = cheb_d_(jr, jp);
                const double w2 = cheb_d2(jr, jp);
                int cj, dp;
                if (x_[jp] > 0.0) {
                    cj = jp;
                    dp = 0;
                } else {
                    cj = Nr - jp;
                    dp = half;
                }
                const int col = cj * nt_ + (p + dp) % nt_;
                A_(row, col) += (w2 + w1 / r) + b1v * ct * w1 + b2v * st * w1;
            }
            // angular couplings
            for (int q = 0; q < nt_; ++q) {
                const int col = jr * nt_ + q;
                A_(row, col) += D2t(p, q) / (r * r) +
                                (-b1v * st / r + b2v * ct / r) * D1t(p, q);
            }
        }
    }
    lu_.compute(A_);
    if (lu_.determinant() == 0.0)
        throw SolverError("DiskSolver: singular collocation system", 0.0);
}

double DiskSolver::theta(int p) const { return 2.0 * pi * p / nt_; }

DiskSolution DiskSolver::solve(const std::vector<cplx>& g) const {
    if (int(g.size()) != nt_)
        throw PreconditionError("DiskSolver::solve: boundary data size mismatch");
    const int n = nk_ * nt_;
    Eigen::VectorXd rr = Eigen::VectorXd::Zero(n), ri = Eigen::VectorXd::Zero(n);
    for (int p = 0; p < nt_; ++p) {
        rr(p) = g[p].real();
        ri(p) = g[p].imag();
    }
    Eigen::VectorXd ur = lu_.solve(rr), ui = lu_.solve(ri);
    DiskSolution sol;
    sol.radii = radii_;
    sol.ntheta = nt_;
    sol.values.resize(n);
    for (int i = 0; i < n; ++i) sol.values[i] = {ur(i), ui(i)};
    return sol;
}

std::vector<cplx> DiskSolver::neumann(const std::vector<cplx>& g) const {
    DiskSolution sol = solve(g);
    const int Nr = int(x_.size()) - 1;
    const int half = nt_ / 2;
    std::vector<cplx> out(nt_, cplx(0.0));
    for (int p = 0; p < nt_; ++p) {
        cplx acc = 0.0;
        for (int jp = 0; jp <= Nr; ++jp) {
            const double w = cheb_d_(0, jp);
            if (x_[jp] > 0.0)
                acc += w * sol.at(jp, p);
            else
                acc += w * sol.at(Nr - jp, (p + half) % nt_);
        }
        out[p] = acc;
    }
    return out;
}

cplx DiskSolution::eval(double r, double theta) const {
    // trigonometric interpolation in theta at both theta and theta + pi
    const int nt = ntheta;
    const int nr = int(radii.size());
    std::vector<cplx> u_th(nr), u_thpi(nr);
    {
        std::vector<cplx> row(nt);
        for (int jr = 0; jr < nr; ++jr) {
            for (int p = 0; p < nt; ++p) row[p] = at(jr, p);
            std::vector<cplx> c = fft_coeffs(row);
            cplx acc1 = 0.0, acc2 = 0.0;
            for (int idx = 0; idx < nt; ++idx) {
                const int n = signed_freq(idx, nt);
                const cplx e1 = std::polar(1.0, n * theta);
                acc1 += c[idx] * e1;
                acc2 += c[idx] * e1 * ((n % 2) ? -1.0 : 1.0);  // e^{i n (theta+pi)}
            }
            u_th[jr] = acc1;
            u_thpi[jr] = acc2;
        }
    }
    // barycentric interpolation over the full Chebyshev grid in x, using
    // u(-r, theta) = u(r, theta+pi)
    const int Nr = 2 * nr - 1;
    cplx num = 0.0;
    double den = 0.0;
    for (int i = 0; i <= Nr; ++i) {
        const double xi = std::cos(pi * i / Nr);
        const cplx ui = xi > 0.0 ? u_th[i] : u_thpi[Nr - i];
        double w = (i == 0 || i == Nr) ? 0.5 : 1.0;
        if (i % 2) w = -w;
        const double d = r - xi;
        if (std::abs(d) < 1e-14) return ui;
        num += w / d * ui;
        den += w / d;
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// Free functions over the solver
// ---------------------------------------------------------------------------

namespace {

// resample an m-sample boundary function onto the solver's theta grid
std::vector<cplx> resample(const BoundaryFunction& g, int nt) {
    const int m = g.m();
    std::vector<cplx> c = fft_coeffs(g.values);
    std::vector<cplx> out(nt, cplx(0.0));
    const int nmax = std::min(m / 2 - 1, nt / 2 - 1);
    for (int p = 0; p < nt; ++p) {
        const double th = 2.0 * pi * p / nt;
        cplx acc = c[0];
        for (int n = 1; n <= nmax; ++n)
            acc += c[n] * std::polar(1.0, n * th) + c[(m - n) % m] * std::polar(1.0, -n * th);
        out[p] = acc;
    }
    return out;
}

}  // namespace

DiskSolution solve_bvp(const ConvectionField& f, const BoundaryFunction& g,
                       DiskSolverOptions opt) {
    DiskSolver solver(f, opt);
    return solver.solve(resample(g, solver.ntheta()));
}

BoundaryFunction dtn_apply(const ConvectionField& f, const BoundaryFunction& g,
                           DiskSolverOptions opt) {
    DiskSolver solver(f, opt);
    std::vector<cplx> lam = solver.neumann(resample(g, solver.ntheta()));
    // back onto g's theta grid
    const int nt = solver.ntheta();
    const int m = g.m();
    std::vector<cplx> c = lam;
    fft::forward_1d(c.data(), nt);
    for (cplx& v : c) v /= double(nt);
    std::vector<cplx> out(m, cplx(0.0));
    const int nmax = std::min(nt / 2 - 1, m / 2 - 1);
    for (int j = 0; j < m; ++j) {
        const double th = 2.0 * pi * j / m;
        cplx acc = c[0];
        for (int n = 1; n <= nmax; ++n)
            acc += c[n] * std::polar(1.0, n * th) + c[(nt - n) % nt] * std::polar(1.0, -n * th);
        out[j] = acc;
    }
    return BoundaryFunction(std::move(out));
}

DtNOperator assemble_dtn(const ConvectionField& f, int modes, DiskSolverOptions opt) {
    if (opt.ntheta < 2 * modes + 2) opt.ntheta = 2 * modes + 2;
    DiskSolver solver(f, opt);
    const int nt = solver.ntheta();
    DtNOperator op;
    op.modes = modes;
    op.matrix.resize(2 * modes + 1, 2 * modes + 1);
    for (int n = -modes; n <= modes; ++n) {
        std::vector<cplx> g(nt);
        for (int p = 0; p < nt; ++p) g[p] = std::polar(1.0, n * solver.theta(p));
        std::vector<cplx> lam = solver.neumann(g);
        fft::forward_1d(lam.data(), nt);
        for (int mm = -modes; mm <= modes; ++mm)
            op.matrix(mm + modes, n + modes) = lam[(mm + nt) % nt] / double(nt);
    }
    return op;
}

void write_dtn(const std::string& path, const DtNOperator& op) {
    nlohmann::json j;
    j["modes"] = op.modes;
    if (!op.metadata.empty()) j["metadata"] = op.metadata;
    std::vector<double> re, im;
    re.reserve(op.matrix.size());
    im.reserve(op.matrix.size());
    for (Eigen::Index r = 0; r < op.matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < op.matrix.cols(); ++c) {
            re.push_back(op.matrix(r, c).real());
            im.push_back(op.matrix(r, c).imag());
        }
    j["matrix_re"] = re;
    j["matrix_im"] = im;
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
}

DtNOperator read_dtn(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    nlohmann::json j;
    is >> j;
    DtNOperator op;
    op.modes = j.at("modes").get<int>();
    op.metadata = j.value("metadata", "");
    const auto re = j.at("matrix_re").get<std::vector<double>>();
    const auto im = j.at("matrix_im").get<std::vector<double>>();
    const int dim = 2 * op.modes + 1;
    if (int(re.size()) != dim * dim || int(im.size()) != dim * dim)
        throw IoError(path + ": matrix size does not match modes");
    op.matrix.resize(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            op.matrix(r, c) = {re[std::size_t(r) * dim + c], im[std::size_t(r) * dim + c]};
    return op;
}

BoundaryFunction ds_inverse(const BoundaryFunction& f) {
    double fmax = 0.0;
    for (const cplx& v : f.values) fmax = std::max(fmax, std::abs(v));
    const cplx mu = f.mean();
    if (std::abs(mu) > 1e-10 * (1.0 + fmax))
        throw PreconditionError("ds_inverse: input must have zero mean, got " +
                                std::to_string(std::abs(mu)));
    const int m = f.m();
    std::vector<cplx> c = fft_coeffs(f.values);
    c[0] = 0.0;
    for (int idx = 1; idx < m; ++idx) {
        const int n = signed_freq(idx, m);
        c[idx] /= cplx(0.0, double(n));
    }
    std::vector<cplx> g = fft_synth(std::move(c));
    const cplx g0 = g[0];  // antiderivative measured from theta = 0
    for (cplx& v : g) v -= g0;
    return BoundaryFunction(std::move(g));
}

BoundaryFunction hilbert_Hb(const DtNOperator& dtn, const BoundaryFunction& f) {
    BoundaryFunction out = dtn.apply(ds_inverse(f));
    for (cplx& v : out.values) v = -v;
    return out;
}

BoundaryFunction cauchy_singular(const BoundaryFunction& h, cplx k) {
    const int m = h.m();
    const double dtheta = 2.0 * pi / m;
    // w = e^{-izk} h on the nodes
    std::vector<cplx> w(m);
    for (int j = 0; j < m; ++j)
        w[j] = std::exp(cplx(0.0, -1.0) * h.node(j) * k) * h.values[j];
    // resample w to midpoints theta_{j+1/2}
    std::vector<cplx> c = fft_coeffs(w);
    for (int idx = 0; idx < m; ++idx)
        c[idx] *= std::polar(1.0, signed_freq(idx, m) * dtheta / 2.0);
    std::vector<cplx> wmid = fft_synth(std::move(c));
    // p.v. Cauchy integral by the shifted trapezoid rule
    BoundaryFunction out(m);
    for (int j = 0; j < m; ++j) {
        const cplx zj = h.node(j);
        cplx acc = 0.0;
        for (int s = 0; s < m; ++s) {
            const cplx zs = std::polar(1.0, dtheta * (s + 0.5));
            acc += wmid[s] * zs / (zs - zj);
        }
        acc *= dtheta / (2.0 * pi);
        out.values[j] = 2.0 * std::exp(cplx(0.0, 1.0) * zj * k) * (0.5 * w[j] + acc);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trace recovery
// ---------------------------------------------------------------------------

namespace {

struct TraceBasis {
    int m = 0, N = 0;
    std::vector<cplx> E;     // e^{i z_j k}
    std::vector<cplx> nodes;
};

// nu h for the coefficient vector restricted to one basis entry a_n = comp
std::vector<cplx> nu_h_term(const TraceBasis& tb, int n, cplx comp) {
    std::vector<cplx> out(tb.m);
    for (int j = 0; j < tb.m; ++j)
        out[j] = tb.nodes[j] * tb.E[j] * comp * std::pow(tb.nodes[j], -n);
    return out;
}

}  // namespace

TraceRecovery recover_traces(const DtNOperator& dtn, cplx k, int N, double reg, int m) {
    if (N < 1 || N > m / 4) throw PreconditionError("recover_traces: require 1 <= N <= m/4");
    if (reg < 0.0) throw PreconditionError("recover_traces: reg must be >= 0");

    TraceBasis tb;
    tb.m = m;
    tb.N = N;
    tb.E.resize(m);
    tb.nodes.resize(m);
    BoundaryFunction probe(m);
    for (int j = 0; j < m; ++j) {
        tb.nodes[j] = probe.node(j);
        tb.E[j] = std::exp(cplx(0.0, 1.0) * tb.nodes[j] * k);
    }

    // interior-constraint residual rows for a given nu*h field
    auto build_rows = [&](const std::vector<cplx>& nuh, Eigen::VectorXd& rows, double& mean_row) {
        BoundaryFunction im_part(m);
        double acc_mean = 0.0;
        for (int j = 0; j < m; ++j) {
            im_part.values[j] = nuh[j].imag();
            acc_mean += nuh[j].imag();
        }
        // H_b needs a zero-mean input; the class-B mean itself is enforced
        // as a separate row, so project it out here.
        const cplx avg = im_part.mean();
        for (cplx& v : im_part.values) v -= avg;
        BoundaryFunction hb = hilbert_Hb(dtn, im_part);
        rows.resize(m);
        for (int j = 0; j < m; ++j) rows(j) = hb.values[j].real() - nuh[j].real();
        mean_row = acc_mean / m;
    };

    // columns for a_1..a_N (real and imaginary components)
    Eigen::MatrixXd A(m + 1, 2 * N);
    Eigen::VectorXd col(m);
    double mcol = 0.0;

    // base rows for a_0 = 1 and a_0 = i
    Eigen::VectorXd base_r, base_i;
    double mean_r = 0.0, mean_i = 0.0;
    build_rows(nu_h_term(tb, 0, cplx(1.0, 0.0)), base_r, mean_r);
    build_rows(nu_h_term(tb, 0, cplx(0.0, 1.0)), base_i, mean_i);

    double scale = 1.0;
    for (int j = 0; j < m; ++j) scale = std::max(scale, std::abs(base_r(j)));
    const double W = 1e4 * scale;  // class-B zero-mean row weight

    for (int n = 1; n <= N; ++n) {
        for (int compidx = 0; compidx < 2; ++compidx) {
            const cplx comp = compidx == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
            build_rows(nu_h_term(tb, n, comp), col, mcol);
            const int cidx = 2 * (n - 1) + compidx;
            A.block(0, cidx, m, 1) = col;
            A(m, cidx) = W * mcol;
        }
    }

    // stacked ridge system, shared QR for both right-hand sides
    Eigen::MatrixXd As(m + 1 + 2 * N, 2 * N);
    As.topRows(m + 1) = A;
    As.bottomRows(2 * N) = std::sqrt(reg) * scale * Eigen::MatrixXd::Identity(2 * N, 2 * N);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    if (qr.rank() < 2 * N)
        throw SolverError("recover_traces: rank-deficient normal equations (rank " +
                              std::to_string(qr.rank()) + " of " + std::to_string(2 * N) + ")",
                          0.0);

    auto solve_for = [&](const Eigen::VectorXd& base, double base_mean) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1 + 2 * N);
        rhs.head(m) = -base;
        rhs(m) = -W * base_mean;
        Eigen::VectorXd sol = qr.solve(rhs);
        std::vector<cplx> a(N + 1);
        for (int n = 1; n <= N; ++n) a[n] = {sol(2 * (n - 1)), sol(2 * (n - 1) + 1)};
        return a;
    };

    std::vector<cplx> a_r = solve_for(base_r, mean_r);
    std::vector<cplx> a_i = solve_for(base_i, mean_i);
    a_r[0] = cplx(1.0, 0.0);
    a_i[0] = cplx(0.0, 1.0);

    auto synth = [&](const std::vector<cplx>& a) {
        BoundaryFunction h(m);
        for (int j = 0; j < m; ++j) {
            cplx acc = 0.0;
            cplx zinv = 1.0;
            for (int n = 0; n <= N; ++n) {
                acc += a[n] * zinv;
                zinv /= tb.nodes[j];
            }
            h.values[j] = tb.E[j] * acc;
        }
        return h;
    };

    TraceRecovery rec;
    rec.h_r = synth(a_r);
    rec.h_i = synth(a_i);
    rec.report.coeff_r = a_r;
    rec.report.coeff_i = a_i;
    rec.report.reg = reg;

    // condition estimate from the R diagonal
    const auto& R = qr.matrixR();
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2 * N; ++i) {
        const double d = std::abs(R(i, i));
        rmax = std::max(rmax, d);
        rmin = std::min(rmin, d);
    }
    rec.report.condition = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();

    // residual of (30): (I - i S_k) h_r vs 2 e^{izk}
    {
        BoundaryFunction lhs = cauchy_singular(rec.h_r, k);
        double num = 0.0, den = 0.0;
        for (int j = 0; j < m; ++j) {
            num = std::max(num, std::abs(lhs.values[j] - 2.0 * tb.E[j]));
            den = std::max(den, std::abs(2.0 * tb.E[j]));
        }
        rec.report.residual30 = num / den;
    }
    // residual of (31) and the class-B mean for the recovered h_r
    {
        std::vector<cplx> nuh(m);
        for (int j = 0; j < m; ++j) nuh[j] = tb.nodes[j] * rec.h_r.values[j];
        Eigen::VectorXd rows;
        double mean_after = 0.0;
        build_rows(nuh, rows, mean_after);
        double den = 0.0;
        for (int j = 0; j < m; ++j) den += nuh[j].real() * nuh[j].real();
        rec.report.residual31 = rows.norm() / std::max(std::sqrt(den), 1e-300);
        rec.report.class_b_mean = std::abs(mean_after);
    }
    return rec;
}

cplx boundary_scattering_transform(const BoundaryFunction& h_r, const BoundaryFunction& h_i,
                                   const BoundaryFunction& einvb, cplx k) {
    const int m = h_r.m();
    if (h_i.m() != m || einvb.m() != m)
        throw PreconditionError("boundary_scattering_transform: sample counts differ");
    double emax = 0.0, emin = std::numeric_limits<double>::infinity();
    for (const cplx& v : einvb.values) {
        emax = std::max(emax, std::abs(v));
        emin = std::min(emin, std::abs(v));
    }
    if (emin < 1e-6 * emax)
        throw PreconditionError("boundary_scattering_transform: einvb nearly vanishes");

    const double dtheta = 2.0 * pi / m;
    cplx acc = 0.0;
    for (int j = 0; j < m; ++j) {
        const cplx z = h_r.node(j);
        const cplx psi_r = h_r.values[j] / einvb.values[j];
        const cplx psi_i = h_i.values[j] / einvb.values[j];
        acc += std::exp(cplx(0.0, 1.0) * std::conj(z * k)) * std::conj(z) *
               (std::conj(psi_r) - cplx(0.0, 1.0) * std::conj(psi_i));
    }
    return cplx(0.0, 1.0 / (4.0 * pi)) * acc * dtheta;
}

BoundaryFunction einvb_limit(const DtNOperator& dtn, double Kmax, int directions, int N,
                             double reg, int m) {
    if (directions < 1) throw PreconditionError("einvb_limit: directions must be >= 1");
    BoundaryFunction est(m);
    for (int d = 0; d < directions; ++d) {
        const cplx kd = std::polar(Kmax, 2.0 * pi * (d + 0.5) / directions);
        TraceRecovery rec = recover_traces(dtn, kd, N, reg, m);
        for (int j = 0; j < m; ++j)
            est.values[j] += std::exp(cplx(0.0, -1.0) * est.node(j) * kd) * rec.h_r.values[j];
    }
    for (cplx& v : est.values) v /= double(directions);
    return est;
}

}  // namespace dbar
