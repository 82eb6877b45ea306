#include "dbar/phantom.hpp"

#include <cmath>
#include <sstream>

#include "dbar/errors.hpp"

namespace dbar {

double bump_mask(double r, double R) {
    const double t = r / R;
    if (!(t < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

namespace {

double gauss(cplx z, cplx c, double w) { return std::exp(-std::norm(z - c) / (2.0 * w * w)); }

void require_params(const Phantom& p, std::size_t n) {
    if (p.centers.size() < n || p.widths.size() < n)
        throw PreconditionError("Phantom: kind needs at least " + std::to_string(n) +
                                " centers and widths");
    for (double w : p.widths)
        if (!(w > 0.0)) throw PreconditionError("Phantom: widths must be positive");
}

void require_inside(const Phantom& p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(p.centers[i]) + p.widths[i] > p.support_radius + 1e-12)
            throw PreconditionError("Phantom: bump " + std::to_string(i) +
                                    " sticks out of the support disk");
}

}  // namespace

double phantom_b1(const Phantom& p, cplx z) {
    switch (p.kind) {
        case Phantom::Kind::gauss:
            return p.amplitude * gauss(z, p.centers[0], p.widths[0]) *
                   bump_mask(std::abs(z), p.support_radius);
        case Phantom::Kind::bump:
            return p.amplitude * bump_mask(std::abs(z - p.centers[0]), p.widths[0]);
        case Phantom::Kind::two_blob:
            return p.amplitude * (bump_mask(std::abs(z - p.centers[0]), p.widths[0]) +
                                  bump_mask(std::abs(z - p.centers[1]), p.widths[1]));
    }
    return 0.0;
}

double phantom_b2(const Phantom& p, cplx z) {
    switch (p.kind) {
        case Phantom::Kind::gauss:
            return p.amplitude * gauss(z, p.centers[1], p.widths[1]) *
                   bump_mask(std::abs(z), p.support_radius);
        case Phantom::Kind::bump:
            return p.amplitude * bump_mask(std::abs(z - p.centers[1]), p.widths[1]);
        case Phantom::Kind::two_blob:
            return 0.5 * p.amplitude * (bump_mask(std::abs(z - p.centers[0]), p.widths[0]) -
                                        bump_mask(std::abs(z - p.centers[1]), p.widths[1]));
    }
    return 0.0;
}

ConvectionField make_phantom(const Phantom& p, int nx, double L) {
    require_params(p, 2);
    if (p.support_radius > 0.8 * L + 1e-12)
        throw PreconditionError("make_phantom: support_radius exceeds 0.8 L");
    if (p.kind != Phantom::Kind::gauss) require_inside(p, 2);

    ComplexGrid b1(nx, L), b2(nx, L);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
            const cplx z = b1.node(i, j);
            b1.at(i, j) = phantom_b1(p, z);
            b2.at(i, j) = phantom_b2(p, z);
        }
    return ConvectionField(std::move(b1), std::move(b2), p.support_radius);
}

std::string to_string(Phantom::Kind k) {
    switch (k) {
        case Phantom::Kind::gauss: return "gauss";
        case Phantom::Kind::bump: return "bump";
        case Phantom::Kind::two_blob: return "two-blob";
    }
    return "?";
}

Phantom::Kind phantom_kind_from_string(const std::string& s) {
    if (s == "gauss") return Phantom::Kind::gauss;
    if (s == "bump") return Phantom::Kind::bump;
    if (s == "two-blob" || s == "two_blob") return Phantom::Kind::two_blob;
    throw PreconditionError("unknown phantom kind '" + s + "'");
}

std::string Phantom::describe() const {
    std::ostringstream os;
    os.precision(12);
    os << to_string(kind) << "(amp=" << amplitude;
    for (std::size_t i = 0; i < centers.size(); ++i)
        os << ",c" << i << "=" << centers[i].real() << "+" << centers[i].imag() << "i";
    for (std::size_t i = 0; i < widths.size(); ++i) os << ",w" << i << "=" << widths[i];
    os << ",R=" << support_radius << ")";
    return os.str();
}

}  // namespace dbar
