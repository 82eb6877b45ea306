#pragma once

#include <string>
#include <vector>

#include "dbar/convection.hpp"

namespace dbar {

/// Synthetic smooth convection-coefficient pair. All kinds produce C-infinity
/// real fields vanishing outside support_radius:
///   gauss    : b1, b2 Gaussians (centers/widths [0], [1]) times the support bump
///   bump     : b1, b2 single compact exponential bumps
///   two-blob : b1 = sum, b2 = half the difference of two bumps
struct Phantom {
    enum class Kind { gauss, bump, two_blob };

    Kind kind = Kind::gauss;
    double amplitude = 0.3;
    std::vector<cplx> centers = {{0.15, 0.1}, {-0.1, 0.12}};
    std::vector<double> widths = {0.25, 0.3};
    double support_radius = 0.8;

    std::string describe() const;  // canonical id string for metadata
};

Phantom::Kind phantom_kind_from_string(const std::string& s);
std::string to_string(Phantom::Kind k);

/// Evaluate the phantom fields at an arbitrary point (exact formulas).
double phantom_b1(const Phantom& p, cplx z);
double phantom_b2(const Phantom& p, cplx z);

/// Sample onto an nx-grid of half-width L. Throws PreconditionError when
/// support_radius exceeds 0.8 L or a bump sticks out of the support disk.
ConvectionField make_phantom(const Phantom& p, int nx, double L);

/// C-infinity radial cutoff: exp(1 - 1/(1 - (r/R)^2)) inside, 0 outside.
double bump_mask(double r, double R);

}  // namespace dbar
