#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "emk/error.hpp"
#include "emk/grid.hpp"
#include "emk/kernel.hpp"

namespace emk {

struct PointCharge {
    int x = 0, y = 0, z = 0;
    double q = 0.0;
};

struct PointDipole {
    int x = 0, y = 0;
    double theta = 0.0;
    double strength = 1.0;
};

// Direct per-pixel superposition, independent of the convolution machinery.
// Contributions are accumulated smallest magnitude first to keep rounding
// deterministic and tight. Refuses grids larger than 64*64 elements.
inline GridD brute_force_potential(const std::vector<PointCharge>& charges,
                                   const std::vector<int>& extents, double n) {
    if (!(n >= 1.0))
        throw invalid_spec_error("falloff exponent n must be >= 1");
    GridD out = GridD::with_extents(extents);
    if (out.size() > 64 * 64)
        throw budget_error("oracle grid exceeds the 4096-element budget");
    for (const auto& c : charges)
        if (!out.in_bounds(c.z, c.y, c.x))
            throw invalid_input_error("point charge outside the grid");
    std::vector<double> contrib(charges.size());
    for (int z = 0; z < out.nz(); ++z)
        for (int y = 0; y < out.ny(); ++y)
            for (int x = 0; x < out.nx(); ++x) {
                for (std::size_t i = 0; i < charges.size(); ++i) {
                    const auto& c = charges[i];
                    double dz = z - c.z, dy = y - c.y, dx = x - c.x;
                    double r = std::sqrt(dz * dz + dy * dy + dx * dx);
                    contrib[i] = c.q * monopole_value(r, n);
                }
                std::sort(contrib.begin(), contrib.end(),
                          [](double a, double b) { return std::abs(a) < std::abs(b); });
                double sum = 0.0;
                for (double v : contrib)
                    sum += v;
                out(z, y, x) = sum;
            }
    return out;
}

// Realizes each dipole as a +/- charge pair displaced one pixel to either
// side, perpendicular to the dipole's direction: u = (round(-sin theta),
// round(cos theta)) with halves rounded away from zero.
inline GridD brute_force_dipole_potential(const std::vector<PointDipole>& dipoles,
                                          const std::vector<int>& extents, double n) {
    if (extents.size() != 2)
        throw invalid_spec_error("dipole oracle is 2D only");
    std::vector<PointCharge> charges;
    charges.reserve(dipoles.size() * 2);
    for (const auto& d : dipoles) {
        int ux = static_cast<int>(std::lround(-std::sin(d.theta)));
        int uy = static_cast<int>(std::lround(std::cos(d.theta)));
        charges.push_back({d.x + ux, d.y + uy, 0, d.strength});
        charges.push_back({d.x - ux, d.y - uy, 0, -d.strength});
    }
    return brute_force_potential(charges, extents, n);
}

} // namespace emk
