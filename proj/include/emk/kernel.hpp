#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "emk/error.hpp"
#include "emk/grid.hpp"

namespace emk {

enum class KernelKind { monopole, dipole_x, dipole_y, complex_dipole };

inline const char* kernel_kind_name(KernelKind k) {
    switch (k) {
    case KernelKind::monopole: return "monopole";
    case KernelKind::dipole_x: return "dipole-x";
    case KernelKind::dipole_y: return "dipole-y";
    case KernelKind::complex_dipole: return "complex-dipole";
    }
    return "?";
}

struct KernelSpec {
    std::vector<int> extents; // {ny,nx} or {nz,ny,nx}, every extent odd
    double n = 3.0;
    KernelKind kind = KernelKind::monopole;
};

inline void validate_kernel_spec(const KernelSpec& spec) {
    if (spec.extents.size() != 2 && spec.extents.size() != 3)
        throw invalid_spec_error("kernel rank must be 2 or 3");
    for (int e : spec.extents) {
        if (e <= 0)
            throw invalid_spec_error("kernel extents must be positive");
        if (e % 2 == 0)
            throw invalid_spec_error("kernel extents must be odd");
    }
    if (!(spec.n >= 1.0))
        throw invalid_spec_error("falloff exponent n must be >= 1");
    if (spec.extents.size() == 3 && spec.kind != KernelKind::monopole)
        throw invalid_spec_error("dipole kernels are 2D only");
}

// Radial profile with distances clamped to 1 so the center stays finite.
// Branches keep the potential strictly decreasing in r for every n >= 1:
// n > 2: r^(2-n); n = 2: -ln r; n < 2: -r^(2-n).
inline double monopole_value(double r, double n) {
    double rc = std::max(r, 1.0);
    if (n == 2.0)
        return -std::log(rc);
    double v = std::pow(rc, 2.0 - n);
    return n > 2.0 ? v : -v;
}

// Euclidean distance from the central element; extents must be odd.
inline GridD distance_grid(const std::vector<int>& extents) {
    KernelSpec probe{extents, 3.0, KernelKind::monopole};
    validate_kernel_spec(probe);
    GridD g = GridD::with_extents(extents);
    const int cz = g.nz() / 2, cy = g.ny() / 2, cx = g.nx() / 2;
    for (int z = 0; z < g.nz(); ++z)
        for (int y = 0; y < g.ny(); ++y)
            for (int x = 0; x < g.nx(); ++x) {
                double dz = z - cz, dy = y - cy, dx = x - cx;
                g(z, y, x) = std::sqrt(dz * dz + dy * dy + dx * dx);
            }
    return g;
}

struct PotentialKernel {
    KernelSpec spec;
    GridD values;
};

struct ComplexDipoleKernel {
    KernelSpec spec;
    GridC values;
};

inline PotentialKernel monopole_kernel(const KernelSpec& spec) {
    validate_kernel_spec(spec);
    if (spec.kind != KernelKind::monopole)
        throw invalid_spec_error("monopole_kernel called with non-monopole kind");
    PotentialKernel k{spec, distance_grid(spec.extents)};
    for (auto& v : k.values)
        v = monopole_value(v, spec.n);
    return k;
}

// Central-difference pair of dipole kernels derived from a monopole kernel.
// dipole_x(p) = mono(p + ex) - mono(p - ex) with outside treated as zero;
// dipole_y is the negated transpose of dipole_x.
inline std::pair<PotentialKernel, PotentialKernel>
dipole_kernels(const PotentialKernel& mono) {
    if (mono.values.rank() != 2)
        throw invalid_spec_error("dipole kernels are 2D only");
    const GridD& m = mono.values;
    PotentialKernel kx{mono.spec, GridD::like(m)};
    kx.spec.kind = KernelKind::dipole_x;
    PotentialKernel ky{mono.spec, GridD::like(m)};
    ky.spec.kind = KernelKind::dipole_y;
    auto at = [&](int y, int x) -> double {
        return m.in_bounds(0, y, x) ? m(y, x) : 0.0;
    };
    for (int y = 0; y < m.ny(); ++y)
        for (int x = 0; x < m.nx(); ++x) {
            kx.values(y, x) = at(y, x + 1) - at(y, x - 1);
            ky.values(y, x) = at(y - 1, x) - at(y + 1, x);
        }
    return {std::move(kx), std::move(ky)};
}

// K = kx + i*ky, the two dipole responses packed into one complex kernel.
inline ComplexDipoleKernel complex_dipole_kernel(const PotentialKernel& mono) {
    auto [kx, ky] = dipole_kernels(mono);
    ComplexDipoleKernel k{mono.spec, GridC::like(mono.values)};
    k.spec.kind = KernelKind::complex_dipole;
    for (std::int64_t i = 0; i < k.values.size(); ++i)
        k.values[i] = {kx.values[i], ky.values[i]};
    return k;
}

// Central-difference stencils (one per axis, x first). Arranged so that
// convolve_same(f, k) equals the centered derivative on interior pixels:
// convolution flips the array, hence +0.5 sits at kernel index 0.
inline std::vector<GridD> derivative_kernels(int rank) {
    if (rank != 2 && rank != 3)
        throw invalid_spec_error("derivative kernels exist for rank 2 or 3");
    std::vector<GridD> out;
    if (rank == 2) {
        out.push_back(GridD::d2(1, 3));
        out.push_back(GridD::d2(3, 1));
    } else {
        out.push_back(GridD::d3(1, 1, 3));
        out.push_back(GridD::d3(1, 3, 1));
        out.push_back(GridD::d3(3, 1, 1));
    }
    for (auto& g : out) {
        g[0] = 0.5;
        g[2] = -0.5;
    }
    return out;
}

// Default "full influence" kernel size: 2*e + 1 per image extent, so every
// pixel pair interacts regardless of position.
inline std::vector<int> default_kernel_extents(const std::vector<int>& image_extents) {
    std::vector<int> out;
    out.reserve(image_extents.size());
    for (int e : image_extents)
        out.push_back(2 * e + 1);
    return out;
}

} // namespace emk
