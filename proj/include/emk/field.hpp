#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "emk/convolve.hpp"
#include "emk/error.hpp"
#include "emk/grid.hpp"
#include "emk/kernel.hpp"

namespace emk {

// Charge density image; every value must lie in [-1, 1].
struct ChargeImage {
    GridD values;

    explicit ChargeImage(GridD v) : values(std::move(v)) {
        for (double q : values)
            if (!(q >= -1.0 && q <= 1.0))
                throw invalid_input_error("charge values must lie in [-1, 1]");
    }

    static ChargeImage from_mask(const Mask& m, double q = 1.0) {
        GridD v = GridD::like(m);
        for (std::int64_t i = 0; i < m.size(); ++i)
            v[i] = m[i] ? q : 0.0;
        return ChargeImage(std::move(v));
    }
};

struct ConvOptions {
    Engine engine = Engine::automatic;
    std::vector<int> kernel_extents; // empty means full influence (2*e + 1)

    ConvOptions() = default;
    ConvOptions(Engine e, std::vector<int> extents = {})
        : engine(e), kernel_extents(std::move(extents)) {}
};

namespace detail {

inline std::vector<int> resolve_kernel_extents(const std::vector<int>& image_extents,
                                               const ConvOptions& opts) {
    if (opts.kernel_extents.empty())
        return default_kernel_extents(image_extents);
    if (opts.kernel_extents.size() != image_extents.size())
        throw invalid_spec_error("kernel rank does not match image rank");
    return opts.kernel_extents;
}

} // namespace detail

// Potential map of a charge image: convolution with the monopole kernel.
inline GridD electric_potential(const ChargeImage& img, double n,
                                const ConvOptions& opts = {}) {
    KernelSpec spec{detail::resolve_kernel_extents(img.values.extents(), opts), n,
                    KernelKind::monopole};
    PotentialKernel k = monopole_kernel(spec);
    return convolve_same(img.values, k.values, opts.engine);
}

// Central-difference partial derivative; axis 0 = x (fastest), 1 = y, 2 = z.
// Border samples fall back to one-sided differences.
inline GridD derivative(const GridD& f, int axis) {
    if (axis < 0 || axis >= f.rank())
        throw invalid_spec_error("derivative axis out of range");
    GridD out = GridD::like(f);
    const int sz = axis == 2 ? 1 : 0, sy = axis == 1 ? 1 : 0, sx = axis == 0 ? 1 : 0;
    const int n = axis == 2 ? f.nz() : axis == 1 ? f.ny() : f.nx();
    if (n == 1)
        return out;
    for (int z = 0; z < f.nz(); ++z)
        for (int y = 0; y < f.ny(); ++y)
            for (int x = 0; x < f.nx(); ++x) {
                const bool lo = f.in_bounds(z - sz, y - sy, x - sx);
                const bool hi = f.in_bounds(z + sz, y + sy, x + sx);
                double a = lo ? f(z - sz, y - sy, x - sx) : f(z, y, x);
                double b = hi ? f(z + sz, y + sy, x + sx) : f(z, y, x);
                out(z, y, x) = (b - a) / ((lo && hi) ? 2.0 : 1.0);
            }
    return out;
}

struct FieldMap {
    GridD V;
    std::vector<GridD> components; // E = -grad V, ordered (Ex, Ey[, Ez])
    GridD magnitude;
    GridD theta; // atan2(Ey, Ex); rank 2 only, empty otherwise
};

inline FieldMap field_from_potential(const GridD& V) {
    FieldMap f;
    f.V = V;
    for (int axis = 0; axis < V.rank(); ++axis) {
        GridD e = derivative(V, axis);
        for (auto& v : e)
            v = -v;
        f.components.push_back(std::move(e));
    }
    f.magnitude = GridD::like(V);
    for (std::int64_t i = 0; i < V.size(); ++i) {
        double s = 0.0;
        for (const auto& c : f.components)
            s += c[i] * c[i];
        f.magnitude[i] = std::sqrt(s);
    }
    if (V.rank() == 2) {
        f.theta = GridD::like(V);
        for (std::int64_t i = 0; i < V.size(); ++i)
            f.theta[i] = std::atan2(f.components[1][i], f.components[0][i]);
    }
    return f;
}

inline FieldMap compute_field(const ChargeImage& img, double n,
                              const ConvOptions& opts = {}) {
    return field_from_potential(electric_potential(img, n, opts));
}

// Compensates rasterization density: a diagonal line carries sqrt(2) fewer
// pixels per unit length than an axis-aligned one.
inline double density_factor(double theta) {
    return 1.0 / std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
}

// Per-pixel stroke direction; `valid` marks pixels where theta is defined.
struct OrientationMap {
    GridD theta;
    Mask valid;
};

struct MagneticResult {
    GridD v_perp; // antisymmetric across the stroke
    GridD v_par;  // symmetric along it
};

// Dipole-layer potential of an oriented charge image. Each charged pixel
// becomes a complex source q * F(theta) * e^{i theta}; one convolution with
// the packed kernel kx + i*ky yields both components, the perpendicular one
// in the imaginary part.
inline MagneticResult magnetic_potential(const ChargeImage& img,
                                         const OrientationMap& orient, double n,
                                         const ConvOptions& opts = {}) {
    if (img.values.rank() != 2)
        throw invalid_input_error("magnetic potential is 2D only");
    if (!img.values.same_shape(orient.theta) || !img.values.same_shape(orient.valid))
        throw invalid_input_error("orientation map shape does not match image");
    GridC c = GridC::like(img.values);
    for (std::int64_t i = 0; i < c.size(); ++i) {
        double q = img.values[i];
        if (q == 0.0)
            continue;
        if (!orient.valid[i])
            throw invalid_input_error("charged pixel lacks an orientation");
        double t = orient.theta[i];
        c[i] = std::polar(q * density_factor(t), t);
    }
    KernelSpec spec{detail::resolve_kernel_extents(img.values.extents(), opts), n,
                    KernelKind::monopole};
    ComplexDipoleKernel k = complex_dipole_kernel(monopole_kernel(spec));
    GridC w = convolve_same(c, k.values, opts.engine);
    MagneticResult r{GridD::like(img.values), GridD::like(img.values)};
    for (std::int64_t i = 0; i < w.size(); ++i) {
        r.v_perp[i] = w[i].imag();
        r.v_par[i] = w[i].real();
    }
    return r;
}

struct GaussReport {
    double flux;               // sum of (V_in - V_out) over boundary faces
    double interior_field_max; // max |E| over the region
};

// Discrete Gauss check over a region mask: total outward flux through the
// region boundary plus the largest field magnitude inside the region.
// The region must not touch the image border.
inline GaussReport check_gauss_closure(const GridD& V, const Mask& region) {
    if (!V.same_shape(region))
        throw invalid_input_error("region shape does not match potential");
    if (count_nonzero(region) == 0)
        throw invalid_input_error("region is empty");
    static const int face6[6][3] = {{0, 0, 1},  {0, 0, -1}, {0, 1, 0},
                                    {0, -1, 0}, {1, 0, 0},  {-1, 0, 0}};
    const int nfaces = V.rank() == 3 ? 6 : 4;
    GaussReport rep{0.0, 0.0};
    for (int z = 0; z < V.nz(); ++z)
        for (int y = 0; y < V.ny(); ++y)
            for (int x = 0; x < V.nx(); ++x) {
                if (!region(z, y, x))
                    continue;
                bool border = x == 0 || x == V.nx() - 1 || y == 0 || y == V.ny() - 1;
                if (V.rank() == 3)
                    border = border || z == 0 || z == V.nz() - 1;
                if (border)
                    throw invalid_input_error("region touches the image border");
                double e2 = 0.0;
                for (int f = 0; f < nfaces; ++f) {
                    const int qz = z + face6[f][0], qy = y + face6[f][1],
                              qx = x + face6[f][2];
                    if (!region(qz, qy, qx))
                        rep.flux += V(z, y, x) - V(qz, qy, qx);
                }
                for (int axis = 0; axis < V.rank(); ++axis) {
                    const int sz = axis == 2, sy = axis == 1, sx = axis == 0;
                    double d = 0.5 * (V(z + sz, y + sy, x + sx) -
                                      V(z - sz, y - sy, x - sx));
                    e2 += d * d;
                }
                rep.interior_field_max = std::max(rep.interior_field_max, std::sqrt(e2));
            }
    return rep;
}

} // namespace emk
