// Synthetic geometry and statistics shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "emk/emk.hpp"

namespace fx {

using Pt = std::pair<int, int>; // (y, x)

inline emk::Mask from_points(int ny, int nx, const std::vector<Pt>& pts) {
    emk::Mask m = emk::Mask::d2(ny, nx);
    for (auto [y, x] : pts)
        if (m.in_bounds(0, y, x))
            m(y, x) = 1;
    return m;
}

inline emk::Mask disk(int ny, int nx, double cy, double cx, double r) {
    emk::Mask m = emk::Mask::d2(ny, nx);
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
            if (std::hypot(y - cy, x - cx) <= r)
                m(y, x) = 1;
    return m;
}

// Angle-ordered 1-px ring; dense parametric sampling with consecutive
// duplicates removed gives an 8-connected closed curve.
inline std::vector<Pt> circle_points(double cy, double cx, double r,
                                     double a0 = 0.0,
                                     double a1 = 2.0 * std::numbers::pi) {
    std::vector<Pt> pts;
    int steps = std::max(16, static_cast<int>(std::ceil(8.0 * r * (a1 - a0))));
    for (int i = 0; i <= steps; ++i) {
        double a = a0 + (a1 - a0) * i / steps;
        Pt p{static_cast<int>(std::lround(cy + r * std::sin(a))),
             static_cast<int>(std::lround(cx + r * std::cos(a)))};
        if (pts.empty() || pts.back() != p)
            pts.push_back(p);
    }
    if (pts.size() > 1 && pts.front() == pts.back())
        pts.pop_back();
    return pts;
}

inline std::vector<Pt> bresenham(int y0, int x0, int y1, int x1) {
    std::vector<Pt> pts;
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        pts.push_back({y0, x0});
        if (x0 == x1 && y0 == y1)
            break;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
    return pts;
}

inline std::vector<Pt> polyline(const std::vector<Pt>& vertices) {
    std::vector<Pt> pts;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        auto seg = bresenham(vertices[i].first, vertices[i].second,
                             vertices[i + 1].first, vertices[i + 1].second);
        if (!pts.empty())
            seg.erase(seg.begin());
        pts.insert(pts.end(), seg.begin(), seg.end());
    }
    return pts;
}

struct Star {
    emk::Mask mask;
    std::vector<std::pair<double, double>> tips;    // (y, x) outer vertices
    std::vector<std::pair<double, double>> notches; // (y, x) inner vertices
};

// Five-point star as an even-odd filled polygon of 10 alternating vertices.
inline Star star(int ny, int nx, double cy, double cx, double r_out, double r_in,
                 double rot = -std::numbers::pi / 2) {
    Star s;
    std::vector<std::pair<double, double>> poly;
    for (int i = 0; i < 10; ++i) {
        double r = i % 2 == 0 ? r_out : r_in;
        double a = rot + i * std::numbers::pi / 5;
        std::pair<double, double> v{cy + r * std::sin(a), cx + r * std::cos(a)};
        poly.push_back(v);
        (i % 2 == 0 ? s.tips : s.notches).push_back(v);
    }
    s.mask = emk::Mask::d2(ny, nx);
    for (int y = 0; y < ny; ++y) { // even-odd scanline fill
        std::vector<double> xs;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            auto [y0, x0] = poly[i];
            auto [y1, x1] = poly[(i + 1) % poly.size()];
            if ((y0 <= y) != (y1 <= y))
                xs.push_back(x0 + (y - y0) / (y1 - y0) * (x1 - x0));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
            for (int x = static_cast<int>(std::ceil(xs[i]));
                 x <= static_cast<int>(std::floor(xs[i + 1])); ++x)
                if (x >= 0 && x < nx)
                    s.mask(y, x) = 1;
    }
    return s;
}

// Horizontal sinusoidal shear: content at (y, x) moves to x + amp*sin(2*pi*y/wl).
template <class T>
emk::Grid<T> warp_rows(const emk::Grid<T>& in, double amp, double wl) {
    emk::Grid<T> out = emk::Grid<T>::like(in);
    for (int y = 0; y < in.ny(); ++y) {
        int shift = static_cast<int>(
            std::lround(amp * std::sin(2.0 * std::numbers::pi * y / wl)));
        for (int x = 0; x < in.nx(); ++x) {
            int xs = x - shift;
            if (xs >= 0 && xs < in.nx())
                out(y, x) = in(y, xs);
        }
    }
    return out;
}

inline std::pair<double, double> warp_rows_point(std::pair<double, double> p,
                                                 double amp, double wl) {
    int shift = static_cast<int>(
        std::lround(amp * std::sin(2.0 * std::numbers::pi *
                                   std::lround(p.first) / wl)));
    return {p.first, p.second + shift};
}

inline emk::ChargeImage charges_from_mask(const emk::Mask& m) {
    return emk::ChargeImage::from_mask(m);
}

inline emk::GridD random_charges(int ny, int nx, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    emk::GridD g = emk::GridD::d2(ny, nx);
    for (auto& v : g)
        v = dist(rng);
    return g;
}

inline emk::GridD block_downsample(const emk::GridD& g, int f) {
    emk::GridD out = emk::GridD::d2(g.ny() / f, g.nx() / f);
    for (int y = 0; y < out.ny(); ++y)
        for (int x = 0; x < out.nx(); ++x) {
            double s = 0.0;
            for (int dy = 0; dy < f; ++dy)
                for (int dx = 0; dx < f; ++dx)
                    s += g(y * f + dy, x * f + dx);
            out(y, x) = s / (f * f);
        }
    return out;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= a.size();
    mb /= b.size();
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double pearson(const emk::GridD& a, const emk::GridD& b) {
    return pearson(std::vector<double>(a.begin(), a.end()),
                   std::vector<double>(b.begin(), b.end()));
}

// Pixels within Chebyshev distance d of any set pixel.
inline emk::Mask dilate(const emk::Mask& m, int d) {
    emk::Mask out = emk::Mask::like(m);
    for (int z = 0; z < m.nz(); ++z)
        for (int y = 0; y < m.ny(); ++y)
            for (int x = 0; x < m.nx(); ++x) {
                if (!m(z, y, x))
                    continue;
                for (int dz = m.rank() == 3 ? -d : 0; dz <= (m.rank() == 3 ? d : 0); ++dz)
                    for (int dy = -d; dy <= d; ++dy)
                        for (int dx = -d; dx <= d; ++dx)
                            if (m.in_bounds(z + dz, y + dy, x + dx))
                                out(z + dz, y + dy, x + dx) = 1;
            }
    return out;
}

struct Mug {
    emk::Mask solid;       // 3D voxel cup
    emk::Mask rim;         // top band of the wall
    emk::Mask cavity_wall; // solid voxels facing the cavity air, below the rim
};

// Upright cylindrical mug: annular wall on a solid floor disk, open on top.
inline Mug mug(int n = 64, double radius = 24.0, int wall = 3, int floor_t = 3,
               int base_z = 6, int height = 50) {
    Mug m;
    m.solid = emk::Mask::d3(n, n, n);
    double c = (n - 1) / 2.0;
    int top_z = base_z + height - 1;
    emk::Mask cavity = emk::Mask::d3(n, n, n);
    for (int z = base_z; z <= top_z && z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                double r = std::hypot(y - c, x - c);
                if (r > radius)
                    continue;
                bool in_floor = z < base_z + floor_t;
                bool in_wall = r > radius - wall;
                if (in_floor || in_wall)
                    m.solid(z, y, x) = 1;
                else
                    cavity(z, y, x) = 1;
            }
    m.rim = emk::Mask::d3(n, n, n);
    m.cavity_wall = emk::Mask::d3(n, n, n);
    auto nb = emk::neighbor_offsets(3, false);
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                if (!m.solid(z, y, x))
                    continue;
                if (z >= top_z - 1) {
                    m.rim(z, y, x) = 1;
                    continue;
                }
                for (auto [dz, dy, dx] : nb)
                    if (cavity.in_bounds(z + dz, y + dy, x + dx) &&
                        cavity(z + dz, y + dy, x + dx)) {
                        m.cavity_wall(z, y, x) = 1;
                        break;
                    }
            }
    return m;
}

// Hand-drawn "2": top hook, diagonal, base bar.
inline std::vector<Pt> digit2_vertices(int oy = 0, int ox = 0) {
    std::vector<Pt> v = {{26, 22}, {18, 32}, {22, 46}, {34, 44},
                         {58, 24}, {62, 30}, {60, 50}};
    for (auto& p : v) {
        p.first += oy;
        p.second += ox;
    }
    return v;
}

inline double wrap_angle(double a) {
    while (a > std::numbers::pi)
        a -= 2.0 * std::numbers::pi;
    while (a < -std::numbers::pi)
        a += 2.0 * std::numbers::pi;
    return a;
}

} // namespace fx
