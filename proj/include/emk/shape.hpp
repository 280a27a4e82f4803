#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

#include "emk/field.hpp"
#include "emk/grid.hpp"

namespace emk {

// Neighbor offset table as (dz, dy, dx) triples. `full` selects 8/26
// connectivity, otherwise faces only (4/6).
inline std::vector<std::array<int, 3>> neighbor_offsets(int rank, bool full) {
    std::vector<std::array<int, 3>> out;
    const int zr = rank == 3 ? 1 : 0;
    for (int dz = -zr; dz <= zr; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dz == 0 && dy == 0 && dx == 0)
                    continue;
                if (!full && std::abs(dz) + std::abs(dy) + std::abs(dx) != 1)
                    continue;
                out.push_back({dz, dy, dx});
            }
    return out;
}

// Erosion with the face-connected structuring element (plus-shaped in 2D,
// octahedral in 3D); pixels outside the image count as background.
inline Mask erode_faces(const Mask& m) {
    Mask out = Mask::like(m, 0);
    auto offs = neighbor_offsets(m.rank(), false);
    for (int z = 0; z < m.nz(); ++z)
        for (int y = 0; y < m.ny(); ++y)
            for (int x = 0; x < m.nx(); ++x) {
                if (!m(z, y, x))
                    continue;
                bool keep = true;
                for (const auto& o : offs) {
                    int qz = z + o[0], qy = y + o[1], qx = x + o[2];
                    if (!m.in_bounds(qz, qy, qx) || !m(qz, qy, qx)) {
                        keep = false;
                        break;
                    }
                }
                out(z, y, x) = keep;
            }
    return out;
}

// One-pixel-thick boundary: shape minus its face-connected erosion.
inline Mask extract_contour(const Mask& shape) {
    Mask eroded = erode_faces(shape);
    Mask out = Mask::like(shape, 0);
    for (std::int64_t i = 0; i < shape.size(); ++i)
        out[i] = shape[i] && !eroded[i];
    return out;
}

// Field values kept on contour pixels (optionally squared), zero elsewhere.
inline GridD on_contour_values(const GridD& field, const Mask& contour, bool square) {
    if (!field.same_shape(contour))
        throw invalid_input_error("contour shape does not match field");
    GridD out = GridD::like(field);
    for (std::int64_t i = 0; i < field.size(); ++i)
        if (contour[i])
            out[i] = square ? field[i] * field[i] : field[i];
    return out;
}

// Flood-fill labeling; labels are assigned in scan order starting at 1.
inline std::pair<Grid<int>, int> label_components(const Mask& m, bool full_connectivity) {
    Grid<int> labels = Grid<int>::like(m, 0);
    auto offs = neighbor_offsets(m.rank(), full_connectivity);
    int next = 0;
    std::deque<std::array<int, 3>> queue;
    for (int z = 0; z < m.nz(); ++z)
        for (int y = 0; y < m.ny(); ++y)
            for (int x = 0; x < m.nx(); ++x) {
                if (!m(z, y, x) || labels(z, y, x))
                    continue;
                labels(z, y, x) = ++next;
                queue.push_back({z, y, x});
                while (!queue.empty()) {
                    auto p = queue.front();
                    queue.pop_front();
                    for (const auto& o : offs) {
                        int qz = p[0] + o[0], qy = p[1] + o[1], qx = p[2] + o[2];
                        if (m.in_bounds(qz, qy, qx) && m(qz, qy, qx) &&
                            !labels(qz, qy, qx)) {
                            labels(qz, qy, qx) = next;
                            queue.push_back({qz, qy, qx});
                        }
                    }
                }
            }
    return {std::move(labels), next};
}

// Pixels of `mask` whose value falls inside the [lo, hi] percentile band of
// the masked values. Thresholds snap outward to the straddling order
// statistics: T_lo = v[floor(lo*(N-1)/100)], T_hi = v[ceil(hi*(N-1)/100)],
// membership inclusive on both ends.
inline Mask percentile_band(const GridD& values, const Mask& mask, double lo, double hi) {
    if (!(lo >= 0.0 && hi <= 100.0 && lo <= hi))
        throw invalid_spec_error("percentile band must satisfy 0 <= lo <= hi <= 100");
    if (!values.same_shape(mask))
        throw invalid_input_error("mask shape does not match values");
    std::vector<double> v;
    for (std::int64_t i = 0; i < mask.size(); ++i)
        if (mask[i])
            v.push_back(values[i]);
    if (v.empty())
        throw invalid_input_error("percentile band over an empty mask");
    std::sort(v.begin(), v.end());
    const auto last = static_cast<double>(v.size() - 1);
    const double t_lo = v[static_cast<std::size_t>(std::floor(lo * last / 100.0))];
    const double t_hi = v[static_cast<std::size_t>(std::ceil(hi * last / 100.0))];
    Mask out = Mask::like(mask, 0);
    for (std::int64_t i = 0; i < mask.size(); ++i)
        out[i] = mask[i] && values[i] >= t_lo && values[i] <= t_hi;
    return out;
}

enum class Region : int { concave = 0, convex, flat, near_cm, far_cm, inside };

inline constexpr std::array<const char*, 6> region_names = {
    "concave", "convex", "flat", "near_cm", "far_cm", "inside"};

// Percentile windows, in percent, applied to on-contour V and |E|.
struct Band {
    double v_lo, v_hi, e_lo, e_hi;
};

struct ThresholdTable {
    std::array<Band, 6> bands;

    static ThresholdTable defaults() {
        ThresholdTable t;
        t[Region::concave] = {70, 100, 0, 50};
        t[Region::convex] = {15, 40, 15, 40};
        t[Region::flat] = {40, 60, 80, 95};
        t[Region::near_cm] = {80, 95, 40, 60};
        t[Region::far_cm] = {0, 25, 0, 25};
        t[Region::inside] = {90, 100, 0, 10};
        return t;
    }

    Band& operator[](Region r) { return bands[static_cast<int>(r)]; }
    const Band& operator[](Region r) const { return bands[static_cast<int>(r)]; }
};

struct RegionSet {
    std::array<Mask, 6> masks;
    Mask contour;

    Mask& operator[](Region r) { return masks[static_cast<int>(r)]; }
    const Mask& operator[](Region r) const { return masks[static_cast<int>(r)]; }
};

// Geodesic dilation of `region` along `contour`: breadth-first growth with
// unit steps (diagonal moves included), stopped after
// round(pct * max image extent) steps. The result stays on the contour.
inline Mask grow_region(const Mask& region, const Mask& contour, double pct) {
    if (!region.same_shape(contour))
        throw invalid_input_error("region shape does not match contour");
    if (!(pct >= 0.0 && pct <= 1.0))
        throw invalid_spec_error("growth fraction must lie in [0, 1]");
    const int max_extent = std::max({contour.nz(), contour.ny(), contour.nx()});
    const int radius = static_cast<int>(std::lround(pct * max_extent));
    Mask out = Mask::like(region, 0);
    Grid<int> dist = Grid<int>::like(region, -1);
    std::deque<std::array<int, 3>> queue;
    for (int z = 0; z < region.nz(); ++z)
        for (int y = 0; y < region.ny(); ++y)
            for (int x = 0; x < region.nx(); ++x) {
                if (!region(z, y, x))
                    continue;
                if (!contour(z, y, x))
                    throw invalid_input_error("region leaves the contour");
                dist(z, y, x) = 0;
                out(z, y, x) = 1;
                queue.push_back({z, y, x});
            }
    auto offs = neighbor_offsets(region.rank(), true);
    while (!queue.empty()) {
        auto p = queue.front();
        queue.pop_front();
        int d = dist(p[0], p[1], p[2]);
        if (d >= radius)
            continue;
        for (const auto& o : offs) {
            int qz = p[0] + o[0], qy = p[1] + o[1], qx = p[2] + o[2];
            if (!contour.in_bounds(qz, qy, qx) || !contour(qz, qy, qx) ||
                dist(qz, qy, qx) >= 0)
                continue;
            dist(qz, qy, qx) = d + 1;
            out(qz, qy, qx) = 1;
            queue.push_back({qz, qy, qx});
        }
    }
    return out;
}

// Classifies contour pixels of a shape into the six characteristic regions
// by intersecting per-region V and |E| percentile bands, then growing each
// intersection along the contour.
inline RegionSet detect_regions(const Mask& shape, double n,
                                const ThresholdTable& table = ThresholdTable::defaults(),
                                double growth_pct = 0.05,
                                const ConvOptions& opts = {}) {
    Mask contour = extract_contour(shape);
    if (count_nonzero(contour) == 0)
        throw invalid_input_error("shape has no contour pixels");
    FieldMap f = compute_field(ChargeImage::from_mask(shape), n, opts);
    RegionSet rs;
    rs.contour = contour;
    for (int r = 0; r < 6; ++r) {
        const Band& b = table.bands[static_cast<std::size_t>(r)];
        Mask band_v = percentile_band(f.V, contour, b.v_lo, b.v_hi);
        Mask band_e = percentile_band(f.magnitude, contour, b.e_lo, b.e_hi);
        Mask seed = Mask::like(contour, 0);
        for (std::int64_t i = 0; i < seed.size(); ++i)
            seed[i] = band_v[i] && band_e[i];
        rs.masks[static_cast<std::size_t>(r)] = grow_region(seed, contour, growth_pct);
    }
    return rs;
}

} // namespace emk
