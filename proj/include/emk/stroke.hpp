#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "emk/field.hpp"
#include "emk/grid.hpp"
#include "emk/shape.hpp"

namespace emk {

// Zhang-Suen skeletonization. A post-pass restores one seed pixel for any
// connected component the iteration erased outright (isolated 2x2 blocks
// die in the first subpass), so the component count is preserved.
inline Mask thin(const Mask& src) {
    if (src.rank() != 2)
        throw invalid_input_error("thinning is 2D only");
    if (count_nonzero(src) == 0)
        throw invalid_input_error("thinning an empty mask");
    Mask m = Mask::like(src, 0);
    for (std::int64_t i = 0; i < src.size(); ++i)
        m[i] = src[i] ? 1 : 0;
    Mask original = m;

    auto at = [&](int y, int x) -> int {
        return m.in_bounds(0, y, x) && m(y, x) ? 1 : 0;
    };
    auto subpass = [&](int phase) -> bool {
        std::vector<std::pair<int, int>> kill;
        for (int y = 0; y < m.ny(); ++y)
            for (int x = 0; x < m.nx(); ++x) {
                if (!m(y, x))
                    continue;
                // p2..p9 clockwise from north
                const int p[10] = {0,
                                   0,
                                   at(y - 1, x),
                                   at(y - 1, x + 1),
                                   at(y, x + 1),
                                   at(y + 1, x + 1),
                                   at(y + 1, x),
                                   at(y + 1, x - 1),
                                   at(y, x - 1),
                                   at(y - 1, x - 1)};
                int b = 0;
                for (int k = 2; k <= 9; ++k)
                    b += p[k];
                if (b < 2 || b > 6)
                    continue;
                int a = 0;
                for (int k = 2; k <= 9; ++k)
                    a += (p[k] == 0 && p[k == 9 ? 2 : k + 1] == 1);
                if (a != 1)
                    continue;
                if (phase == 0) {
                    if ((p[2] & p[4] & p[6]) != 0 || (p[4] & p[6] & p[8]) != 0)
                        continue;
                } else {
                    if ((p[2] & p[4] & p[8]) != 0 || (p[2] & p[6] & p[8]) != 0)
                        continue;
                }
                kill.emplace_back(y, x);
            }
        for (auto [y, x] : kill)
            m(y, x) = 0;
        return !kill.empty();
    };
    while (int(subpass(0)) | int(subpass(1))) {
    }

    // Zhang-Suen's transition test keeps redundant staircase pixels: the
    // extra pixel of a "Z" step, and corners whose two neighbors touch each
    // other. Strip any non-endpoint pixel whose set neighbors form a single
    // 8-connected block — removal cannot disconnect anything there, while
    // real T/X junctions have 3+ blocks and stay — unless all four face
    // neighbors are set (removal would open a hole).
    bool pruned = true;
    while (pruned) {
        pruned = false;
        for (int y = 0; y < m.ny(); ++y)
            for (int x = 0; x < m.nx(); ++x) {
                if (!m(y, x))
                    continue;
                int ny[8], nx[8], cnt = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!dy && !dx)
                            continue;
                        if (at(y + dy, x + dx)) {
                            ny[cnt] = dy;
                            nx[cnt] = dx;
                            ++cnt;
                        }
                    }
                if (cnt < 2)
                    continue;
                if (at(y - 1, x) && at(y + 1, x) && at(y, x - 1) && at(y, x + 1))
                    continue;
                int comp[8];
                for (int i = 0; i < cnt; ++i)
                    comp[i] = i;
                for (int i = 0; i < cnt; ++i)
                    for (int j = 0; j < i; ++j)
                        if (std::abs(ny[i] - ny[j]) <= 1 &&
                            std::abs(nx[i] - nx[j]) <= 1) {
                            int a = comp[i], b = comp[j];
                            for (int k = 0; k < cnt; ++k)
                                if (comp[k] == a)
                                    comp[k] = b;
                        }
                int blocks = 0;
                for (int i = 0; i < cnt; ++i)
                    blocks += comp[i] == i;
                if (blocks == 1) {
                    m(y, x) = 0;
                    pruned = true;
                }
            }
    }

    auto [labels, count] = label_components(original, true);
    if (count > 0) {
        std::vector<char> alive(static_cast<std::size_t>(count) + 1, 0);
        for (std::int64_t i = 0; i < m.size(); ++i)
            if (m[i])
                alive[static_cast<std::size_t>(labels[i])] = 1;
        for (std::int64_t i = 0; i < m.size(); ++i) {
            int l = labels[i];
            if (l > 0 && !alive[static_cast<std::size_t>(l)]) {
                m[i] = 1; // scan order makes this the smallest pixel
                alive[static_cast<std::size_t>(l)] = 1;
            }
        }
    }
    return m;
}

struct StrokeSet {
    Mask mask;         // union of all substrokes
    Grid<int> labels;  // 0 background, 1..count substroke ids
    int count = 0;
};

// Splits a thinned mask at junctions: pixels with 3+ neighbors (3x3
// neighborhood, center excluded) are dropped, the remaining components are
// simple paths or cycles.
inline StrokeSet split_substrokes(const Mask& thin_mask) {
    if (thin_mask.rank() != 2)
        throw invalid_input_error("substroke splitting is 2D only");
    Mask keep = Mask::like(thin_mask, 0);
    for (int y = 0; y < thin_mask.ny(); ++y)
        for (int x = 0; x < thin_mask.nx(); ++x) {
            if (!thin_mask(y, x))
                continue;
            int nb = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (!dy && !dx)
                        continue;
                    nb += thin_mask.in_bounds(0, y + dy, x + dx) &&
                          thin_mask(y + dy, x + dx);
                }
            keep(y, x) = nb < 3;
        }
    StrokeSet s;
    s.mask = keep;
    auto [labels, count] = label_components(keep, true);
    s.labels = std::move(labels);
    s.count = count;
    return s;
}

namespace detail {

// Moving average with the given radius, applied `passes` times. Open
// sequences truncate the window at the ends; cyclic ones wrap.
inline void smooth_sequence(std::vector<double>& v, int radius, int passes, bool cyclic) {
    if (radius <= 0 || v.size() < 2)
        return;
    const int n = static_cast<int>(v.size());
    std::vector<double> next(v.size());
    for (int pass = 0; pass < passes; ++pass) {
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            int cnt = 0;
            for (int j = i - radius; j <= i + radius; ++j) {
                int jj = j;
                if (cyclic)
                    jj = ((j % n) + n) % n;
                else if (j < 0 || j >= n)
                    continue;
                sum += v[static_cast<std::size_t>(jj)];
                ++cnt;
            }
            next[static_cast<std::size_t>(i)] = sum / cnt;
        }
        v.swap(next);
    }
}

} // namespace detail

// Walks each substroke from an endpoint (or around the cycle) and assigns
// every pixel the direction of its outgoing step, smoothed along the walk.
// Single-pixel substrokes stay unoriented (valid = 0).
inline OrientationMap stroke_orientation(const StrokeSet& strokes,
                                         int smoothing_radius = 1,
                                         int smoothing_passes = 3) {
    if (smoothing_radius < 0 || smoothing_passes < 0)
        throw invalid_spec_error("smoothing parameters must be non-negative");
    const Mask& m = strokes.mask;
    if (m.rank() != 2)
        throw invalid_input_error("stroke orientation is 2D only");
    OrientationMap out{GridD::like(m), Mask::like(m, 0)};

    auto offs = neighbor_offsets(2, true);
    auto sub_neighbors = [&](int label, int y, int x) {
        std::vector<std::pair<int, int>> nb;
        for (const auto& o : offs) {
            int qy = y + o[1], qx = x + o[2];
            if (m.in_bounds(0, qy, qx) && strokes.labels(qy, qx) == label)
                nb.emplace_back(qy, qx);
        }
        return nb;
    };

    for (int label = 1; label <= strokes.count; ++label) {
        std::vector<std::pair<int, int>> pix;
        for (int y = 0; y < m.ny(); ++y)
            for (int x = 0; x < m.nx(); ++x)
                if (strokes.labels(y, x) == label)
                    pix.emplace_back(y, x);
        if (pix.size() < 2)
            continue;

        std::pair<int, int> start{-1, -1};
        bool open = false;
        for (const auto& p : pix) {
            auto nb = sub_neighbors(label, p.first, p.second);
            if (nb.size() > 2)
                throw invalid_input_error("substroke is not a simple path or cycle");
            if (nb.size() == 1 && !open) {
                start = p;
                open = true;
            }
        }
        if (!open)
            start = pix[0];

        Mask visited = Mask::like(m, 0);
        std::vector<std::pair<int, int>> path{start};
        visited(start.first, start.second) = 1;
        if (!open) {
            // cycle: pick the walk direction, favoring a face-connected step
            auto nb = sub_neighbors(label, start.first, start.second);
            auto is_face = [&](const std::pair<int, int>& q) {
                return std::abs(q.first - start.first) + std::abs(q.second - start.second) == 1;
            };
            std::pair<int, int> second = nb[0];
            for (const auto& q : nb)
                if (is_face(q) && !is_face(second))
                    second = q;
            path.push_back(second);
            visited(second.first, second.second) = 1;
        }
        while (true) {
            auto [cy, cx] = path.back();
            std::pair<int, int> next{-1, -1};
            bool found = false;
            for (const auto& q : sub_neighbors(label, cy, cx))
                if (!visited(q.first, q.second)) {
                    next = q;
                    found = true;
                    break;
                }
            if (!found)
                break;
            path.push_back(next);
            visited(next.first, next.second) = 1;
        }
        if (path.size() != pix.size())
            throw invalid_input_error("substroke is not a simple path or cycle");

        const bool cyclic = !open;
        if (cyclic) {
            // canonical cycle sense: negative signed area, so the walk
            // direction agrees with the tangent atan2(-x, y) about the
            // cycle's interior
            double area2 = 0.0;
            for (std::size_t i = 0; i < path.size(); ++i) {
                const auto& a = path[i];
                const auto& b = path[(i + 1) % path.size()];
                area2 += double(a.second) * b.first - double(b.second) * a.first;
            }
            if (area2 > 0.0)
                std::reverse(path.begin() + 1, path.end());
        }

        const std::size_t L = path.size();
        std::size_t steps = cyclic ? L : L - 1;
        std::vector<double> dx(steps), dy(steps);
        for (std::size_t i = 0; i < steps; ++i) {
            const auto& a = path[i];
            const auto& b = path[(i + 1) % L];
            dy[i] = b.first - a.first;
            dx[i] = b.second - a.second;
        }
        detail::smooth_sequence(dx, smoothing_radius, smoothing_passes, cyclic);
        detail::smooth_sequence(dy, smoothing_radius, smoothing_passes, cyclic);
        for (std::size_t i = 0; i < L; ++i) {
            std::size_t k = i < steps ? i : steps - 1; // last open pixel copies its predecessor
            out.theta(path[i].first, path[i].second) = std::atan2(dy[k], dx[k]);
            out.valid(path[i].first, path[i].second) = 1;
        }
    }
    return out;
}

// Magnetizes all substrokes together; `flips` rotates the orientation of
// selected substrokes by pi before the field is computed.
inline MagneticResult magnetize_stroke(const StrokeSet& strokes,
                                       const OrientationMap& orient,
                                       const std::vector<bool>& flips = {},
                                       double n = 2.0, const ConvOptions& opts = {}) {
    if (!flips.empty() && flips.size() != static_cast<std::size_t>(strokes.count))
        throw invalid_input_error("one flip flag per substroke expected");
    ChargeImage img = ChargeImage::from_mask(strokes.mask);
    OrientationMap o = orient;
    if (!flips.empty())
        for (std::int64_t i = 0; i < o.theta.size(); ++i) {
            int l = strokes.labels[i];
            if (l > 0 && flips[static_cast<std::size_t>(l - 1)])
                o.theta[i] += std::numbers::pi;
        }
    return magnetic_potential(img, o, n, opts);
}

// Chooses per-substroke orientation flips extremizing the L2 norm of the
// combined perpendicular potential: maximal norm = repulsion, minimal =
// attraction. Exact search up to 12 substrokes, greedy ascent beyond.
inline std::vector<bool> resolve_interaction(const StrokeSet& strokes,
                                             const OrientationMap& orient,
                                             bool maximize, double n = 2.0,
                                             const ConvOptions& opts = {}) {
    const int k = strokes.count;
    if (k <= 1)
        return std::vector<bool>(static_cast<std::size_t>(std::max(k, 0)), false);

    // One field per substroke; the total for a sign assignment is the
    // matching signed sum, so the norm is a quadratic form in the signs.
    std::vector<GridD> fields;
    fields.reserve(static_cast<std::size_t>(k));
    for (int label = 1; label <= k; ++label) {
        StrokeSet single;
        single.mask = Mask::like(strokes.mask, 0);
        single.labels = Grid<int>::like(strokes.labels, 0);
        single.count = 1;
        for (std::int64_t i = 0; i < strokes.mask.size(); ++i)
            if (strokes.labels[i] == label) {
                single.mask[i] = 1;
                single.labels[i] = 1;
            }
        fields.push_back(magnetize_stroke(single, orient, {}, n, opts).v_perp);
    }
    std::vector<std::vector<double>> gram(static_cast<std::size_t>(k),
                                          std::vector<double>(static_cast<std::size_t>(k)));
    for (int s = 0; s < k; ++s)
        for (int t = s; t < k; ++t) {
            double dot = 0.0;
            for (std::int64_t i = 0; i < fields[0].size(); ++i)
                dot += fields[static_cast<std::size_t>(s)][i] *
                       fields[static_cast<std::size_t>(t)][i];
            gram[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = dot;
            gram[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)] = dot;
        }
    auto score = [&](const std::vector<int>& sigma) {
        double sc = 0.0;
        for (int s = 0; s < k; ++s)
            for (int t = 0; t < k; ++t)
                sc += sigma[static_cast<std::size_t>(s)] * sigma[static_cast<std::size_t>(t)] *
                      gram[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
        return sc;
    };

    std::vector<int> best(static_cast<std::size_t>(k), 1);
    if (k <= 12) {
        double best_score = score(best);
        std::vector<int> sigma(static_cast<std::size_t>(k), 1);
        for (std::uint64_t bits = 1; bits < (std::uint64_t(1) << (k - 1)); ++bits) {
            for (int s = 1; s < k; ++s)
                sigma[static_cast<std::size_t>(s)] = (bits >> (s - 1)) & 1 ? -1 : 1;
            double sc = score(sigma);
            if (maximize ? sc > best_score : sc < best_score) {
                best_score = sc;
                best = sigma;
            }
        }
    } else {
        double best_score = score(best);
        for (;;) {
            int flip = -1;
            double flip_score = best_score;
            for (int s = 1; s < k; ++s) {
                best[static_cast<std::size_t>(s)] *= -1;
                double sc = score(best);
                best[static_cast<std::size_t>(s)] *= -1;
                if (maximize ? sc > flip_score : sc < flip_score) {
                    flip_score = sc;
                    flip = s;
                }
            }
            if (flip < 0)
                break;
            best[static_cast<std::size_t>(flip)] *= -1;
            best_score = flip_score;
        }
    }
    std::vector<bool> flips(static_cast<std::size_t>(k));
    for (int s = 0; s < k; ++s)
        flips[static_cast<std::size_t>(s)] = best[static_cast<std::size_t>(s)] < 0;
    return flips;
}

inline std::vector<bool> resolve_repulsion(const StrokeSet& strokes,
                                           const OrientationMap& orient,
                                           double n = 2.0, const ConvOptions& opts = {}) {
    return resolve_interaction(strokes, orient, true, n, opts);
}

// Position-invariant stroke descriptor: squared perpendicular potential.
inline GridD stroke_signature(const StrokeSet& strokes, const OrientationMap& orient,
                              double n = 2.0, const ConvOptions& opts = {}) {
    GridD v = magnetize_stroke(strokes, orient, {}, n, opts).v_perp;
    for (auto& x : v)
        x *= x;
    return v;
}

} // namespace emk
