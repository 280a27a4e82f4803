#pragma once

#include <algorithm>
#include <cassert>
#include <complex>
#include <cstdint>
#include <vector>

#include "emk/error.hpp"

namespace emk {

// Dense row-major grid of rank 2 or 3.
//
// Extents are ordered slowest to fastest: {ny, nx} for rank 2 and
// {nz, ny, nx} for rank 3. Internally every grid carries a z extent
// (nz == 1 for rank 2) so that geometric code can be written once with
// triple loops. Indexing is (y, x) for rank 2 and (z, y, x) for rank 3;
// x is the fastest-varying (column) coordinate.
template <class T>
class Grid {
public:
    Grid() = default;

    static Grid d2(int ny, int nx, T fill = T()) {
        Grid g;
        g.rank_ = 2;
        g.nz_ = 1;
        g.ny_ = ny;
        g.nx_ = nx;
        g.check_extents();
        g.data_.assign(g.size(), fill);
        return g;
    }

    static Grid d3(int nz, int ny, int nx, T fill = T()) {
        Grid g;
        g.rank_ = 3;
        g.nz_ = nz;
        g.ny_ = ny;
        g.nx_ = nx;
        g.check_extents();
        g.data_.assign(g.size(), fill);
        return g;
    }

    static Grid with_extents(const std::vector<int>& extents, T fill = T()) {
        if (extents.size() == 2)
            return d2(extents[0], extents[1], fill);
        if (extents.size() == 3)
            return d3(extents[0], extents[1], extents[2], fill);
        throw invalid_spec_error("grid rank must be 2 or 3");
    }

    // Same rank and extents as `other`, value type T.
    template <class U>
    static Grid like(const Grid<U>& other, T fill = T()) {
        Grid g;
        g.rank_ = other.rank();
        g.nz_ = other.nz();
        g.ny_ = other.ny();
        g.nx_ = other.nx();
        g.data_.assign(g.size(), fill);
        return g;
    }

    int rank() const { return rank_; }
    int nz() const { return nz_; }
    int ny() const { return ny_; }
    int nx() const { return nx_; }

    // Extents in declaration order ({ny,nx} or {nz,ny,nx}).
    std::vector<int> extents() const {
        if (rank_ == 2)
            return {ny_, nx_};
        return {nz_, ny_, nx_};
    }

    std::int64_t size() const {
        return static_cast<std::int64_t>(nz_) * ny_ * nx_;
    }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    std::int64_t index(int z, int y, int x) const {
        return (static_cast<std::int64_t>(z) * ny_ + y) * nx_ + x;
    }

    T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    const T& operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    T& operator()(int y, int x) {
        assert(rank_ == 2);
        return data_[static_cast<std::size_t>(index(0, y, x))];
    }
    const T& operator()(int y, int x) const {
        assert(rank_ == 2);
        return data_[static_cast<std::size_t>(index(0, y, x))];
    }
    T& operator()(int z, int y, int x) {
        return data_[static_cast<std::size_t>(index(z, y, x))];
    }
    const T& operator()(int z, int y, int x) const {
        return data_[static_cast<std::size_t>(index(z, y, x))];
    }

    bool in_bounds(int z, int y, int x) const {
        return z >= 0 && z < nz_ && y >= 0 && y < ny_ && x >= 0 && x < nx_;
    }

    template <class U>
    bool same_shape(const Grid<U>& other) const {
        return rank_ == other.rank() && nz_ == other.nz() && ny_ == other.ny() &&
               nx_ == other.nx();
    }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

private:
    void check_extents() const {
        if (nz_ <= 0 || ny_ <= 0 || nx_ <= 0)
            throw invalid_spec_error("grid extents must be positive");
    }

    int rank_ = 0;
    int nz_ = 0, ny_ = 0, nx_ = 0;
    std::vector<T> data_;
};

using GridD = Grid<double>;
using GridC = Grid<std::complex<double>>;
using Mask = Grid<std::uint8_t>;

template <class T>
T grid_min(const Grid<T>& g) {
    return *std::min_element(g.begin(), g.end());
}

template <class T>
T grid_max(const Grid<T>& g) {
    return *std::max_element(g.begin(), g.end());
}

inline std::int64_t count_nonzero(const Mask& m) {
    std::int64_t c = 0;
    for (auto v : m)
        c += (v != 0);
    return c;
}

// Largest absolute difference, for comparing two equally shaped grids.
inline double max_abs_diff(const GridD& a, const GridD& b) {
    assert(a.same_shape(b));
    double m = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const GridD& g) {
    double m = 0.0;
    for (double v : g)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace emk
