#pragma once

#include <complex>
#include <cstring>
#include <mutex>
#include <type_traits>
#include <vector>

#include <fftw3.h>

#include "emk/error.hpp"
#include "emk/grid.hpp"

namespace emk {

enum class Engine { automatic, direct, fft };

namespace detail {

// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// Smallest size >= n that factors into {2,3,5,7}.
inline int next_fast_size(int n) {
    for (int s = n;; ++s) {
        int r = s;
        for (int f : {2, 3, 5, 7})
            while (r % f == 0)
                r /= f;
        if (r == 1)
            return s;
    }
}

template <class TI, class TK>
auto convolve_direct(const Grid<TI>& img, const Grid<TK>& ker) {
    using TO = decltype(TI{} * TK{});
    auto out = Grid<TO>::like(img);
    const int kcz = ker.nz() / 2, kcy = ker.ny() / 2, kcx = ker.nx() / 2;
    for (int z = 0; z < img.nz(); ++z) {
        const int oz0 = std::max(-kcz, z - img.nz() + 1), oz1 = std::min(kcz, z);
        for (int y = 0; y < img.ny(); ++y) {
            const int oy0 = std::max(-kcy, y - img.ny() + 1), oy1 = std::min(kcy, y);
            for (int x = 0; x < img.nx(); ++x) {
                const int ox0 = std::max(-kcx, x - img.nx() + 1), ox1 = std::min(kcx, x);
                TO acc{};
                for (int oz = oz0; oz <= oz1; ++oz)
                    for (int oy = oy0; oy <= oy1; ++oy)
                        for (int ox = ox0; ox <= ox1; ++ox)
                            acc += img(z - oz, y - oy, x - ox) *
                                   ker(kcz + oz, kcy + oy, kcx + ox);
                out(z, y, x) = acc;
            }
        }
    }
    return out;
}

struct FftDims {
    std::vector<int> full;    // padded transform extents, slowest..fastest
    std::int64_t total = 1;   // product of full
    std::int64_t spectrum = 1; // product with last axis halved (r2c)
};

template <class TA, class TB>
FftDims fft_dims(const Grid<TA>& a, const Grid<TB>& b) {
    FftDims d;
    auto ea = a.extents(), eb = b.extents();
    for (std::size_t i = 0; i < ea.size(); ++i)
        d.full.push_back(next_fast_size(ea[i] + eb[i] - 1));
    for (std::size_t i = 0; i < d.full.size(); ++i) {
        d.total *= d.full[i];
        d.spectrum *= (i + 1 == d.full.size()) ? d.full[i] / 2 + 1 : d.full[i];
    }
    return d;
}

// Copies `g` into the corner of a zeroed buffer with extents `full`.
template <class T>
std::vector<T> pad_corner(const Grid<T>& g, const std::vector<int>& full) {
    const int fz = full.size() == 3 ? full[0] : 1;
    const int fy = full[full.size() - 2], fx = full.back();
    std::vector<T> out(static_cast<std::size_t>(fz) * fy * fx, T{});
    for (int z = 0; z < g.nz(); ++z)
        for (int y = 0; y < g.ny(); ++y)
            std::memcpy(&out[(static_cast<std::size_t>(z) * fy + y) * fx],
                        &g(z, y, 0), sizeof(T) * g.nx());
    return out;
}

// Crops the "same" window out of a full linear-convolution buffer: the
// output at p sits at p + kernel_center in the full result.
template <class T, class TK>
Grid<T> crop_same(const std::vector<T>& full, const std::vector<int>& dims,
                  const Grid<T>& like_img, const Grid<TK>& ker) {
    auto out = Grid<T>::like(like_img);
    const int fy = dims[dims.size() - 2], fx = dims.back();
    const int kcz = ker.nz() / 2, kcy = ker.ny() / 2, kcx = ker.nx() / 2;
    for (int z = 0; z < out.nz(); ++z)
        for (int y = 0; y < out.ny(); ++y)
            std::memcpy(&out(z, y, 0),
                        &full[(static_cast<std::size_t>(z + kcz) * fy + (y + kcy)) * fx + kcx],
                        sizeof(T) * out.nx());
    return out;
}

inline GridD convolve_fft(const GridD& img, const GridD& ker) {
    FftDims d = fft_dims(img, ker);
    std::vector<double> a = pad_corner(img, d.full);
    std::vector<double> b = pad_corner(ker, d.full);
    std::vector<std::complex<double>> sa(d.spectrum), sb(d.spectrum);
    const int rank = static_cast<int>(d.full.size());
    fftw_plan pa, pb, pinv;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        pa = fftw_plan_dft_r2c(rank, d.full.data(), a.data(),
                               reinterpret_cast<fftw_complex*>(sa.data()),
                               FFTW_ESTIMATE);
        pb = fftw_plan_dft_r2c(rank, d.full.data(), b.data(),
                               reinterpret_cast<fftw_complex*>(sb.data()),
                               FFTW_ESTIMATE);
        pinv = fftw_plan_dft_c2r(rank, d.full.data(),
                                 reinterpret_cast<fftw_complex*>(sa.data()),
                                 a.data(), FFTW_ESTIMATE);
    }
    fftw_execute(pa);
    fftw_execute(pb);
    const double scale = 1.0 / static_cast<double>(d.total);
    for (std::int64_t i = 0; i < d.spectrum; ++i)
        sa[i] *= sb[i] * scale;
    fftw_execute(pinv);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pinv);
    }
    return crop_same(a, d.full, img, ker);
}

inline GridC convolve_fft(const GridC& img, const GridC& ker) {
    FftDims d = fft_dims(img, ker);
    std::vector<std::complex<double>> a = pad_corner(img, d.full);
    std::vector<std::complex<double>> b = pad_corner(ker, d.full);
    const int rank = static_cast<int>(d.full.size());
    auto cast = [](std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); };
    fftw_plan pa, pb, pinv;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        pa = fftw_plan_dft(rank, d.full.data(), cast(a.data()), cast(a.data()),
                           FFTW_FORWARD, FFTW_ESTIMATE);
        pb = fftw_plan_dft(rank, d.full.data(), cast(b.data()), cast(b.data()),
                           FFTW_FORWARD, FFTW_ESTIMATE);
        pinv = fftw_plan_dft(rank, d.full.data(), cast(a.data()), cast(a.data()),
                             FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(pa);
    fftw_execute(pb);
    const double scale = 1.0 / static_cast<double>(d.total);
    for (std::int64_t i = 0; i < d.total; ++i)
        a[static_cast<std::size_t>(i)] *= b[static_cast<std::size_t>(i)] * scale;
    fftw_execute(pinv);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pinv);
    }
    return crop_same(a, d.full, img, ker);
}

} // namespace detail

// Zero-padded convolution returning a grid the size of the image:
// out(p) = sum_q image(q) * kernel(p - q + center). Kernel extents must be
// odd; ranks must match. `automatic` picks the direct path for small
// kernels (every extent <= 15) and FFT otherwise.
template <class TI, class TK>
auto convolve_same(const Grid<TI>& img, const Grid<TK>& ker,
                   Engine engine = Engine::automatic) {
    if (img.rank() != 2 && img.rank() != 3)
        throw invalid_input_error("convolve_same: image rank must be 2 or 3");
    if (img.rank() != ker.rank())
        throw invalid_input_error("convolve_same: image/kernel rank mismatch");
    for (int e : ker.extents())
        if (e % 2 == 0)
            throw invalid_spec_error("convolve_same: kernel extents must be odd");
    if (engine == Engine::automatic) {
        bool small = true;
        for (int e : ker.extents())
            small = small && e <= 15;
        engine = small ? Engine::direct : Engine::fft;
    }
    if (engine == Engine::direct)
        return detail::convolve_direct(img, ker);

    using TO = decltype(TI{} * TK{});
    if constexpr (std::is_same_v<TO, double>) {
        return detail::convolve_fft(img, ker);
    } else {
        auto promote = [](const auto& g) {
            GridC c = GridC::like(g);
            for (std::int64_t i = 0; i < g.size(); ++i)
                c[i] = g[i];
            return c;
        };
        if constexpr (std::is_same_v<TI, std::complex<double>> &&
                      std::is_same_v<TK, std::complex<double>>)
            return detail::convolve_fft(img, ker);
        else if constexpr (std::is_same_v<TI, std::complex<double>>)
            return detail::convolve_fft(img, promote(ker));
        else
            return detail::convolve_fft(promote(img), ker);
    }
}

} // namespace emk
