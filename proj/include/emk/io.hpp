#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "emk/error.hpp"
#include "emk/grid.hpp"

namespace emk {

static_assert(std::endian::native == std::endian::little,
              "raw grid I/O assumes a little-endian host");

// ---- EMK1 raw grids -------------------------------------------------------
//
// Layout: magic "EMK1" (4 bytes), uint8 rank, rank x uint32 LE extents
// (slowest to fastest), then float64 LE values in row-major order.

inline void write_grid_raw(const GridD& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open for writing: " + path);
    out.write("EMK1", 4);
    std::uint8_t rank = static_cast<std::uint8_t>(g.rank());
    out.write(reinterpret_cast<const char*>(&rank), 1);
    for (int e : g.extents()) {
        std::uint32_t v = static_cast<std::uint32_t>(e);
        out.write(reinterpret_cast<const char*>(&v), 4);
    }
    out.write(reinterpret_cast<const char*>(g.data()),
              static_cast<std::streamsize>(g.size() * sizeof(double)));
    if (!out)
        throw io_error("write failed: " + path);
}

inline GridD read_grid_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "EMK1", 4) != 0)
        throw format_error("not an EMK1 grid: " + path);
    std::uint8_t rank = 0;
    if (!in.read(reinterpret_cast<char*>(&rank), 1) || (rank != 2 && rank != 3))
        throw format_error("unsupported grid rank: " + path);
    std::vector<int> extents(rank);
    for (auto& e : extents) {
        std::uint32_t v = 0;
        if (!in.read(reinterpret_cast<char*>(&v), 4) || v == 0)
            throw format_error("bad grid extents: " + path);
        e = static_cast<int>(v);
    }
    GridD g = GridD::with_extents(extents);
    if (!in.read(reinterpret_cast<char*>(g.data()),
                 static_cast<std::streamsize>(g.size() * sizeof(double))))
        throw format_error("truncated grid payload: " + path);
    char extra;
    if (in.read(&extra, 1))
        throw format_error("trailing bytes after grid payload: " + path);
    return g;
}

// ---- PGM ------------------------------------------------------------------

inline Grid<std::uint8_t> read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2")
        throw format_error("not a PGM file: " + path);
    auto next_token = [&]() -> long {
        // skip whitespace and '#' comments between header fields
        for (;;) {
            int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        long v = -1;
        in >> v;
        return v;
    };
    long w = next_token(), h = next_token(), maxval = next_token();
    if (!in || w <= 0 || h <= 0)
        throw format_error("bad PGM header: " + path);
    if (maxval <= 0 || maxval > 255)
        throw format_error("only 8-bit PGM supported: " + path);
    auto g = Grid<std::uint8_t>::d2(static_cast<int>(h), static_cast<int>(w));
    if (magic == "P5") {
        in.get(); // single whitespace after maxval
        if (!in.read(reinterpret_cast<char*>(g.data()), g.size()))
            throw format_error("truncated PGM payload: " + path);
    } else {
        for (std::int64_t i = 0; i < g.size(); ++i) {
            long v = -1;
            in >> v;
            if (!in || v < 0 || v > maxval)
                throw format_error("bad PGM sample: " + path);
            g[i] = static_cast<std::uint8_t>(v);
        }
    }
    return g;
}

// Min-max normalized 8-bit render; constant grids come out all black.
inline void write_pgm_norm(const GridD& g, const std::string& path) {
    if (g.rank() != 2)
        throw invalid_input_error("PGM render is 2D only");
    double lo = grid_min(g), hi = grid_max(g);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open for writing: " + path);
    out << "P5\n" << g.nx() << " " << g.ny() << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<std::size_t>(g.nx()));
    for (int y = 0; y < g.ny(); ++y) {
        for (int x = 0; x < g.nx(); ++x) {
            double v = hi > lo ? (g(y, x) - lo) / (hi - lo) : 0.0;
            row[static_cast<std::size_t>(x)] =
                static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw io_error("write failed: " + path);
}

// ---- PNG ------------------------------------------------------------------

inline Grid<std::uint8_t> read_png_gray(const std::string& path) {
    png_image im;
    std::memset(&im, 0, sizeof(im));
    im.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&im, path.c_str()))
        throw format_error(std::string("PNG read failed: ") + im.message);
    if (im.format != PNG_FORMAT_GRAY) {
        png_image_free(&im);
        throw format_error("only 8-bit grayscale PNG input is supported: " + path);
    }
    auto g = Grid<std::uint8_t>::d2(static_cast<int>(im.height),
                                    static_cast<int>(im.width));
    if (!png_image_finish_read(&im, nullptr, g.data(), 0, nullptr)) {
        std::string msg = im.message;
        png_image_free(&im);
        throw format_error("PNG decode failed: " + msg);
    }
    return g;
}

inline void write_png_rgb(const std::string& path, int ny, int nx,
                          const std::vector<std::uint8_t>& rgb) {
    png_image im;
    std::memset(&im, 0, sizeof(im));
    im.version = PNG_IMAGE_VERSION;
    im.width = static_cast<png_uint_32>(nx);
    im.height = static_cast<png_uint_32>(ny);
    im.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&im, path.c_str(), 0, rgb.data(), 0, nullptr))
        throw io_error(std::string("PNG write failed: ") + im.message);
}

// Zero-centered diverging render: negative values toward blue, positive
// toward red, scaled symmetrically by max |v|. All-zero grids come out white.
inline void write_png_diverging(const GridD& g, const std::string& path) {
    if (g.rank() != 2)
        throw invalid_input_error("PNG render is 2D only");
    const double m = max_abs(g);
    const std::array<double, 3> neg = {59, 76, 192}, pos = {180, 4, 38};
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(g.size()) * 3);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        double t = m > 0.0 ? g[i] / m : 0.0;
        const auto& endpoint = t < 0 ? neg : pos;
        double a = std::abs(t);
        for (int c = 0; c < 3; ++c)
            rgb[static_cast<std::size_t>(i) * 3 + static_cast<std::size_t>(c)] =
                static_cast<std::uint8_t>(
                    std::lround(255.0 * (1.0 - a) + endpoint[static_cast<std::size_t>(c)] * a));
    }
    write_png_rgb(path, g.ny(), g.nx(), rgb);
}

// Base image in gray with colored masks alpha-blended on top.
struct OverlayLayer {
    const Mask* mask;
    std::array<std::uint8_t, 3> color;
};

inline void write_png_overlay(const Mask& base, const std::vector<OverlayLayer>& layers,
                              const std::string& path, double alpha = 0.55) {
    if (base.rank() != 2)
        throw invalid_input_error("PNG render is 2D only");
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(base.size()) * 3);
    for (std::int64_t i = 0; i < base.size(); ++i) {
        std::uint8_t g = base[i] ? 190 : 25;
        for (int c = 0; c < 3; ++c)
            rgb[static_cast<std::size_t>(i) * 3 + static_cast<std::size_t>(c)] = g;
    }
    for (const auto& layer : layers) {
        if (!layer.mask->same_shape(base))
            throw invalid_input_error("overlay mask shape mismatch");
        for (std::int64_t i = 0; i < base.size(); ++i) {
            if (!(*layer.mask)[i])
                continue;
            for (int c = 0; c < 3; ++c) {
                auto& px = rgb[static_cast<std::size_t>(i) * 3 + static_cast<std::size_t>(c)];
                px = static_cast<std::uint8_t>(
                    std::lround(px * (1.0 - alpha) + layer.color[static_cast<std::size_t>(c)] * alpha));
            }
        }
    }
    write_png_rgb(path, base.ny(), base.nx(), rgb);
}

// ---- misc -----------------------------------------------------------------

inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<std::uint8_t>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in)
            break;
    }
    return h;
}

// 12 significant digits, the precision used in every textual report.
inline std::string format_sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Image intensity to charge conversion modes.
enum class ChargeMode { binary, signed_, grayscale };

// Border padding so shapes never touch the image edge.
template <class T>
Grid<T> pad_border(const Grid<T>& g, int pad, T fill = T()) {
    if (pad < 0)
        throw invalid_spec_error("padding must be non-negative");
    Grid<T> out = g.rank() == 2
                      ? Grid<T>::d2(g.ny() + 2 * pad, g.nx() + 2 * pad, fill)
                      : Grid<T>::d3(g.nz() + 2 * pad, g.ny() + 2 * pad,
                                    g.nx() + 2 * pad, fill);
    const int zp = g.rank() == 3 ? pad : 0;
    for (int z = 0; z < g.nz(); ++z)
        for (int y = 0; y < g.ny(); ++y)
            for (int x = 0; x < g.nx(); ++x)
                out(z + zp, y + pad, x + pad) = g(z, y, x);
    return out;
}

inline GridD gray_to_charges(const Grid<std::uint8_t>& gray, ChargeMode mode,
                             int threshold = 128) {
    GridD out = GridD::like(gray);
    for (std::int64_t i = 0; i < gray.size(); ++i) {
        switch (mode) {
        case ChargeMode::binary:
            out[i] = gray[i] >= threshold ? 1.0 : 0.0;
            break;
        case ChargeMode::signed_:
            out[i] = std::min(1.0, std::max(-1.0, gray[i] / 127.5 - 1.0));
            break;
        case ChargeMode::grayscale:
            out[i] = gray[i] / 255.0;
            break;
        }
    }
    return out;
}

inline Mask gray_to_mask(const Grid<std::uint8_t>& gray, int threshold = 128) {
    Mask out = Mask::like(gray);
    for (std::int64_t i = 0; i < gray.size(); ++i)
        out[i] = gray[i] >= threshold;
    return out;
}

} // namespace emk
