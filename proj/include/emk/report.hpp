#pragma once

#include <cstdlib>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emk/field.hpp"
#include "emk/io.hpp"
#include "emk/shape.hpp"
#include "emk/stroke.hpp"

namespace emk {

// Doubles in reports carry 12 significant digits.
inline double report_num(double v) {
    return std::strtod(format_sig12(v).c_str(), nullptr);
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline nlohmann::json region_report(const RegionSet& rs, double n, double growth_pct) {
    nlohmann::json j;
    j["version"] = 1;
    j["n"] = report_num(n);
    j["growth_pct"] = report_num(growth_pct);
    const auto contour_pixels = count_nonzero(rs.contour);
    j["contour_pixels"] = contour_pixels;
    nlohmann::json regions = nlohmann::json::object();
    for (int r = 0; r < 6; ++r) {
        const Mask& m = rs.masks[static_cast<std::size_t>(r)];
        nlohmann::json entry;
        const auto pixels = count_nonzero(m);
        entry["pixels"] = pixels;
        entry["contour_fraction"] =
            report_num(contour_pixels ? double(pixels) / double(contour_pixels) : 0.0);
        if (pixels == 0) {
            entry["bbox"] = nullptr;
            entry["components"] = nlohmann::json::array();
        } else {
            std::vector<int> lo = {m.nz(), m.ny(), m.nx()}, hi = {-1, -1, -1};
            for (int z = 0; z < m.nz(); ++z)
                for (int y = 0; y < m.ny(); ++y)
                    for (int x = 0; x < m.nx(); ++x) {
                        if (!m(z, y, x))
                            continue;
                        lo = {std::min(lo[0], z), std::min(lo[1], y), std::min(lo[2], x)};
                        hi = {std::max(hi[0], z), std::max(hi[1], y), std::max(hi[2], x)};
                    }
            nlohmann::json bbox = nlohmann::json::array();
            const int first_axis = m.rank() == 3 ? 0 : 1;
            for (int a = first_axis; a < 3; ++a)
                bbox.push_back(lo[static_cast<std::size_t>(a)]);
            for (int a = first_axis; a < 3; ++a)
                bbox.push_back(hi[static_cast<std::size_t>(a)]);
            entry["bbox"] = bbox;
            auto [labels, count] = label_components(m, true);
            std::vector<std::int64_t> npix(static_cast<std::size_t>(count) + 1, 0);
            std::vector<std::array<double, 3>> sums(static_cast<std::size_t>(count) + 1,
                                                    {0, 0, 0});
            for (int z = 0; z < m.nz(); ++z)
                for (int y = 0; y < m.ny(); ++y)
                    for (int x = 0; x < m.nx(); ++x) {
                        int l = labels(z, y, x);
                        if (!l)
                            continue;
                        ++npix[static_cast<std::size_t>(l)];
                        sums[static_cast<std::size_t>(l)][0] += z;
                        sums[static_cast<std::size_t>(l)][1] += y;
                        sums[static_cast<std::size_t>(l)][2] += x;
                    }
            nlohmann::json comps = nlohmann::json::array();
            for (int l = 1; l <= count; ++l) {
                nlohmann::json c;
                auto np = npix[static_cast<std::size_t>(l)];
                c["pixels"] = np;
                nlohmann::json centroid = nlohmann::json::array();
                for (int a = first_axis; a < 3; ++a)
                    centroid.push_back(
                        report_num(sums[static_cast<std::size_t>(l)][static_cast<std::size_t>(a)] /
                                   double(np)));
                c["centroid"] = centroid;
                comps.push_back(c);
            }
            entry["components"] = comps;
        }
        regions[region_names[static_cast<std::size_t>(r)]] = entry;
    }
    j["regions"] = regions;
    return j;
}

// One row per oriented stroke pixel, scan order, columns x,y,theta,id.
inline void write_orientation_csv(const StrokeSet& strokes, const OrientationMap& orient,
                                  const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open for writing: " + path);
    out << "x,y,theta,substroke_id\n";
    for (int y = 0; y < strokes.mask.ny(); ++y)
        for (int x = 0; x < strokes.mask.nx(); ++x) {
            if (!strokes.mask(y, x) || !orient.valid(y, x))
                continue;
            out << x << ',' << y << ',' << format_sig12(orient.theta(y, x)) << ','
                << strokes.labels(y, x) << '\n';
        }
    if (!out)
        throw io_error("write failed: " + path);
}

inline nlohmann::json make_manifest(const std::string& command,
                                    const nlohmann::json& config,
                                    const std::vector<std::string>& input_paths,
                                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["version"] = 1;
    j["command"] = command;
    j["config"] = config;
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& p : input_paths)
        inputs.push_back({{"path", p}, {"fnv1a64", hex64(fnv1a64_file(p))}});
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    return j;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out)
        throw io_error("write failed: " + path);
}

} // namespace emk
