// emk: electromagnetic potential kernels for image shape and stroke analysis.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emk/emk.hpp"
#include "emk/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::vector<double> n_values;
    int kernel_size = 0; // 0 = auto (full influence)
    std::string engine = "auto";
    std::string mode = "binary";
    double threshold = 128.0;
    std::string output_dir = ".";
    std::string input;
};

emk::Engine parse_engine(const std::string& s) {
    if (s == "fft")
        return emk::Engine::fft;
    if (s == "direct")
        return emk::Engine::direct;
    return emk::Engine::automatic;
}

emk::ChargeMode parse_mode(const std::string& s) {
    if (s == "signed")
        return emk::ChargeMode::signed_;
    if (s == "grayscale")
        return emk::ChargeMode::grayscale;
    return emk::ChargeMode::binary;
}

emk::ConvOptions conv_options(const CommonOpts& c, int rank) {
    emk::ConvOptions o;
    o.engine = parse_engine(c.engine);
    if (c.kernel_size > 0)
        o.kernel_extents.assign(static_cast<std::size_t>(rank), c.kernel_size);
    return o;
}

std::string trim_num(double v) {
    std::string s = emk::format_sig12(v);
    return s;
}

// Input sniffing by magic bytes: EMK1 raw grids, PNG, or PGM.
emk::GridD load_values(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe)
        throw emk::io_error("cannot open: " + path);
    char magic[4] = {};
    probe.read(magic, 4);
    probe.close();
    if (std::string_view(magic, 4) == "EMK1")
        return emk::read_grid_raw(path);
    emk::Grid<std::uint8_t> gray;
    if (magic[0] == '\x89' && magic[1] == 'P')
        gray = emk::read_png_gray(path);
    else if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '2'))
        gray = emk::read_pgm(path);
    else
        throw emk::format_error("unrecognized input format: " + path);
    emk::GridD out = emk::GridD::like(gray);
    for (std::int64_t i = 0; i < gray.size(); ++i)
        out[i] = gray[i];
    return out;
}

// Values to charges. 8-bit sources use the [0,255] maps; EMK1 float grids
// are thresholded (binary) or clamped into the legal charge range.
emk::ChargeImage to_charges(const emk::GridD& vals, bool raw_grid, emk::ChargeMode mode,
                            double threshold) {
    emk::GridD q = emk::GridD::like(vals);
    for (std::int64_t i = 0; i < vals.size(); ++i) {
        double v = vals[i];
        switch (mode) {
        case emk::ChargeMode::binary:
            q[i] = v >= threshold ? 1.0 : 0.0;
            break;
        case emk::ChargeMode::signed_:
            q[i] = raw_grid ? std::clamp(v, -1.0, 1.0)
                            : std::clamp(v / 127.5 - 1.0, -1.0, 1.0);
            break;
        case emk::ChargeMode::grayscale:
            q[i] = raw_grid ? std::clamp(v, 0.0, 1.0) : std::clamp(v / 255.0, 0.0, 1.0);
            break;
        }
    }
    emk::ChargeImage img(emk::pad_border(q, 2));
    bool all_zero = true;
    for (double v : img.values)
        all_zero = all_zero && v == 0.0;
    if (all_zero)
        std::cerr << "warning: charge image is all zero\n";
    return img;
}

emk::ChargeImage load_charges(const CommonOpts& c) {
    std::ifstream probe(c.input, std::ios::binary);
    char magic[4] = {};
    probe.read(magic, 4);
    probe.close();
    bool raw_grid = std::string_view(magic, 4) == "EMK1";
    return to_charges(load_values(c.input), raw_grid, parse_mode(c.mode), c.threshold);
}

emk::Mask charges_to_mask(const emk::ChargeImage& img) {
    emk::Mask m = emk::Mask::like(img.values);
    for (std::int64_t i = 0; i < img.values.size(); ++i)
        m[i] = img.values[i] != 0.0;
    return m;
}

json config_json(const CommonOpts& c) {
    json j;
    j["n_values"] = c.n_values;
    j["kernel_size"] = c.kernel_size > 0 ? json(c.kernel_size) : json("auto");
    j["engine"] = c.engine;
    j["mode"] = c.mode;
    j["threshold"] = emk::report_num(c.threshold);
    j["output_dir"] = c.output_dir;
    return j;
}

struct OutputTracker {
    fs::path dir;
    std::vector<std::string> files;

    explicit OutputTracker(const std::string& d) : dir(d) { fs::create_directories(dir); }

    std::string path(const std::string& name) {
        files.push_back(name);
        return (dir / name).string();
    }

    void finish(const std::string& command, const json& config,
                const std::vector<std::string>& inputs) {
        json m = emk::make_manifest(command, config, inputs, files);
        emk::write_json(m, (dir / "manifest.json").string());
    }
};

void save_triplet(OutputTracker& out, const emk::GridD& g, const std::string& stem,
                  bool diverging) {
    emk::write_grid_raw(g, out.path(stem + ".emk"));
    if (g.rank() != 2)
        return;
    if (diverging)
        emk::write_png_diverging(g, out.path(stem + ".png"));
    else
        emk::write_pgm_norm(g, out.path(stem + ".pgm"));
}

emk::ThresholdTable load_threshold_table(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw emk::io_error("cannot open thresholds file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw emk::format_error(std::string("bad thresholds JSON: ") + e.what());
    }
    emk::ThresholdTable t = emk::ThresholdTable::defaults();
    for (int r = 0; r < 6; ++r) {
        const char* name = emk::region_names[static_cast<std::size_t>(r)];
        if (!j.contains(name))
            continue;
        const auto& arr = j[name];
        if (!arr.is_array() || arr.size() != 4)
            throw emk::format_error(std::string("thresholds entry for ") + name +
                                    " must be [v_lo, v_hi, e_lo, e_hi]");
        t.bands[static_cast<std::size_t>(r)] = {arr[0].get<double>(), arr[1].get<double>(),
                                                arr[2].get<double>(), arr[3].get<double>()};
    }
    return t;
}

const std::array<std::array<std::uint8_t, 3>, 6> region_colors = {{
    {230, 60, 60},   // concave
    {60, 120, 230},  // convex
    {60, 200, 90},   // flat
    {240, 200, 50},  // near_cm
    {180, 70, 220},  // far_cm
    {70, 220, 220},  // inside
}};

int cmd_kernel(const CommonOpts& c, int size, int rank, const std::string& kind) {
    OutputTracker out(c.output_dir);
    for (double n : c.n_values) {
        emk::KernelSpec spec{std::vector<int>(static_cast<std::size_t>(rank), size), n,
                             emk::KernelKind::monopole};
        std::string suffix = "_n" + trim_num(n);
        if (kind == "mono") {
            auto k = emk::monopole_kernel(spec);
            save_triplet(out, k.values, "kernel_monopole" + suffix, false);
        } else if (kind == "dipole-x" || kind == "dipole-y") {
            auto [kx, ky] = emk::dipole_kernels(emk::monopole_kernel(spec));
            const auto& k = kind == "dipole-x" ? kx : ky;
            save_triplet(out, k.values, "kernel_" + kind + suffix, true);
        } else {
            auto k = emk::complex_dipole_kernel(emk::monopole_kernel(spec));
            emk::GridD re = emk::GridD::like(k.values), im = emk::GridD::like(k.values);
            for (std::int64_t i = 0; i < k.values.size(); ++i) {
                re[i] = k.values[i].real();
                im[i] = k.values[i].imag();
            }
            save_triplet(out, re, "kernel_complex_re" + suffix, true);
            save_triplet(out, im, "kernel_complex_im" + suffix, true);
        }
    }
    json cfg = config_json(c);
    cfg["size"] = size;
    cfg["rank"] = rank;
    cfg["kind"] = kind;
    out.finish("kernel", cfg, {});
    return 0;
}

int cmd_potential(const CommonOpts& c, bool with_field) {
    OutputTracker out(c.output_dir);
    emk::ChargeImage img = load_charges(c);
    for (double n : c.n_values) {
        std::string suffix = "_n" + trim_num(n);
        emk::GridD v = emk::electric_potential(img, n, conv_options(c, img.values.rank()));
        save_triplet(out, v, "potential" + suffix, true);
        if (!with_field)
            continue;
        emk::FieldMap f = emk::field_from_potential(v);
        const char* comp_names[3] = {"e_x", "e_y", "e_z"};
        for (std::size_t a = 0; a < f.components.size(); ++a)
            emk::write_grid_raw(f.components[a],
                                out.path(std::string(comp_names[a]) + suffix + ".emk"));
        save_triplet(out, f.magnitude, "e_mag" + suffix, false);
        if (f.theta.rank() == 2)
            emk::write_grid_raw(f.theta, out.path("theta_e" + suffix + ".emk"));
    }
    out.finish(with_field ? "field" : "potential", config_json(c), {c.input});
    return 0;
}

int cmd_roi(const CommonOpts& c, const std::string& thresholds_path, double growth_pct) {
    OutputTracker out(c.output_dir);
    emk::ThresholdTable table = thresholds_path.empty()
                                    ? emk::ThresholdTable::defaults()
                                    : load_threshold_table(thresholds_path);
    emk::ChargeImage img = load_charges(c);
    emk::Mask shape = charges_to_mask(img);
    for (double n : c.n_values) {
        std::string suffix = "_n" + trim_num(n);
        emk::RegionSet rs =
            emk::detect_regions(shape, n, table, growth_pct, conv_options(c, shape.rank()));
        json rep = emk::region_report(rs, n, growth_pct);
        emk::write_json(rep, out.path("roi" + suffix + ".json"));
        if (shape.rank() == 2) {
            std::vector<emk::OverlayLayer> layers;
            for (int r = 0; r < 6; ++r)
                layers.push_back({&rs.masks[static_cast<std::size_t>(r)],
                                  region_colors[static_cast<std::size_t>(r)]});
            emk::write_png_overlay(shape, layers, out.path("roi_overlay" + suffix + ".png"));
        }
    }
    json cfg = config_json(c);
    cfg["growth_pct"] = emk::report_num(growth_pct);
    cfg["thresholds"] = thresholds_path.empty() ? "built-in" : thresholds_path;
    out.finish("roi", cfg, {c.input});
    return 0;
}

struct StrokePipeline {
    emk::StrokeSet strokes;
    emk::OrientationMap orient;
};

// Thin, split, orient; pixels that cannot carry an orientation (isolated
// single-pixel substrokes) are dropped so magnetization stays well-defined.
StrokePipeline build_strokes(const CommonOpts& c, int smoothing_radius, int smoothing_passes) {
    emk::ChargeImage img = load_charges(c);
    if (img.values.rank() != 2)
        throw emk::invalid_input_error("stroke analysis is 2D only");
    emk::Mask mask = charges_to_mask(img);
    emk::StrokeSet strokes = emk::split_substrokes(emk::thin(mask));
    emk::OrientationMap orient =
        emk::stroke_orientation(strokes, smoothing_radius, smoothing_passes);
    bool dropped = false;
    for (std::int64_t i = 0; i < strokes.mask.size(); ++i)
        if (strokes.mask[i] && !orient.valid[i]) {
            strokes.mask[i] = 0;
            strokes.labels[i] = 0;
            dropped = true;
        }
    if (dropped)
        std::cerr << "warning: dropped unorientable single-pixel substrokes\n";
    return {std::move(strokes), std::move(orient)};
}

int cmd_stroke(const CommonOpts& c, int smoothing_radius, int smoothing_passes) {
    OutputTracker out(c.output_dir);
    StrokePipeline p = build_strokes(c, smoothing_radius, smoothing_passes);
    emk::write_orientation_csv(p.strokes, p.orient, out.path("orientation.csv"));
    emk::GridD thin_render = emk::GridD::like(p.strokes.mask);
    for (std::int64_t i = 0; i < thin_render.size(); ++i)
        thin_render[i] = p.strokes.mask[i];
    emk::write_pgm_norm(thin_render, out.path("thinned.pgm"));
    json cfg = config_json(c);
    cfg["smoothing_radius"] = smoothing_radius;
    cfg["smoothing_passes"] = smoothing_passes;
    cfg["substrokes"] = p.strokes.count;
    out.finish("stroke", cfg, {c.input});
    return 0;
}

int cmd_magnetize(const CommonOpts& c, int smoothing_radius, int smoothing_passes, double n) {
    OutputTracker out(c.output_dir);
    StrokePipeline p = build_strokes(c, smoothing_radius, smoothing_passes);
    emk::MagneticResult r = emk::magnetize_stroke(p.strokes, p.orient, {}, n,
                                                  conv_options(c, 2));
    save_triplet(out, r.v_perp, "v_perp", true);
    save_triplet(out, r.v_par, "v_par", true);
    emk::GridD sig = r.v_perp;
    for (auto& v : sig)
        v *= v;
    save_triplet(out, sig, "signature", false);
    json cfg = config_json(c);
    cfg["smoothing_radius"] = smoothing_radius;
    cfg["smoothing_passes"] = smoothing_passes;
    cfg["n"] = emk::report_num(n);
    out.finish("magnetize", cfg, {c.input});
    return 0;
}

int cmd_interact(const CommonOpts& c, int smoothing_radius, int smoothing_passes, double n) {
    OutputTracker out(c.output_dir);
    StrokePipeline p = build_strokes(c, smoothing_radius, smoothing_passes);
    auto opts = conv_options(c, 2);
    std::vector<bool> rep_flips = emk::resolve_interaction(p.strokes, p.orient, true, n, opts);
    std::vector<bool> att_flips = emk::resolve_interaction(p.strokes, p.orient, false, n, opts);
    json cfg = config_json(c);
    cfg["smoothing_radius"] = smoothing_radius;
    cfg["smoothing_passes"] = smoothing_passes;
    cfg["n"] = emk::report_num(n);
    json report;
    report["version"] = 1;
    report["substrokes"] = p.strokes.count;
    for (auto [name, flips] : {std::pair<const char*, std::vector<bool>*>{"repulsion", &rep_flips},
                               {"attraction", &att_flips}}) {
        emk::MagneticResult r = emk::magnetize_stroke(p.strokes, p.orient, *flips, n, opts);
        save_triplet(out, r.v_perp, std::string(name) + "_v_perp", true);
        emk::FieldMap f = emk::field_from_potential(r.v_perp);
        save_triplet(out, f.magnitude, std::string(name) + "_e_mag", false);
        double norm2 = 0.0;
        for (double v : r.v_perp)
            norm2 += v * v;
        report[name]["flips"] = *flips;
        report[name]["v_perp_l2"] = emk::report_num(std::sqrt(norm2));
    }
    emk::write_json(report, out.path("interact.json"));
    out.finish("interact", cfg, {c.input});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"electromagnetic potential kernels for image shape and stroke analysis"};
    app.require_subcommand(1);
    app.fallthrough(false);

    CommonOpts c;
    auto add_common = [&](CLI::App* sub, bool with_input, bool with_n) {
        if (with_n)
            sub->add_option("--n", c.n_values,
                            "falloff exponent(s), one run per value (default 3)");
        sub->add_option("--kernel-size", c.kernel_size,
                        "odd kernel extent; 0 = auto (full influence)");
        sub->add_option("--engine", c.engine, "convolution path")
            ->check(CLI::IsMember({"auto", "fft", "direct"}))
            ->capture_default_str();
        sub->add_option("--output-dir", c.output_dir, "directory for artifacts")
            ->capture_default_str();
        if (with_input) {
            sub->add_option("input", c.input, "input image (PGM/PNG/EMK1)")->required();
            sub->add_option("--mode", c.mode, "charge conversion")
                ->check(CLI::IsMember({"binary", "signed", "grayscale"}))
                ->capture_default_str();
            sub->add_option("--threshold", c.threshold, "binary-mode cutoff")
                ->capture_default_str();
        }
    };

    int kernel_size_arg = 7, kernel_rank = 2;
    std::string kernel_kind = "mono";
    auto* sk = app.add_subcommand("kernel", "export potential kernels");
    add_common(sk, false, true);
    sk->add_option("--size", kernel_size_arg, "odd kernel extent")->required();
    sk->add_option("--rank", kernel_rank, "2 or 3")->check(CLI::IsMember({2, 3}));
    sk->add_option("--kind", kernel_kind, "kernel family")
        ->check(CLI::IsMember({"mono", "dipole-x", "dipole-y", "complex"}));

    auto* sp = app.add_subcommand("potential", "electric potential of a charge image");
    add_common(sp, true, true);

    auto* sf = app.add_subcommand("field", "potential plus field maps");
    add_common(sf, true, true);

    std::string thresholds_path;
    double growth_pct = 0.05;
    auto* sr = app.add_subcommand("roi", "contour region classification");
    add_common(sr, true, true);
    sr->add_option("--thresholds", thresholds_path, "JSON percentile-band table");
    sr->add_option("--growth-pct", growth_pct, "region growth as a fraction of image size")
        ->capture_default_str();

    int smoothing_radius = 1, smoothing_passes = 3;
    double stroke_n = 2.0;
    auto add_stroke_opts = [&](CLI::App* sub, bool with_n) {
        sub->add_option("--smoothing-radius", smoothing_radius,
                        "orientation moving-average radius")
            ->capture_default_str();
        sub->add_option("--smoothing-passes", smoothing_passes,
                        "orientation moving-average passes")
            ->capture_default_str();
        if (with_n)
            sub->add_option("--expert-n", stroke_n,
                            "override the stroke falloff exponent (default 2)");
    };
    auto* ss = app.add_subcommand("stroke", "thin, split and orient strokes");
    add_common(ss, true, false);
    add_stroke_opts(ss, false);

    auto* sm = app.add_subcommand("magnetize", "perpendicular dipole potential of strokes");
    add_common(sm, true, false);
    add_stroke_opts(sm, true);

    auto* si = app.add_subcommand("interact", "repulsion/attraction flip resolution");
    add_common(si, true, false);
    add_stroke_opts(si, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help and friends
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }
    if (c.n_values.empty())
        c.n_values = {3.0};

    try {
        if (sk->parsed())
            return cmd_kernel(c, kernel_size_arg, kernel_rank, kernel_kind);
        if (sp->parsed())
            return cmd_potential(c, false);
        if (sf->parsed())
            return cmd_potential(c, true);
        if (sr->parsed())
            return cmd_roi(c, thresholds_path, growth_pct);
        if (ss->parsed())
            return cmd_stroke(c, smoothing_radius, smoothing_passes);
        if (sm->parsed())
            return cmd_magnetize(c, smoothing_radius, smoothing_passes, stroke_n);
        if (si->parsed())
            return cmd_interact(c, smoothing_radius, smoothing_passes, stroke_n);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
