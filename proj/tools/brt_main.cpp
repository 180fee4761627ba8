#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "brt/errors.hpp"
#include "brt/inversion.hpp"
#include "brt/parallel.hpp"
#include "brt/scenario.hpp"
#include "brt/transforms.hpp"
#include "brt/unfolding.hpp"

namespace {

using namespace brt;
using nlohmann::json;

struct GlobalArgs {
    std::string config_path;
    std::string out_dir{"out"};
    int threads{0};
    std::uint64_t seed{0};
    bool seed_set{false};
    bool verbose{false};
};

Scenario load_scenario(const GlobalArgs& args) {
    if (args.config_path.empty()) raise(ErrorCode::ConfigError, "--config is required");
    Scenario s = parse_scenario_file(args.config_path);
    if (args.seed_set) s.seed = args.seed;
    return s;
}

void ensure_out(const GlobalArgs& args) { std::filesystem::create_directories(args.out_dir); }

/// Deterministic batch of rays into the configured geometry.
std::vector<BrokenRay> sample_rays(const Scenario& s, int count) {
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<BrokenRay> rays;
    TraceOptions opts;
    opts.max_reflections = 4096;
    while (static_cast<int>(rays.size()) < count) {
        try {
            if (s.geometry == "tube") {
                const RectTube tube = scenario_tube(s);
                const double x0 = tube.width * (0.02 + 0.96 * unit(rng));
                const double angle = (unit(rng) - 0.5) * (kPi * 0.9);
                rays.push_back(rect_tube_trace(tube, {x0, 0.0},
                                               {std::sin(angle), std::cos(angle)}, opts));
            } else {
                const ConeDomain cone = scenario_cone(s);
                const double theta = cone.alpha * (0.02 + 0.96 * unit(rng));
                const Vec2 start = polar(cone.h(theta), theta);
                const Vec2 inward = (-start).normalized();
                const double swing = (unit(rng) - 0.5) * (kPi * 0.9);
                rays.push_back(trace_broken_ray(cone, start, rotate(inward, swing), opts));
            }
        } catch (const Error&) {
            continue;  // resample rays that hit a corner or graze an edge
        }
    }
    return rays;
}

int cmd_trace(const GlobalArgs& args) {
    const Scenario s = load_scenario(args);
    ensure_out(args);
    const std::vector<BrokenRay> rays = sample_rays(s, s.rays);
    std::ofstream out(args.out_dir + "/rays.json", std::ios::binary);
    out << "[\n";
    for (std::size_t i = 0; i < rays.size(); ++i)
        out << rays[i].to_json() << (i + 1 < rays.size() ? ",\n" : "\n");
    out << "]\n";
    if (args.verbose) std::cerr << "traced " << rays.size() << " rays\n";
    return 0;
}

int cmd_forward(const GlobalArgs& args) {
    const Scenario s = load_scenario(args);
    ensure_out(args);
    const ScalarField2D phantom = make_planar_phantom(s.phantom);
    const QuadratureSpec quad{s.node_density};
    const std::vector<BrokenRay> rays = sample_rays(s, s.rays);
    std::ofstream out(args.out_dir + "/forward.csv", std::ios::binary);
    out << "x0,y0,exit_x,exit_y,reflections,length,value\n";
    char buf[256];
    for (const BrokenRay& ray : rays) {
        const double v = brt_forward(phantom, ray, AttenuationSpec{s.attenuation}, quad);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g\n",
                      ray.vertices.front().x, ray.vertices.front().y, ray.vertices.back().x,
                      ray.vertices.back().y, ray.reflection_count(), ray.total_length, v);
        out << buf;
    }
    return 0;
}

int cmd_sinogram(const GlobalArgs& args) {
    const Scenario s = load_scenario(args);
    ensure_out(args);
    const ConeDomain cone = scenario_cone(s);
    const DihedralUnfolding u = DihedralUnfolding::create(cone);
    const ScalarField2D phantom = make_planar_phantom(s.phantom);
    const QuadratureSpec quad{s.node_density};
    Sinogram sino = assemble_sinogram(
        u,
        [&](const BrokenRay& ray) {
            return brt_forward(phantom, ray, AttenuationSpec{s.attenuation}, quad);
        },
        s.n_angles, s.n_offsets, 1.05 * cone.max_h());
    add_gaussian_noise(sino, s.noise_sigma, s.seed);
    sino.save_csv(args.out_dir + "/sinogram.csv");
    if (args.verbose) std::cerr << "sinogram written\n";
    return 0;
}

int run_and_gate(const Scenario& s, const GlobalArgs& args) {
    const RunResult result = run_scenario(s, args.out_dir, args.verbose);
    if (!result.pass && result.thresholds_checked) return 3;
    return 0;
}

int cmd_fixed_method(const GlobalArgs& args, const std::string& method) {
    Scenario s = load_scenario(args);
    if (s.method != method)
        raise(ErrorCode::ConfigError,
              "config method '" + s.method + "' does not match subcommand '" + method + "'");
    return run_and_gate(s, args);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"broken ray transform toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs args;
    app.add_option("--config", args.config_path, "scenario config file");
    app.add_option("--out", args.out_dir, "output directory");
    app.add_option("--threads", args.threads, "worker thread count (0 = hardware)");
    auto* seed_opt = app.add_option("--seed", args.seed, "override the scenario seed");
    app.add_flag("--verbose", args.verbose, "log progress to stderr");

    auto* c_trace = app.add_subcommand("trace", "trace random broken rays");
    auto* c_forward = app.add_subcommand("forward", "broken ray transform of the phantom");
    auto* c_sino = app.add_subcommand("sinogram", "assemble the unfolded-line sinogram");
    auto* c_rec = app.add_subcommand("reconstruct", "run the configured cone reconstruction");
    auto* c_cube = app.add_subcommand("periodic-cube", "periodic inversion in the cube");
    auto* c_oct = app.add_subcommand("octant", "periodic inversion on the sphere octant");
    auto* c_null = app.add_subcommand("null-check", "verify a null-space construction");
    auto* c_probe = app.add_subcommand("att-probe", "attenuated cylinder injectivity probe");
    auto* c_run = app.add_subcommand("run", "run the full scenario");

    CLI11_PARSE(app, argc, argv);
    args.seed_set = seed_opt->count() > 0;
    brt::set_global_thread_count(args.threads);

    try {
        if (c_trace->parsed()) return cmd_trace(args);
        if (c_forward->parsed()) return cmd_forward(args);
        if (c_sino->parsed()) return cmd_sinogram(args);
        if (c_rec->parsed()) {
            Scenario s = load_scenario(args);
            if (s.method != "fbp" && s.method != "cgls")
                raise(ErrorCode::ConfigError, "reconstruct needs method = fbp or cgls");
            return run_and_gate(s, args);
        }
        if (c_cube->parsed()) return cmd_fixed_method(args, "torus-fourier");
        if (c_oct->parsed()) return cmd_fixed_method(args, "funk");
        if (c_null->parsed()) return cmd_fixed_method(args, "null-check");
        if (c_probe->parsed()) return cmd_fixed_method(args, "att-probe");
        if (c_run->parsed()) {
            const Scenario s = load_scenario(args);
            return run_and_gate(s, args);
        }
    } catch (const brt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == brt::ErrorCode::ConfigError ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
