#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "brt/phantoms.hpp"
#include "brt/planar.hpp"

namespace brt {

/// Everything a reproducible experiment needs: geometry + phantom +
/// transform parameters + inversion method + thresholds. Parsed from a
/// strict key = value config with [section] headers; unknown keys are
/// errors.
struct Scenario {
    std::string name{"scenario"};
    std::uint64_t seed{0};

    // [geometry]
    std::string geometry{"cone"};  // cone | tube | disk | cube | cylinder | octant
    int alpha_pi_num{1};
    int alpha_pi_den{1};
    std::string h_key{"constant"};
    double h_value{1.0};
    double h_eps{0.1};
    double h_waves{2.0};
    double tube_width{1.0};
    double tube_length{1.0};
    int cube_n{2};
    double cylinder_length{1.0};
    double cylinder_a{0.0};

    // [phantom]
    PhantomSpec phantom;
    std::string phantom_preset_name;
    std::string profile_key{"sin"};
    double profile_p1{1.0};
    double profile_p2{0.0};

    // [transform]
    double attenuation{0.0};
    int n_angles{360};
    int n_offsets{257};
    double node_density{64.0};
    double noise_sigma{0.0};

    // [inversion]
    std::string method{"none"};  // fbp | cgls | torus-fourier | funk | null-check | att-probe
    int grid_n{256};
    int band{8};
    int l_max{6};
    int max_iterations{500};
    double tolerance{1e-6};
    int rays{1000};
    int max_q{64};
    int phase_count{32};
    int probe_modes{8};
    int probe_slopes{64};

    // [output]
    double rel_l2_threshold{-1.0};
    double max_residual_threshold{-1.0};
    double max_abs_threshold{-1.0};

    double alpha() const;
};

/// Parse and validate a scenario config; ConfigError carries the line number.
Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<config>");

struct RunResult {
    bool pass{true};
    bool thresholds_checked{false};
    std::string metrics_json;
};

/// Execute the scenario end to end and write its artifacts (data CSVs,
/// reconstruction CSV + PGM, metrics JSON) under out_dir. Deterministic for
/// a fixed seed regardless of the thread count.
RunResult run_scenario(const Scenario& scenario, const std::string& out_dir, bool verbose = false);

// Geometry factories shared by the CLI subcommands.
ConeDomain scenario_cone(const Scenario& scenario);
RectTube scenario_tube(const Scenario& scenario);

}  // namespace brt
