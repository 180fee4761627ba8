#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "brt/errors.hpp"
#include "brt/scenario.hpp"

namespace brt {

double Scenario::alpha() const { return kPi * alpha_pi_num / alpha_pi_den; }

namespace {

struct RawEntry {
    std::string value;
    int line;
};

using RawConfig = std::map<std::string, RawEntry>;  // "section.key" -> value

[[noreturn]] void config_fail(const std::string& origin, int line, const std::string& what) {
    raise(ErrorCode::ConfigError, origin + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

RawConfig tokenize(const std::string& text, const std::string& origin) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') config_fail(origin, line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) config_fail(origin, line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) config_fail(origin, line_no, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) config_fail(origin, line_no, "empty key or value");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        const std::string full = section.empty() ? key : section + "." + key;
        if (raw.count(full)) config_fail(origin, line_no, "duplicate key '" + full + "'");
        raw[full] = {value, line_no};
    }
    return raw;
}

class ConfigReader {
  public:
    ConfigReader(RawConfig raw, std::string origin) : raw_(std::move(raw)), origin_(std::move(origin)) {}

    bool has(const std::string& key) const { return raw_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        used_.insert(key);
        return it->second.value;
    }

    double get_double(const std::string& key, double fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        used_.insert(key);
        char* end = nullptr;
        const double v = std::strtod(it->second.value.c_str(), &end);
        if (end == it->second.value.c_str() || *end != '\0')
            config_fail(origin_, it->second.line, "expected a number for '" + key + "'");
        return v;
    }

    int get_int(const std::string& key, int fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        const double v = get_double(key, 0.0);
        const int iv = static_cast<int>(std::lround(v));
        if (std::abs(v - iv) > 1e-12)
            config_fail(origin_, it->second.line, "expected an integer for '" + key + "'");
        return iv;
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        used_.insert(key);
        try {
            return std::stoull(it->second.value);
        } catch (...) {
            config_fail(origin_, it->second.line, "expected an unsigned integer for '" + key + "'");
        }
    }

    void reject_unknown() const {
        for (const auto& [key, entry] : raw_)
            if (!used_.count(key))
                config_fail(origin_, entry.line, "unknown key '" + key + "'");
    }

  private:
    RawConfig raw_;
    std::string origin_;
    std::set<std::string> used_;
};

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
    ConfigReader cfg(tokenize(text, origin), origin);
    Scenario s;

    s.name = cfg.get_string("name", s.name);
    s.seed = cfg.get_u64("seed", s.seed);

    s.geometry = cfg.get_string("geometry.kind", s.geometry);
    const std::set<std::string> geometries{"cone", "tube", "disk", "cube", "cylinder", "octant"};
    if (!geometries.count(s.geometry))
        raise(ErrorCode::ConfigError, origin + ": unknown geometry kind '" + s.geometry + "'");
    s.alpha_pi_num = cfg.get_int("geometry.alpha_pi_num", s.alpha_pi_num);
    s.alpha_pi_den = cfg.get_int("geometry.alpha_pi_den", s.alpha_pi_den);
    if (s.alpha_pi_num < 1 || s.alpha_pi_den < 1 || s.alpha() > kTwoPi + 1e-12)
        raise(ErrorCode::ConfigError, origin + ": cone angle must lie in (0, 2 pi]");
    s.h_key = cfg.get_string("geometry.h", s.h_key);
    s.h_value = cfg.get_double("geometry.h_value", s.h_value);
    s.h_eps = cfg.get_double("geometry.h_eps", s.h_eps);
    s.h_waves = cfg.get_double("geometry.h_waves", s.h_waves);
    s.tube_width = cfg.get_double("geometry.width", s.tube_width);
    s.tube_length = cfg.get_double("geometry.length", s.tube_length);
    s.cube_n = cfg.get_int("geometry.n", s.cube_n);
    s.cylinder_length = cfg.get_double("geometry.cylinder_length", s.cylinder_length);
    s.cylinder_a = cfg.get_double("geometry.attenuation_a", s.cylinder_a);

    s.phantom_preset_name = cfg.get_string("phantom.preset", "");
    if (!s.phantom_preset_name.empty()) {
        s.phantom = phantom_preset(s.phantom_preset_name);
    } else {
        s.phantom.key = cfg.get_string("phantom.kind", "gaussian");
        s.phantom.center = {cfg.get_double("phantom.center_x", 0.0),
                            cfg.get_double("phantom.center_y", 0.0)};
        s.phantom.amplitude = cfg.get_double("phantom.amplitude", 1.0);
        s.phantom.sigma = cfg.get_double("phantom.sigma", 0.15);
        s.phantom.radius = cfg.get_double("phantom.radius", 0.3);
        s.phantom.angular_k = cfg.get_int("phantom.angular_k", 1);
        s.phantom.r0 = cfg.get_double("phantom.r0", 0.2);
        s.phantom.r1 = cfg.get_double("phantom.r1", 0.8);
    }
    s.profile_key = cfg.get_string("phantom.profile", s.profile_key);
    s.profile_p1 = cfg.get_double("phantom.profile_p1", s.profile_p1);
    s.profile_p2 = cfg.get_double("phantom.profile_p2", s.profile_p2);

    s.attenuation = cfg.get_double("transform.attenuation", s.attenuation);
    s.n_angles = cfg.get_int("transform.angles", s.n_angles);
    s.n_offsets = cfg.get_int("transform.offsets", s.n_offsets);
    s.node_density = cfg.get_double("transform.node_density", s.node_density);
    s.noise_sigma = cfg.get_double("transform.noise_sigma", s.noise_sigma);
    if (s.n_angles < 1 || s.n_offsets < 2)
        raise(ErrorCode::ConfigError, origin + ": sinogram needs angles >= 1, offsets >= 2");

    s.method = cfg.get_string("inversion.method", s.method);
    const std::set<std::string> methods{"none",        "fbp",        "cgls",
                                        "torus-fourier", "funk",     "null-check",
                                        "att-probe"};
    if (!methods.count(s.method))
        raise(ErrorCode::ConfigError, origin + ": unknown inversion method '" + s.method + "'");
    s.grid_n = cfg.get_int("inversion.grid", s.grid_n);
    s.band = cfg.get_int("inversion.band", s.band);
    s.l_max = cfg.get_int("inversion.l_max", s.l_max);
    s.max_iterations = cfg.get_int("inversion.max_iterations", s.max_iterations);
    s.tolerance = cfg.get_double("inversion.tolerance", s.tolerance);
    s.rays = cfg.get_int("inversion.rays", s.rays);
    s.max_q = cfg.get_int("inversion.max_q", s.max_q);
    s.phase_count = cfg.get_int("inversion.phases", s.phase_count);
    s.probe_modes = cfg.get_int("inversion.probe_modes", s.probe_modes);
    s.probe_slopes = cfg.get_int("inversion.probe_slopes", s.probe_slopes);

    s.rel_l2_threshold = cfg.get_double("output.rel_l2_threshold", s.rel_l2_threshold);
    s.max_residual_threshold =
        cfg.get_double("output.max_residual_threshold", s.max_residual_threshold);
    s.max_abs_threshold = cfg.get_double("output.max_abs_threshold", s.max_abs_threshold);

    cfg.reject_unknown();

    // Method/geometry compatibility.
    const auto need = [&](bool ok, const std::string& why) {
        if (!ok) raise(ErrorCode::ConfigError, origin + ": " + why);
    };
    if (s.method == "fbp" || s.method == "cgls") need(s.geometry == "cone", s.method + " needs a cone geometry");
    if (s.method == "fbp") {
        const double m_real = kPi / s.alpha();
        need(std::abs(m_real - std::lround(m_real)) < 1e-9,
             "fbp needs an integer-m cone (alpha = pi/m)");
    }
    if (s.method == "torus-fourier") need(s.geometry == "cube", "torus-fourier needs the cube geometry");
    if (s.method == "funk") need(s.geometry == "octant", "funk needs the octant geometry");
    if (s.method == "null-check")
        need(s.geometry == "tube" || s.geometry == "disk", "null-check needs tube or disk geometry");
    if (s.method == "att-probe") need(s.geometry == "cylinder", "att-probe needs the cylinder geometry");
    if (s.geometry == "cube") need(s.cube_n == 2 || s.cube_n == 3, "cube dimension must be 2 or 3");

    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::ConfigError, "cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

}  // namespace brt
