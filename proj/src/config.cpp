#include "lscope/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lscope/dressed.hpp"
#include "lscope/errors.hpp"
#include "lscope/parallel.hpp"

namespace lscope {

namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::set<std::string>& allowed,
                        const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            std::ostringstream err;
            err << "unknown key \"" << it.key() << "\" in " << where;
            throw ConfigError(err.str());
        }
    }
}

double num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    if (!obj.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
    return obj.at(key).get<double>();
}

std::optional<double> opt_num(const json& obj, const char* key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    if (!obj.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
    return obj.at(key).get<double>();
}

std::vector<double> num_list(const json& obj, const char* key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return {};
    if (!obj.at(key).is_array() || obj.at(key).empty())
        throw ConfigError(std::string(key) + " must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& v : obj.at(key)) {
        if (!v.is_number()) throw ConfigError(std::string(key) + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

BareParams parse_device(const json& dev) {
    require_known_keys(dev,
                       {"omega_bar_a", "omega_bar_b", "omega_bar_q", "g_a", "g_b", "kappa_a",
                        "kappa_b", "gamma", "n_a_max", "n_b_max"},
                       "device");
    BareParams p;
    p.omega_bar_a = num(dev, "omega_bar_a", p.omega_bar_a);
    p.omega_bar_b = num(dev, "omega_bar_b", p.omega_bar_b);
    p.omega_bar_q = num(dev, "omega_bar_q", p.omega_bar_q);
    p.g_a = num(dev, "g_a", p.g_a);
    p.g_b = num(dev, "g_b", p.g_b);
    p.kappa_a = num(dev, "kappa_a", p.kappa_a);
    p.kappa_b = num(dev, "kappa_b", p.kappa_b);
    p.gamma = num(dev, "gamma", p.gamma);
    p.n_a_max = static_cast<int>(num(dev, "n_a_max", p.n_a_max));
    p.n_b_max = static_cast<int>(num(dev, "n_b_max", p.n_b_max));
    p.validate();
    return p;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    require_known_keys(root,
                       {"device", "device_file", "drive", "probe", "signal", "grids",
                        "integrator", "output_dir", "workers"},
                       "config root");

    RunConfig cfg;
    if (root.contains("device") && root.contains("device_file"))
        throw ConfigError("specify either device or device_file, not both");
    if (root.contains("device_file")) {
        std::ifstream in(root.at("device_file").get<std::string>());
        if (!in) throw ConfigError("cannot open device_file");
        json dev = json::parse(in, nullptr, true);
        cfg.device = parse_device(dev);
    } else if (root.contains("device")) {
        cfg.device = parse_device(root.at("device"));
    } else {
        cfg.device.validate();
    }

    if (root.contains("drive")) {
        const auto& d = root.at("drive");
        require_known_keys(d, {"omega_d", "Omega_d"}, "drive");
        cfg.omega_d = num(d, "omega_d", cfg.omega_d);
        cfg.Omega_d_MHz = opt_num(d, "Omega_d");
    }
    if (root.contains("probe")) {
        const auto& p = root.at("probe");
        require_known_keys(p, {"n_b_mean", "omega_p"}, "probe");
        cfg.n_b_mean = num(p, "n_b_mean", cfg.n_b_mean);
        if (cfg.n_b_mean < 0.0) throw ConfigError("n_b_mean must be >= 0");
        cfg.omega_p_GHz = opt_num(p, "omega_p");
    }
    if (root.contains("signal")) {
        const auto& s = root.at("signal");
        require_known_keys(s, {"omega_s", "pulse_length"}, "signal");
        cfg.omega_s = num(s, "omega_s", cfg.omega_s);
        cfg.pulse_length = num(s, "pulse_length", cfg.pulse_length);
        if (cfg.pulse_length <= 0.0) throw ConfigError("pulse_length must be > 0");
    }
    if (root.contains("grids")) {
        const auto& g = root.at("grids");
        require_known_keys(g,
                           {"Omega_d_MHz", "omega_s_GHz", "pulse_length_ns", "Delta_t_ns",
                            "n_b_mean", "omega_d_GHz", "Gamma_inv_us"},
                           "grids");
        cfg.grids.Omega_d_MHz = num_list(g, "Omega_d_MHz");
        cfg.grids.omega_s_GHz = num_list(g, "omega_s_GHz");
        cfg.grids.pulse_length_ns = num_list(g, "pulse_length_ns");
        cfg.grids.Delta_t_ns = num_list(g, "Delta_t_ns");
        cfg.grids.n_b_mean = num_list(g, "n_b_mean");
        cfg.grids.omega_d_GHz = num_list(g, "omega_d_GHz");
        cfg.grids.Gamma_inv_us = num_list(g, "Gamma_inv_us");
    }
    if (root.contains("integrator")) {
        const auto& i = root.at("integrator");
        require_known_keys(i, {"dt_ns", "n_a_max", "n_b_max"}, "integrator");
        cfg.dt = num(i, "dt_ns", cfg.dt);
        if (cfg.dt <= 0.0) throw ConfigError("dt_ns must be > 0");
        if (i.contains("n_a_max") && !i.at("n_a_max").is_null())
            cfg.device.n_a_max = i.at("n_a_max").get<int>();
        if (i.contains("n_b_max") && !i.at("n_b_max").is_null())
            cfg.device.n_b_max = i.at("n_b_max").get<int>();
        cfg.device.validate();
    }
    if (root.contains("output_dir")) cfg.output_dir = root.at("output_dir").get<std::string>();
    if (root.contains("workers")) {
        cfg.workers = root.at("workers").get<int>();
        if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
    }
    return cfg;
}

DriveSpec RunConfig::drive(const DispersiveParams& dp) const {
    DriveSpec d;
    d.omega_d = omega_d;
    d.Omega_d = Omega_d_MHz ? *Omega_d_MHz : find_impedance_match(dp, omega_d);
    return d;
}

ProbeSpec RunConfig::probe(const DispersiveParams& dp) const {
    ProbeSpec p = make_probe(dp, n_b_mean);
    if (omega_p_GHz) p.omega_p = *omega_p_GHz;
    return p;
}

int RunConfig::effective_workers() const {
    return workers > 0 ? workers : default_workers();
}

}  // namespace lscope
