#include "rgs/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rgs {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Scalar parse_scalar(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        Scalar x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    Scalar x = parse_scalar(key, v);
    int i = (int)x;
    if ((Scalar)i != x) throw ConfigError("expected integer for " + key + ": '" + v + "'");
    return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("expected boolean for " + key + ": '" + v + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& v) {
    Vec3 out;
    std::stringstream ss(v);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) throw ConfigError("expected 3 comma-separated values for " + key);
        out[i++] = parse_scalar(key, trim(part));
    }
    if (i != 3) throw ConfigError("expected 3 comma-separated values for " + key);
    return out;
}

}  // namespace

TrainConfig parse_config_text(const std::string& text) {
    TrainConfig cfg;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"lr_position", [&](auto& k, auto& v) { cfg.lr_position = parse_scalar(k, v); }},
        {"lr_position_final", [&](auto& k, auto& v) { cfg.lr_position_final = parse_scalar(k, v); }},
        {"lr_scales", [&](auto& k, auto& v) { cfg.lr_scales = parse_scalar(k, v); }},
        {"lr_rotor", [&](auto& k, auto& v) { cfg.lr_rotor = parse_scalar(k, v); }},
        {"lr_sh_dc", [&](auto& k, auto& v) { cfg.lr_sh_dc = parse_scalar(k, v); }},
        {"lr_sh_rest", [&](auto& k, auto& v) { cfg.lr_sh_rest = parse_scalar(k, v); }},
        {"lr_opacity", [&](auto& k, auto& v) { cfg.lr_opacity = parse_scalar(k, v); }},
        {"total_steps", [&](auto& k, auto& v) { cfg.total_steps = parse_int(k, v); }},
        {"batch", [&](auto& k, auto& v) { cfg.batch = parse_int(k, v); }},
        {"densify_grad_threshold",
         [&](auto& k, auto& v) { cfg.densify_grad_threshold = parse_scalar(k, v); }},
        {"densify_from", [&](auto& k, auto& v) { cfg.densify_from = parse_int(k, v); }},
        {"densify_until", [&](auto& k, auto& v) { cfg.densify_until = parse_int(k, v); }},
        {"densify_interval", [&](auto& k, auto& v) { cfg.densify_interval = parse_int(k, v); }},
        {"opacity_reset_interval",
         [&](auto& k, auto& v) { cfg.opacity_reset_interval = parse_int(k, v); }},
        {"prune_opacity", [&](auto& k, auto& v) { cfg.prune_opacity = parse_scalar(k, v); }},
        {"percent_dense", [&](auto& k, auto& v) { cfg.percent_dense = parse_scalar(k, v); }},
        {"split_factor", [&](auto& k, auto& v) { cfg.split_factor = parse_scalar(k, v); }},
        {"reset_opacity_value",
         [&](auto& k, auto& v) { cfg.reset_opacity_value = parse_scalar(k, v); }},
        {"min_gaussians", [&](auto& k, auto& v) { cfg.min_gaussians = parse_int(k, v); }},
        {"max_gaussians", [&](auto& k, auto& v) { cfg.max_gaussians = parse_int(k, v); }},
        {"lambda_ssim", [&](auto& k, auto& v) { cfg.loss.lambda_ssim = parse_scalar(k, v); }},
        {"lambda_entropy", [&](auto& k, auto& v) { cfg.loss.lambda_entropy = parse_scalar(k, v); }},
        {"lambda_consistency",
         [&](auto& k, auto& v) { cfg.loss.lambda_consistency = parse_scalar(k, v); }},
        {"k_neighbors", [&](auto& k, auto& v) { cfg.loss.k_neighbors = parse_int(k, v); }},
        {"background", [&](auto& k, auto& v) { cfg.background = parse_vec3(k, v); }},
        {"static_mode", [&](auto& k, auto& v) { cfg.static_mode = parse_bool(k, v); }},
        {"init_count", [&](auto& k, auto& v) { cfg.init_count = parse_int(k, v); }},
        {"box_min", [&](auto& k, auto& v) { cfg.box_min = parse_vec3(k, v); }},
        {"box_max", [&](auto& k, auto& v) { cfg.box_max = parse_vec3(k, v); }},
        {"init_time_scale", [&](auto& k, auto& v) { cfg.init_time_scale = parse_scalar(k, v); }},
        {"init_opacity", [&](auto& k, auto& v) { cfg.init_opacity = parse_scalar(k, v); }},
        {"knn_rebuild_interval",
         [&](auto& k, auto& v) { cfg.knn_rebuild_interval = parse_int(k, v); }},
        {"sh_unlock_interval", [&](auto& k, auto& v) { cfg.sh_unlock_interval = parse_int(k, v); }},
        {"log_interval", [&](auto& k, auto& v) { cfg.log_interval = parse_int(k, v); }},
        {"threads", [&](auto& k, auto& v) { cfg.threads = parse_int(k, v); }},
        {"seed", [&](auto& k, auto& v) { cfg.seed = (unsigned)parse_int(k, v); }},
    };

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("unknown key '" + key + "' on line " + std::to_string(lineno));
        it->second(key, value);
    }
    cfg.validate();
    return cfg;
}

TrainConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace rgs
