#include "qrpf/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "qrpf/io.hpp"

namespace qrpf {

namespace {

using nlohmann::json;

double get_num(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError("config field '" + key + "' must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError("config field '" + key + "' must be an integer");
    return j[key].get<int>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) throw ConfigError("config field '" + key + "' must be a boolean");
    return j[key].get<bool>();
}

Vec2 get_vec2(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("expected a 2-vector [x, y]");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

Mat2 get_mat2(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("expected a 2x2 matrix [[..],[..]]");
    Mat2 m;
    for (int r = 0; r < 2; ++r) {
        if (!j[r].is_array() || j[r].size() != 2)
            throw ConfigError("expected a 2x2 matrix [[..],[..]]");
        for (int c = 0; c < 2; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

ScenarioKind parse_scenario(const std::string& name) {
    if (name == "frozen-crack") return ScenarioKind::FrozenCrack;
    if (name == "cyclic-shear") return ScenarioKind::CyclicShear;
    if (name == "cavity") return ScenarioKind::Cavity;
    if (name == "landscape") return ScenarioKind::Landscape;
    if (name == "splitting-demo") return ScenarioKind::SplittingDemo;
    throw ConfigError("unknown scenario '" + name + "'");
}

void parse_material(const json& j, ScenarioConfig& cfg) {
    std::string family = j.value("family", std::string("neo-hookean-2d"));
    double mu = get_num(j, "mu", 1.0);
    double lambda = get_num(j, "lambda", 0.0);
    double g_c = get_num(j, "g_c", 1.0);
    double size = get_num(j, "specimen_size", 1.0);
    if (!(mu > 0.0)) throw ConfigError("material.mu must be positive");
    if (!(size > 0.0)) throw ConfigError("material.specimen_size must be positive");
    cfg.mu_physical = mu;
    // nondimensionalize: stresses by mu, lengths by the specimen size
    if (family == "neo-hookean-2d") {
        cfg.material = MaterialModel::neo_hookean_2d(1.0, lambda / mu, g_c / (mu * size));
    } else if (family == "pq-2d") {
        double p = get_num(j, "p", 2.0);
        double lambda_bar = get_num(j, "lambda_bar", 1.0);
        cfg.material = MaterialModel::pq_2d(1.0, lambda_bar / mu, p, g_c / (mu * size));
    } else {
        throw ConfigError("material.family must be neo-hookean-2d or pq-2d for scenarios");
    }
}

void parse_mesh(const json& j, ScenarioConfig& cfg) {
    if (j.contains("path")) {
        cfg.mesh.kind = MeshSpec::Kind::File;
        cfg.mesh.path = j["path"].get<std::string>();
        if (!std::filesystem::exists(cfg.mesh.path))
            throw ConfigError("mesh file does not exist: " + cfg.mesh.path);
    } else if (j.contains("square")) {
        cfg.mesh.kind = MeshSpec::Kind::Square;
        cfg.mesh.square_n = get_int(j["square"], "n", 50);
    } else if (j.contains("square_with_hole")) {
        cfg.mesh.kind = MeshSpec::Kind::Hole;
        const auto& h = j["square_with_hole"];
        cfg.mesh.hole_n_rho = get_int(h, "n_rho", 22);
        cfg.mesh.hole_n_phi = get_int(h, "n_phi", 96);
        cfg.mesh.hole_radius = get_num(h, "radius", 0.2);
    } else {
        throw ConfigError("mesh must specify 'path', 'square', or 'square_with_hole'");
    }
}

void parse_params(const json& j, PhaseFieldParams& p) {
    p.epsilon = get_num(j, "epsilon", p.epsilon);
    p.eta = get_num(j, "eta", p.eta);
    p.d_c = get_num(j, "d_c", p.d_c);
    p.stagger_tol = get_num(j, "stagger_tol", p.stagger_tol);
    p.max_stagger = get_int(j, "max_stagger", p.max_stagger);
    p.disp_tol = get_num(j, "disp_tol", p.disp_tol);
    p.damage_tol = get_num(j, "damage_tol", p.damage_tol);
    p.max_disp_iterations = get_int(j, "max_disp_iterations", p.max_disp_iterations);
    p.max_damage_iterations = get_int(j, "max_damage_iterations", p.max_damage_iterations);
}

}  // namespace

void ScenarioConfig::validate() const {
    params.validate();
    if (samples < 8) throw ConfigError("landscape samples must be at least 8");
    if (!(stretch > 1.0)) throw ConfigError("frozen-crack stretch must exceed 1");
    if (!(compression > 0.0) || !(compression < 1.0))
        throw ConfigError("frozen-crack compression must lie in (0, 1)");
    if (!(crack_radius > 0.0)) throw ConfigError("crack radius must be positive");
    if (steps_per_phase < 1) throw ConfigError("steps_per_phase must be at least 1");
    if (tension_steps < 1) throw ConfigError("tension_steps must be at least 1");
    if (!(cavity_compression > 0.0 && cavity_compression < 1.0))
        throw ConfigError("cavity compression must lie in (0, 1)");
    if (!(tension_max > 1.0)) throw ConfigError("cavity tension_max must exceed 1");
    for (std::size_t k = 1; k < load_program.size(); ++k)
        if (load_program[k].first <= load_program[k - 1].first)
            throw ConfigError("load_program steps must be strictly increasing");
    for (const auto& seed : seed_cracks) {
        if (!(seed.width > 0.0)) throw ConfigError("seed crack width must be positive");
        if ((seed.to - seed.from).norm() <= 0.0)
            throw ConfigError("seed crack must have distinct endpoints");
    }
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config parse error: ") + err.what());
    }
    if (!j.contains("scenario")) throw ConfigError("config must name a scenario");

    ScenarioConfig cfg;
    cfg.scenario = parse_scenario(j["scenario"].get<std::string>());
    if (j.contains("material")) parse_material(j["material"], cfg);
    if (j.contains("params")) parse_params(j["params"], cfg.params);
    if (j.contains("mesh")) parse_mesh(j["mesh"], cfg);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.seed = get_int(j, "seed", cfg.seed);

    cfg.mode = j.value("mode", cfg.mode);
    cfg.stretch = get_num(j, "stretch", cfg.stretch);
    cfg.compression = get_num(j, "compression", cfg.compression);
    cfg.shear = get_num(j, "shear", cfg.shear);
    if (j.contains("crack")) {
        const auto& c = j["crack"];
        if (c.contains("center")) cfg.crack_center = get_vec2(c["center"]);
        cfg.crack_radius = get_num(c, "radius", cfg.crack_radius);
        cfg.crack_profile_width = get_num(c, "profile_width", cfg.crack_profile_width);
    }

    if (j.contains("F")) cfg.landscape_f = get_mat2(j["F"]);
    cfg.samples = get_int(j, "samples", cfg.samples);

    cfg.gamma_max = get_num(j, "gamma_max", cfg.gamma_max);
    cfg.steps_per_phase = get_int(j, "steps_per_phase", cfg.steps_per_phase);
    cfg.nonneg_after_reversal = get_bool(j, "nonneg_after_reversal", cfg.nonneg_after_reversal);
    cfg.grip_margin = get_num(j, "grip_margin", cfg.grip_margin);
    cfg.vtk_every = get_int(j, "vtk_every", cfg.vtk_every);
    if (j.contains("seed_cracks")) {
        for (const auto& s : j["seed_cracks"]) {
            SeedCrack seed;
            seed.from = get_vec2(s.at("from"));
            seed.to = get_vec2(s.at("to"));
            if (s.contains("normal")) {
                seed.normal = get_vec2(s["normal"]).normalized();
            } else {
                Vec2 dir = (seed.to - seed.from).normalized();
                seed.normal = Vec2(-dir.y(), dir.x());
            }
            seed.width = get_num(s, "width", seed.width);
            cfg.seed_cracks.push_back(seed);
        }
    }

    cfg.cavity_compression = get_num(j, "cavity_compression", cfg.cavity_compression);
    cfg.tension_max = get_num(j, "tension_max", cfg.tension_max);
    cfg.tension_steps = get_int(j, "tension_steps", cfg.tension_steps);
    cfg.stagger_shrink_threshold =
        get_int(j, "stagger_shrink_threshold", cfg.stagger_shrink_threshold);
    cfg.seed_len_a = get_num(j, "seed_len_a", cfg.seed_len_a);
    cfg.seed_len_b = get_num(j, "seed_len_b", cfg.seed_len_b);
    cfg.seed_width = get_num(j, "seed_width", cfg.seed_width);
    cfg.compression_only = get_bool(j, "compression_only", cfg.compression_only);

    cfg.split_lambda = get_num(j, "lambda", cfg.split_lambda);
    cfg.split_mu = get_num(j, "mu", cfg.split_mu);
    cfg.split_sigma0 = get_num(j, "sigma0", cfg.split_sigma0);
    cfg.split_tau = get_num(j, "tau", cfg.split_tau);

    if (j.contains("load_program")) {
        for (const auto& entry : j["load_program"])
            cfg.load_program.emplace_back(get_int(entry, "step", 0), get_mat2(entry.at("F0")));
    }

    cfg.validate();
    return cfg;
}

Mesh build_mesh(const ScenarioConfig& config) {
    switch (config.mesh.kind) {
        case MeshSpec::Kind::Square:
            return make_square_mesh(config.mesh.square_n, config.mesh.square_n);
        case MeshSpec::Kind::Hole:
            return make_square_with_hole(config.mesh.hole_n_rho, config.mesh.hole_n_phi,
                                         config.mesh.hole_radius);
        case MeshSpec::Kind::File:
            return read_mesh(config.mesh.path);
    }
    throw ConfigError("unhandled mesh kind");
}

}  // namespace qrpf
