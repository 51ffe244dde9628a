#include "qrpf/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "qrpf/io.hpp"

namespace qrpf {

namespace {

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir);
}

void warn_resolution(const Mesh& mesh, const PhaseFieldParams& params) {
    double h = mesh.max_edge_length();
    if (h > 0.5 * params.epsilon)
        std::fprintf(stderr,
                     "warning: element size %.4g exceeds epsilon/2 = %.4g; the damage band is "
                     "under-resolved\n",
                     h, 0.5 * params.epsilon);
}

void require_square_tags(const Mesh& mesh) {
    for (const char* tag : {"left", "right", "bottom", "top"})
        if (!mesh.has_tag(tag))
            throw ConfigError(std::string("mesh lacks the boundary tag '") + tag + "'");
}

std::vector<BoundaryCondition> affine_on_all_sides(const Mat2& f0) {
    std::vector<BoundaryCondition> bcs;
    for (const char* tag : {"left", "right", "bottom", "top"}) {
        BoundaryCondition bc;
        bc.tag = tag;
        bc.kind = BoundaryCondition::Kind::DirichletAffine;
        bc.f0 = f0;
        bcs.push_back(bc);
    }
    return bcs;
}

void set_affine(SimulationState& state, const Mat2& f0) {
    for (int i = 0; i < state.mesh.node_count(); ++i) state.set_y(i, f0 * state.mesh.nodes[i]);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double t = ab.squaredNorm() > 0.0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
    t = std::min(1.0, std::max(0.0, t));
    return (p - (a + t * ab)).norm();
}

void apply_seed_cracks(SimulationState& state, const std::vector<SeedCrack>& seeds) {
    for (const auto& seed : seeds) {
        Vec2 n = seed.normal.normalized();
        for (int i = 0; i < state.mesh.node_count(); ++i) {
            if (point_segment_distance(state.mesh.nodes[i], seed.from, seed.to) <=
                0.5 * seed.width) {
                state.set_d(i, n);
                state.frozen[i] = n;
            }
        }
    }
}

// Elementwise elastic energy density w1 W + w2 Wd (excludes the fracture
// term) together with the quadrature-point damage magnitude.
struct ElasticField {
    std::vector<double> density;
    std::vector<double> band;  // damage magnitude at the element centroid
};

ElasticField elastic_density(const SimulationState& state, const MaterialModel& model,
                             const PhaseFieldParams& params) {
    ElasticField out;
    out.density.resize(state.mesh.triangle_count());
    out.band.resize(state.mesh.triangle_count());
    for (int e = 0; e < state.mesh.triangle_count(); ++e) {
        const auto& tri = state.mesh.triangles[e];
        Mat2 dmat;
        dmat.col(0) = state.mesh.nodes[tri[1]] - state.mesh.nodes[tri[0]];
        dmat.col(1) = state.mesh.nodes[tri[2]] - state.mesh.nodes[tri[0]];
        Mat2 inv_t = dmat.inverse().transpose();
        std::array<Vec2, 3> grad_n{-inv_t.col(0) - inv_t.col(1), inv_t.col(0), inv_t.col(1)};
        Mat2 f = Mat2::Zero();
        Vec2 dbar = Vec2::Zero();
        for (int k = 0; k < 3; ++k) {
            f += state.y_at(tri[k]) * grad_n[k].transpose();
            dbar += state.d_at(tri[k]) / 3.0;
        }
        double m = dbar.norm();
        double w1 = (1.0 - m) * (1.0 - m) + params.eta;
        double w2 = 1.0 - (1.0 - m) * (1.0 - m);
        double psi = w1 * intact_energy(model, f);
        if (m >= 1e-8)
            psi += w2 * effective_eval(model, f, Vec2(dbar / m), false, false).energy;
        out.density[e] = psi;
        out.band[e] = m;
    }
    return out;
}

Eigen::VectorXd nodal_average(const Mesh& mesh, const std::vector<double>& element_values) {
    Eigen::VectorXd nodal = Eigen::VectorXd::Zero(mesh.node_count());
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(mesh.node_count());
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        double a = mesh.signed_area(e);
        for (int k = 0; k < 3; ++k) {
            nodal[mesh.triangles[e][k]] += a * element_values[e];
            weight[mesh.triangles[e][k]] += a;
        }
    }
    for (int i = 0; i < mesh.node_count(); ++i) nodal[i] /= weight[i];
    return nodal;
}

void write_state_vtk(const SimulationState& state, const MaterialModel& model,
                     const PhaseFieldParams& params, const std::string& path) {
    FieldBundle fields;
    fields.mesh = &state.mesh;
    fields.displacement.resize(state.y.size());
    for (int i = 0; i < state.mesh.node_count(); ++i) {
        fields.displacement[2 * i] = state.y[2 * i] - state.mesh.nodes[i].x();
        fields.displacement[2 * i + 1] = state.y[2 * i + 1] - state.mesh.nodes[i].y();
    }
    fields.damage = state.d;
    fields.energy_density = nodal_average(state.mesh, elastic_density(state, model, params).density);
    write_vtk(fields, path);
}

int count_frozen(const SimulationState& state) {
    int n = 0;
    for (const auto& fr : state.frozen)
        if (fr) ++n;
    return n;
}

}  // namespace

FrozenCrackResult run_frozen_crack(const ScenarioConfig& config) {
    config.validate();
    if (config.scenario != ScenarioKind::FrozenCrack)
        throw ConfigError("config does not describe a frozen-crack scenario");
    const std::set<std::string> modes{"a", "b", "c", "d", "e", "d-relaxed"};
    if (!modes.count(config.mode))
        throw ConfigError("frozen-crack mode must be one of a, b, c, d, e, d-relaxed");
    ensure_output_dir(config.output_dir);

    Mesh mesh = build_mesh(config);
    require_square_tags(mesh);
    warn_resolution(mesh, config.params);
    SimulationState state = SimulationState::reference(std::move(mesh));

    // circular damage patch with uniform normal e2; |d| = 1 on the disk and an
    // exponential falloff with the regularization width outside it
    const double width =
        config.crack_profile_width > 0.0 ? config.crack_profile_width : config.params.epsilon;
    for (int i = 0; i < state.mesh.node_count(); ++i) {
        double r = (state.mesh.nodes[i] - config.crack_center).norm();
        double mag = r <= config.crack_radius
                         ? 1.0
                         : std::exp(-(r - config.crack_radius) / width);
        if (mag < 1e-6) mag = 0.0;
        state.set_d(i, mag * Vec2(0, 1));
    }

    Mat2 f0 = Mat2::Identity();
    if (config.mode == "a") {
        f0(1, 1) = config.stretch;
    } else if (config.mode == "b") {
        f0(0, 1) = config.shear;
    } else if (config.mode == "c") {
        f0(0, 0) = config.compression;
    } else if (config.mode == "d") {
        f0(0, 0) = config.stretch;
    } else if (config.mode == "e") {
        f0(1, 1) = config.compression;
    } else {  // d-relaxed: vertical stretch chosen so the vertical stress vanishes
        f0(0, 0) = config.stretch;
        f0(1, 1) = a22_star(config.material, config.stretch);
    }

    set_affine(state, f0);
    auto report = solve_displacement(state, config.material, config.params,
                                     affine_on_all_sides(f0));

    // crack region: fully damaged core (the partially intact skirt of the
    // regularization profile is real material and carries real energy)
    auto field = elastic_density(state, config.material, config.params);
    double crack_sum = 0.0, crack_n = 0.0, intact_sum = 0.0, intact_n = 0.0;
    double total = 0.0;
    for (std::size_t e = 0; e < field.density.size(); ++e) {
        total += field.density[e];
        if (field.band[e] >= 0.98) {
            crack_sum += field.density[e];
            crack_n += 1.0;
        } else if (field.band[e] <= 0.05) {
            intact_sum += field.density[e];
            intact_n += 1.0;
        }
    }
    FrozenCrackResult result;
    result.mode = config.mode;
    result.crack_mean = crack_n > 0 ? crack_sum / crack_n : 0.0;
    result.intact_mean = intact_n > 0 ? intact_sum / intact_n : 0.0;
    result.ratio = result.intact_mean > 0 ? result.crack_mean / result.intact_mean : 0.0;
    double mean = total / static_cast<double>(field.density.size());
    double rms = 0.0, worst = 0.0;
    for (double v : field.density) {
        rms += (v - mean) * (v - mean);
        worst = std::max(worst, std::abs(v - mean));
    }
    rms = std::sqrt(rms / static_cast<double>(field.density.size()));
    result.uniformity_rms = mean > 0 ? rms / mean : 0.0;
    result.uniformity_max = mean > 0 ? worst / mean : 0.0;
    result.solver_iterations = report.iterations;

    write_state_vtk(state, config.material, config.params,
                    config.output_dir + "/frozen_crack_" + config.mode + ".vtk");

    {
        CsvWriter csv(config.output_dir + "/frozen_crack_" + config.mode + "_summary.csv",
                      {"mode", "crack_mean", "intact_mean", "ratio", "uniformity_rms",
                       "uniformity_max", "iterations"});
        csv.row({config.mode, CsvWriter::num(result.crack_mean),
                 CsvWriter::num(result.intact_mean), CsvWriter::num(result.ratio),
                 CsvWriter::num(result.uniformity_rms), CsvWriter::num(result.uniformity_max),
                 std::to_string(result.solver_iterations)});
    }

    // traction sampled along the horizontal line through the crack center:
    // reference traction vector P e2 on the plane with normal e2
    {
        CsvWriter csv(config.output_dir + "/frozen_crack_" + config.mode + "_traction.csv",
                      {"x", "shear", "normal"});
        struct Row {
            double x, shear, normal;
        };
        std::vector<Row> rows;
        double band_half = state.mesh.max_edge_length();
        for (int e = 0; e < state.mesh.triangle_count(); ++e) {
            const auto& tri = state.mesh.triangles[e];
            Vec2 centroid =
                (state.mesh.nodes[tri[0]] + state.mesh.nodes[tri[1]] + state.mesh.nodes[tri[2]]) /
                3.0;
            if (std::abs(centroid.y() - config.crack_center.y()) > 0.5 * band_half) continue;
            Mat2 dmat;
            dmat.col(0) = state.mesh.nodes[tri[1]] - state.mesh.nodes[tri[0]];
            dmat.col(1) = state.mesh.nodes[tri[2]] - state.mesh.nodes[tri[0]];
            Mat2 inv_t = dmat.inverse().transpose();
            std::array<Vec2, 3> grad_n{-inv_t.col(0) - inv_t.col(1), inv_t.col(0), inv_t.col(1)};
            Mat2 f = Mat2::Zero();
            Vec2 dbar = Vec2::Zero();
            for (int k = 0; k < 3; ++k) {
                f += state.y_at(tri[k]) * grad_n[k].transpose();
                dbar += state.d_at(tri[k]) / 3.0;
            }
            double m = dbar.norm();
            double w1 = (1.0 - m) * (1.0 - m) + config.params.eta;
            double w2 = 1.0 - (1.0 - m) * (1.0 - m);
            Mat2 p = w1 * intact_stress(config.material, f);
            if (m >= 1e-8)
                p += w2 * effective_eval(config.material, f, Vec2(dbar / m), true, false).stress;
            Vec2 traction = p * Vec2(0, 1);
            rows.push_back({centroid.x(), traction.x(), traction.y()});
        }
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.x < b.x; });
        for (const auto& r : rows)
            csv.row({CsvWriter::num(r.x), CsvWriter::num(r.shear), CsvWriter::num(r.normal)});
    }
    return result;
}

LandscapeRun run_landscape(const ScenarioConfig& config) {
    config.validate();
    if (config.material.dim != 2) throw ConfigError("landscape requires a 2D material");
    ensure_output_dir(config.output_dir);
    LandscapeRun run;
    run.samples = landscape_theta(config.material, config.landscape_f, config.samples);
    // normalize by the shear modulus (mu = 1 after nondimensionalization,
    // kept explicit for materials constructed programmatically)
    double mu = config.material.family == EnergyFamily::NeoHookean2D ? config.material.mu
                                                                     : config.material.mu1;
    for (auto& s : run.samples) s.wd /= mu;
    run.minima = landscape_local_minima(run.samples);

    CsvWriter csv(config.output_dir + "/landscape.csv", {"theta", "wd_over_mu"});
    for (const auto& s : run.samples) csv.row({CsvWriter::num(s.theta), CsvWriter::num(s.wd)});
    CsvWriter minima(config.output_dir + "/landscape_minima.csv", {"theta", "wd_over_mu"});
    for (int idx : run.minima)
        minima.row({CsvWriter::num(run.samples[idx].theta), CsvWriter::num(run.samples[idx].wd)});
    return run;
}

CyclicShearResult run_cyclic_shear(const ScenarioConfig& config) {
    config.validate();
    if (config.scenario != ScenarioKind::CyclicShear)
        throw ConfigError("config does not describe a cyclic-shear scenario");
    ensure_output_dir(config.output_dir);

    Mesh mesh = build_mesh(config);
    require_square_tags(mesh);
    warn_resolution(mesh, config.params);
    SimulationState state = SimulationState::reference(std::move(mesh));

    std::vector<SeedCrack> seeds = config.seed_cracks;
    if (seeds.empty()) {
        SeedCrack seed;
        seed.from = Vec2(0.0, 0.5);
        seed.to = Vec2(0.35, 0.5);
        seed.normal = Vec2(0, 1);
        seed.width = 1.2 * state.mesh.max_edge_length();
        seeds.push_back(seed);
    }
    apply_seed_cracks(state, seeds);

    std::vector<std::uint8_t> seeded(state.mesh.node_count(), 0);
    Vec2 notch_tip(-1e30, 0.0);
    for (int i = 0; i < state.mesh.node_count(); ++i)
        if (state.frozen[i]) {
            seeded[i] = 1;
            if (state.mesh.nodes[i].x() > notch_tip.x()) notch_tip = state.mesh.nodes[i];
        }

    CyclicShearResult result;
    result.notch_tip = notch_tip;

    std::vector<int> phase1_nodes, phase2_nodes;
    std::vector<std::uint8_t> known = seeded;

    // shear program: ramp right, then down through zero to the opposite
    // amplitude; an explicit load_program (gamma read from F0_12) overrides it
    std::vector<double> gammas;
    int peak_step = config.steps_per_phase;
    if (config.load_program.empty()) {
        for (int step = 1; step <= 3 * config.steps_per_phase; ++step) {
            const int k1 = config.steps_per_phase;
            gammas.push_back(step <= k1
                                 ? config.gamma_max * step / k1
                                 : config.gamma_max * (1.0 - static_cast<double>(step - k1) / k1));
        }
    } else {
        for (const auto& [step, f0] : config.load_program) {
            (void)step;
            gammas.push_back(f0(0, 1));
        }
        peak_step = static_cast<int>(std::max_element(gammas.begin(), gammas.end()) -
                                     gammas.begin()) +
                    1;
    }
    const int total_steps = static_cast<int>(gammas.size());

    double gamma_prev = 0.0;
    for (int step = 1; step <= total_steps; ++step) {
        double gamma = gammas[step - 1];
        bool reversal = step > peak_step;

        Mat2 f0 = Mat2::Identity();
        f0(0, 1) = gamma;
        // warm start: push the whole field forward by the multiplicative
        // increment F0_new F0_prev^{-1}; this keeps det grad y positive, so
        // the previous converged state stays feasible under the new data
        for (int i = 0; i < state.mesh.node_count(); ++i)
            state.y[2 * i] += (gamma - gamma_prev) * state.y[2 * i + 1];
        gamma_prev = gamma;
        std::vector<BoundaryCondition> bcs;
        {
            BoundaryCondition bottom;
            bottom.tag = "bottom";
            bottom.kind = BoundaryCondition::Kind::DirichletZero;
            bcs.push_back(bottom);
            BoundaryCondition top;
            top.tag = "top";
            top.kind = BoundaryCondition::Kind::DirichletAffine;
            top.f0 = f0;
            bcs.push_back(top);
            BoundaryCondition left;
            left.tag = "left";
            left.kind = BoundaryCondition::Kind::TractionFree;
            bcs.push_back(left);
            BoundaryCondition right = left;
            right.tag = "right";
            bcs.push_back(right);
        }

        DamageOptions options;
        if (reversal && config.nonneg_after_reversal)
            options.nonneg.assign(state.mesh.node_count(), 1);
        double margin = config.grip_margin >= 0.0 ? config.grip_margin : 2.0 * config.params.epsilon;
        if (margin > 0.0) {
            options.pinned_zero.assign(state.mesh.node_count(), 0);
            for (int i = 0; i < state.mesh.node_count(); ++i) {
                double yy = state.mesh.nodes[i].y();
                if ((yy < margin || yy > 1.0 - margin) && !state.frozen[i])
                    options.pinned_zero[i] = 1;
            }
        }

        StaggerReport report;
        try {
            report = staggered_step(state, config.material, config.params, bcs, options);
        } catch (const NotConverged& err) {
            throw NotConverged("cyclic-shear step " + std::to_string(step) + ": " + err.what(),
                               err.residual);
        }
        apply_irreversibility(state, config.params);
        state.step = step;

        for (int i = 0; i < state.mesh.node_count(); ++i) {
            if (state.frozen[i] && !known[i]) {
                known[i] = 1;
                (reversal ? phase2_nodes : phase1_nodes).push_back(i);
            }
        }

        CyclicShearStep row;
        row.step = step;
        row.gamma = gamma;
        row.energy = report.energies.empty() ? 0.0 : report.energies.back();
        row.frozen_count = count_frozen(state);
        Vec2 tip = notch_tip;
        for (int i = 0; i < state.mesh.node_count(); ++i)
            if (state.d_at(i).norm() >= 0.9 && state.mesh.nodes[i].x() > tip.x())
                tip = state.mesh.nodes[i];
        row.tip_x = tip.x();
        row.tip_y = tip.y();
        for (int i = 0; i < state.mesh.node_count(); ++i)
            row.max_d = std::max(row.max_d, state.d_at(i).norm());
        result.rows.push_back(row);

        bool milestone = step == peak_step || step == total_steps;
        if ((config.vtk_every > 0 && step % config.vtk_every == 0) || milestone)
            write_state_vtk(state, config.material, config.params,
                            config.output_dir + "/cyclic_shear_step_" + std::to_string(step) +
                                ".vtk");
    }

    result.phase1_new_frozen = static_cast<int>(phase1_nodes.size());
    result.phase2_new_frozen = static_cast<int>(phase2_nodes.size());

    const double h = state.mesh.max_edge_length();
    if (!phase1_nodes.empty()) {
        double max_x = -1e30, mean_y = 0.0;
        for (int i : phase1_nodes) {
            max_x = std::max(max_x, state.mesh.nodes[i].x());
            mean_y += state.mesh.nodes[i].y();
        }
        mean_y /= static_cast<double>(phase1_nodes.size());
        result.kink_toward_bottom_right = max_x > notch_tip.x() + 1.5 * h && mean_y < notch_tip.y();
    }
    if (!phase2_nodes.empty()) {
        double mean_y1 = notch_tip.y();
        if (!phase1_nodes.empty()) {
            mean_y1 = 0.0;
            for (int i : phase1_nodes) mean_y1 += state.mesh.nodes[i].y();
            mean_y1 /= static_cast<double>(phase1_nodes.size());
        }
        double mean_y2 = 0.0;
        for (int i : phase2_nodes) {
            result.branch_distance_to_kink = std::min(
                result.branch_distance_to_kink, (state.mesh.nodes[i] - notch_tip).norm());
            mean_y2 += state.mesh.nodes[i].y();
        }
        mean_y2 /= static_cast<double>(phase2_nodes.size());
        result.branch_not_downward = mean_y2 >= mean_y1 - 1.5 * h;
    }

    // closed-crack signature: deviation of the first-cycle crack elements
    // from the ambient intact level, relative to the global peak
    {
        auto field = elastic_density(state, config.material, config.params);
        std::vector<std::uint8_t> firstcycle(state.mesh.node_count(), 0);
        for (int i = 0; i < state.mesh.node_count(); ++i)
            if (seeded[i]) firstcycle[i] = 1;
        for (int i : phase1_nodes) firstcycle[i] = 1;
        double crack_sum = 0.0, crack_n = 0.0, ambient_sum = 0.0, ambient_n = 0.0, peak = 0.0;
        for (int e = 0; e < state.mesh.triangle_count(); ++e) {
            const auto& tri = state.mesh.triangles[e];
            bool on_crack = firstcycle[tri[0]] || firstcycle[tri[1]] || firstcycle[tri[2]];
            peak = std::max(peak, field.density[e]);
            if (on_crack) {
                crack_sum += field.density[e];
                crack_n += 1.0;
            } else if (field.band[e] < 0.05) {
                ambient_sum += field.density[e];
                ambient_n += 1.0;
            }
        }
        double crack_mean = crack_n > 0 ? crack_sum / crack_n : 0.0;
        double ambient = ambient_n > 0 ? ambient_sum / ambient_n : 0.0;
        result.closed_signature_ratio = peak > 0 ? std::abs(crack_mean - ambient) / peak : 0.0;
    }

    save_checkpoint(state, config.output_dir + "/cyclic_shear_final.ckpt");
    CsvWriter csv(config.output_dir + "/cyclic_shear_summary.csv",
                  {"step", "gamma", "energy", "max_d", "tip_x", "tip_y", "frozen_count"});
    for (const auto& row : result.rows)
        csv.row({std::to_string(row.step), CsvWriter::num(row.gamma), CsvWriter::num(row.energy),
                 CsvWriter::num(row.max_d), CsvWriter::num(row.tip_x), CsvWriter::num(row.tip_y),
                 std::to_string(row.frozen_count)});
    return result;
}

CavityResult run_cavity(const ScenarioConfig& config) {
    config.validate();
    if (config.scenario != ScenarioKind::Cavity)
        throw ConfigError("config does not describe a cavity scenario");
    ensure_output_dir(config.output_dir);

    ScenarioConfig cfg = config;
    if (cfg.mesh.kind == MeshSpec::Kind::Square) cfg.mesh.kind = MeshSpec::Kind::Hole;
    Mesh mesh = build_mesh(cfg);
    if (!mesh.has_tag("outer") || !mesh.has_tag("cavity"))
        throw ConfigError("cavity scenario requires 'outer' and 'cavity' boundary tags");
    warn_resolution(mesh, config.params);
    SimulationState state = SimulationState::reference(std::move(mesh));

    const Vec2 center(0.5, 0.5);
    const double radius = cfg.mesh.hole_radius;
    const double h = state.mesh.max_edge_length();
    // default seed width follows the element spacing at the cavity rim, where
    // the seeds live (the outer corner cells are much larger)
    const double rim_h = 2.0 * M_PI * radius / cfg.mesh.hole_n_phi;
    const double seed_width =
        config.seed_width > 0.0
            ? config.seed_width
            : (cfg.mesh.kind == MeshSpec::Kind::Hole ? 1.6 * rim_h : 1.2 * h);

    // 8 radial seeds; alternating lengths break the 8-fold symmetry so that a
    // strict subset grows under tension
    std::vector<SeedCrack> seeds;
    std::vector<Vec2> seed_dirs;
    for (int k = 0; k < 8; ++k) {
        double phi = 2.0 * M_PI * k / 8.0;
        Vec2 dir(std::cos(phi), std::sin(phi));
        double len = (k % 2 == 0) ? config.seed_len_a : config.seed_len_b;
        SeedCrack seed;
        seed.from = center + radius * dir;
        seed.to = center + (radius + len) * dir;
        seed.normal = Vec2(-dir.y(), dir.x());
        seed.width = seed_width;
        seeds.push_back(seed);
        seed_dirs.push_back(dir);
    }
    apply_seed_cracks(state, seeds);
    const int seeded_count = count_frozen(state);

    auto bcs_for = [&](double alpha) {
        std::vector<BoundaryCondition> bcs;
        BoundaryCondition outer;
        outer.tag = "outer";
        outer.kind = BoundaryCondition::Kind::DirichletAffine;
        outer.f0 = alpha * Mat2::Identity();
        bcs.push_back(outer);
        BoundaryCondition cavity;
        cavity.tag = "cavity";
        cavity.kind = BoundaryCondition::Kind::TractionFree;
        bcs.push_back(cavity);
        return bcs;
    };

    int step_index = 0;
    double alpha_prev = 1.0;
    auto run_step = [&](double alpha) {
        // multiplicative warm start keeps the previous state feasible
        state.y *= alpha / alpha_prev;
        alpha_prev = alpha;
        StaggerReport report;
        try {
            report = staggered_step(state, config.material, config.params, bcs_for(alpha));
        } catch (const NotConverged& err) {
            throw NotConverged("cavity step " + std::to_string(step_index) + " (alpha " +
                                   std::to_string(alpha) + "): " + err.what(),
                               err.residual);
        }
        apply_irreversibility(state, config.params);
        state.step = ++step_index;
        return report;
    };

    CavityResult result;
    Eigen::VectorXd baseline;
    if (!config.load_program.empty()) {
        // explicit schedule: alpha read from F0_11; the baseline field is
        // captured at the end of the first (compressive) descending run
        std::size_t k = 0;
        double last = 1.0;
        for (; k < config.load_program.size(); ++k) {
            double alpha = config.load_program[k].second(0, 0);
            if (alpha > last) break;
            run_step(alpha);
            last = alpha;
        }
        baseline = nodal_average(
            state.mesh, elastic_density(state, config.material, config.params).density);
        write_state_vtk(state, config.material, config.params,
                        config.output_dir + "/cavity_compression1.vtk");
        for (; k < config.load_program.size(); ++k)
            run_step(config.load_program[k].second(0, 0));
        write_state_vtk(state, config.material, config.params,
                        config.output_dir + "/cavity_final.vtk");
    } else {
        const int c_steps = 3;
        // first compression: the intact baseline
        for (int k = 1; k <= c_steps; ++k)
            run_step(1.0 + (config.cavity_compression - 1.0) * k / c_steps);
        baseline = nodal_average(
            state.mesh, elastic_density(state, config.material, config.params).density);
        write_state_vtk(state, config.material, config.params,
                        config.output_dir + "/cavity_compression1.vtk");

        if (!config.compression_only) {
            // unload, then tension with adaptive increments
            for (int k = 1; k <= c_steps; ++k)
                run_step(config.cavity_compression +
                         (1.0 - config.cavity_compression) * k / c_steps);
            double alpha = 1.0;
            double dalpha = (config.tension_max - 1.0) / config.tension_steps;
            const double dalpha_min = dalpha / 64.0;
            while (alpha < config.tension_max - 1e-12) {
                alpha = std::min(alpha + dalpha, config.tension_max);
                auto report = run_step(alpha);
                if (report.sweeps > config.stagger_shrink_threshold && dalpha > dalpha_min)
                    dalpha *= 0.5;
            }
            write_state_vtk(state, config.material, config.params,
                            config.output_dir + "/cavity_tension.vtk");

            // second compression over the same schedule
            int down_steps = std::max(config.tension_steps / 2, 2) + c_steps;
            for (int k = 1; k <= down_steps; ++k)
                run_step(config.tension_max +
                         (config.cavity_compression - config.tension_max) * k / down_steps);
            write_state_vtk(state, config.material, config.params,
                            config.output_dir + "/cavity_compression2.vtk");
        }
    }

    Eigen::VectorXd final_field =
        nodal_average(state.mesh, elastic_density(state, config.material, config.params).density);
    result.closure_l2_error = (final_field - baseline).norm() / baseline.norm();
    result.new_frozen_total = count_frozen(state) - seeded_count;

    // per-seed radial extension of the damaged zone within a 45-degree sector
    result.seed_extension.assign(8, 0.0);
    for (int i = 0; i < state.mesh.node_count(); ++i) {
        if (state.d_at(i).norm() < 0.9) continue;
        Vec2 rel = state.mesh.nodes[i] - center;
        double r = rel.norm();
        if (r <= radius) continue;
        for (int k = 0; k < 8; ++k) {
            double cosang = rel.normalized().dot(seed_dirs[k]);
            if (cosang >= std::cos(M_PI / 8.0))
                result.seed_extension[k] = std::max(result.seed_extension[k], r - radius);
        }
    }
    // a seed grew if the damaged zone reaches beyond the seeded band (its
    // half-width plus the frozen halo) by a clear margin of rim spacing
    const double dr_rim = (0.5 - radius) / cfg.mesh.hole_n_rho;
    for (int k = 0; k < 8; ++k) {
        double seeded_len = (k % 2 == 0) ? config.seed_len_a : config.seed_len_b;
        if (result.seed_extension[k] > seeded_len + 0.5 * seed_width + 2.5 * dr_rim)
            result.grown.push_back(k);
    }

    save_checkpoint(state, config.output_dir + "/cavity_final.ckpt");
    CsvWriter csv(config.output_dir + "/cavity_summary.csv",
                  {"seed", "direction_x", "direction_y", "seed_length", "extension", "grew"});
    for (int k = 0; k < 8; ++k) {
        double seeded_len = (k % 2 == 0) ? config.seed_len_a : config.seed_len_b;
        bool grew = std::find(result.grown.begin(), result.grown.end(), k) != result.grown.end();
        csv.row({std::to_string(k), CsvWriter::num(seed_dirs[k].x()),
                 CsvWriter::num(seed_dirs[k].y()), CsvWriter::num(seeded_len),
                 CsvWriter::num(result.seed_extension[k]), grew ? "1" : "0"});
    }
    CsvWriter closure(config.output_dir + "/cavity_closure.csv",
                      {"closure_l2_error", "new_frozen_nodes"});
    closure.row({CsvWriter::num(result.closure_l2_error),
                 std::to_string(result.new_frozen_total)});
    return result;
}

SplittingReport run_splitting_demo(const ScenarioConfig& config) {
    config.validate();
    ensure_output_dir(config.output_dir);
    auto report = splitting_report(config.split_lambda, config.split_mu, config.split_sigma0,
                                   config.split_tau);
    CsvWriter csv(config.output_dir + "/splitting_report.csv",
                  {"scenario", "quantity", "s11", "s22", "s33", "s12", "note"});
    for (const auto& sc : report.cases) {
        auto emit = [&](const std::string& name, const Mat3& s, const std::string& note) {
            csv.row({sc.scenario, name, CsvWriter::num(s(0, 0)), CsvWriter::num(s(1, 1)),
                     CsvWriter::num(s(2, 2)), CsvWriter::num(s(0, 1)), note});
        };
        emit("strain", sc.strain, "");
        emit("intact_stress", sc.intact_stress, "");
        emit("miehe_split", sc.miehe, sc.note);
        emit("amor_split", sc.amor, sc.note);
        csv.row({sc.scenario, "qr_traction", CsvWriter::num(sc.qr_normal_traction),
                 CsvWriter::num(sc.qr_shear_traction), "0", "0",
                 "normal and shear components on the crack plane"});
    }
    return report;
}

}  // namespace qrpf
