#include "qrpf/fem.hpp"

#include <cmath>
#include <limits>

#include "qrpf/optim.hpp"

namespace qrpf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDamageGuard = 1e-8;  // below this |d| the normal is unreliable

struct Workspace {
    std::vector<std::array<Vec2, 3>> grad_n;
    std::vector<double> area;
    double total_area = 0.0;

    explicit Workspace(const Mesh& mesh) {
        grad_n.resize(mesh.triangles.size());
        area.resize(mesh.triangles.size());
        for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
            const auto& t = mesh.triangles[e];
            Mat2 dmat;
            dmat.col(0) = mesh.nodes[t[1]] - mesh.nodes[t[0]];
            dmat.col(1) = mesh.nodes[t[2]] - mesh.nodes[t[0]];
            area[e] = 0.5 * dmat.determinant();
            Mat2 inv_t = dmat.inverse().transpose();
            grad_n[e][1] = inv_t.col(0);
            grad_n[e][2] = inv_t.col(1);
            grad_n[e][0] = -grad_n[e][1] - grad_n[e][2];
            total_area += area[e];
        }
    }
};

// shear-modulus scale; all solver tolerances are relative to mu * area
double modulus_scale(const MaterialModel& model) {
    switch (model.family) {
        case EnergyFamily::NeoHookean2D:
            return model.mu;
        case EnergyFamily::MooneyRivlin3D:
        case EnergyFamily::PQEnergy3D:
            return model.mu1 + model.mu2;
        case EnergyFamily::PQEnergy2D:
            return model.mu1;
        case EnergyFamily::UserSupplied:
            return 1.0;
    }
    return 1.0;
}

struct AssembleResult {
    double energy = 0.0;
    int inverted_element = -1;
};

// One-point quadrature over all elements. Gradients are scattered into the
// full-size vectors when requested; an inverted element aborts with energy inf.
AssembleResult assemble(const Workspace& ws, const Mesh& mesh, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& d, const MaterialModel& model,
                        const PhaseFieldParams& params, Eigen::VectorXd* gy, Eigen::VectorXd* gd) {
    AssembleResult out;
    if (gy) gy->setZero(y.size());
    if (gd) gd->setZero(d.size());
    const double gc = model.g_c;
    const double eps = params.epsilon;

    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto& tri = mesh.triangles[e];
        const double area = ws.area[e];

        Mat2 f = Mat2::Zero();
        Mat2 gd_mat = Mat2::Zero();
        Vec2 dbar = Vec2::Zero();
        for (int k = 0; k < 3; ++k) {
            Vec2 yk(y[2 * tri[k]], y[2 * tri[k] + 1]);
            Vec2 dk(d[2 * tri[k]], d[2 * tri[k] + 1]);
            f += yk * ws.grad_n[e][k].transpose();
            gd_mat += dk * ws.grad_n[e][k].transpose();
            dbar += dk / 3.0;
        }
        double det = f.determinant();
        if (!(det > 0.0)) {
            out.energy = kInf;
            out.inverted_element = static_cast<int>(e);
            return out;
        }

        const double m = dbar.norm();
        const double w1 = (1.0 - m) * (1.0 - m) + params.eta;
        const double w2 = 1.0 - (1.0 - m) * (1.0 - m);
        const double w = intact_energy(model, f);

        double wd = 0.0;
        double dwd_dtheta = 0.0;
        Mat2 p_total = Mat2::Zero();
        Vec2 n_hat = Vec2::Zero();
        bool damaged = m >= kDamageGuard;
        if (damaged) {
            n_hat = dbar / m;
            auto eval = effective_eval(model, f, n_hat, gy != nullptr, gd != nullptr);
            wd = eval.energy;
            dwd_dtheta = eval.denergy_dtheta;
            if (gy) p_total = w1 * intact_stress(model, f) + w2 * eval.stress;
        } else if (gy) {
            p_total = w1 * intact_stress(model, f);
        }

        out.energy += area * (w1 * w + w2 * wd) +
                      gc * area * (0.5 * m * m / eps + 0.5 * eps * gd_mat.squaredNorm());

        if (gy) {
            for (int k = 0; k < 3; ++k) {
                Vec2 contrib = area * (p_total * ws.grad_n[e][k]);
                (*gy)[2 * tri[k]] += contrib.x();
                (*gy)[2 * tri[k] + 1] += contrib.y();
            }
        }
        if (gd) {
            Vec2 d_hat = m > 0.0 ? Vec2(dbar / m) : Vec2::Zero();
            double radial = -2.0 * (1.0 - m) * w + 2.0 * (1.0 - m) * wd + gc * m / eps;
            Vec2 centroid_grad = radial * d_hat;
            if (damaged) {
                Vec2 n_perp(-n_hat.y(), n_hat.x());
                centroid_grad += w2 * dwd_dtheta / m * n_perp;
            }
            for (int k = 0; k < 3; ++k) {
                Vec2 contrib = area * (centroid_grad / 3.0 + gc * eps * (gd_mat * ws.grad_n[e][k]));
                (*gd)[2 * tri[k]] += contrib.x();
                (*gd)[2 * tri[k] + 1] += contrib.y();
            }
        }
    }
    return out;
}

struct DirichletTable {
    std::vector<std::uint8_t> fixed;  // per dof
    std::vector<double> value;
};

DirichletTable make_dirichlet(const Mesh& mesh, const std::vector<BoundaryCondition>& bcs) {
    DirichletTable table;
    table.fixed.assign(2 * mesh.nodes.size(), 0);
    table.value.assign(2 * mesh.nodes.size(), 0.0);
    for (const auto& bc : bcs) {
        if (!mesh.has_tag(bc.tag)) throw MeshError("boundary condition tag not in mesh: " + bc.tag);
        if (bc.kind == BoundaryCondition::Kind::TractionFree) continue;
        Mat2 f0 = bc.kind == BoundaryCondition::Kind::DirichletZero ? Mat2::Identity() : bc.f0;
        for (const auto& [edge, tag] : mesh.boundary_tags) {
            if (tag != bc.tag) continue;
            for (int node : {edge.first, edge.second}) {
                Vec2 target = f0 * mesh.nodes[node];
                for (int i = 0; i < 2; ++i) {
                    if (!bc.mask[i]) continue;
                    table.fixed[2 * node + i] = 1;
                    table.value[2 * node + i] = target[i];
                }
            }
        }
    }
    return table;
}

}  // namespace

void PhaseFieldParams::validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(eta > 0.0) || !(eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
    if (!(d_c > 0.0) || !(d_c < 1.0)) throw ConfigError("d_c must lie in (0, 1)");
    if (!(stagger_tol > 0.0)) throw ConfigError("stagger_tol must be positive");
    if (max_stagger < 1) throw ConfigError("max_stagger must be at least 1");
}

SimulationState SimulationState::reference(Mesh mesh) {
    SimulationState state;
    state.mesh = std::move(mesh);
    const int n = state.mesh.node_count();
    state.y.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        state.y[2 * i] = state.mesh.nodes[i].x();
        state.y[2 * i + 1] = state.mesh.nodes[i].y();
    }
    state.d = Eigen::VectorXd::Zero(2 * n);
    state.frozen.assign(n, std::nullopt);
    return state;
}

EnergyEval total_energy(const SimulationState& state, const MaterialModel& model,
                        const PhaseFieldParams& params, bool want_grad_y, bool want_grad_d) {
    params.validate();
    Workspace ws(state.mesh);
    EnergyEval eval;
    auto res = assemble(ws, state.mesh, state.y, state.d, model, params,
                        want_grad_y ? &eval.grad_y : nullptr, want_grad_d ? &eval.grad_d : nullptr);
    if (res.inverted_element >= 0) {
        const auto& tri = state.mesh.triangles[res.inverted_element];
        Mat2 f = Mat2::Zero();
        Workspace tmp(state.mesh);
        for (int k = 0; k < 3; ++k)
            f += state.y_at(tri[k]) * tmp.grad_n[res.inverted_element][k].transpose();
        throw ElementInverted(res.inverted_element, f.determinant());
    }
    eval.energy = res.energy;
    return eval;
}

void apply_dirichlet(SimulationState& state, const std::vector<BoundaryCondition>& bcs) {
    auto table = make_dirichlet(state.mesh, bcs);
    for (std::size_t dof = 0; dof < table.fixed.size(); ++dof)
        if (table.fixed[dof]) state.y[dof] = table.value[dof];
}

SolveReport solve_displacement(SimulationState& state, const MaterialModel& model,
                               const PhaseFieldParams& params,
                               const std::vector<BoundaryCondition>& bcs) {
    params.validate();
    Workspace ws(state.mesh);
    auto table = make_dirichlet(state.mesh, bcs);

    std::vector<int> free_dofs;
    for (std::size_t dof = 0; dof < table.fixed.size(); ++dof) {
        if (table.fixed[dof])
            state.y[dof] = table.value[dof];
        else
            free_dofs.push_back(static_cast<int>(dof));
    }

    Eigen::VectorXd full = state.y;
    Eigen::VectorXd grad_full;
    auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        for (std::size_t i = 0; i < free_dofs.size(); ++i) full[free_dofs[i]] = x[i];
        auto res = assemble(ws, state.mesh, full, state.d, model, params,
                            grad ? &grad_full : nullptr, nullptr);
        if (grad) {
            if (!std::isfinite(res.energy)) {
                grad->setConstant(kInf);
            } else {
                for (std::size_t i = 0; i < free_dofs.size(); ++i)
                    (*grad)[i] = grad_full[free_dofs[i]];
            }
        }
        return res.energy;
    };

    Eigen::VectorXd x0(free_dofs.size());
    for (std::size_t i = 0; i < free_dofs.size(); ++i) x0[i] = state.y[free_dofs[i]];

    optim::BfgsOptions opts;
    opts.memory = 10;
    opts.max_iterations = params.max_disp_iterations;
    opts.gradient_tol = params.disp_tol;
    opts.gradient_scale = std::max(modulus_scale(model) * ws.total_area, 1e-12);

    if (!std::isfinite(objective(x0, nullptr)))
        throw ElementInverted(-1, 0.0);  // boundary data inverts the initial state

    auto res = optim::minimize_bfgs(objective, x0, opts);
    const double tol = opts.gradient_tol * opts.gradient_scale;
    if (res.status == optim::Status::LineSearchStall && res.gradient_norm > 1e4 * tol)
        throw LineSearchFailed("displacement line search stalled at residual " +
                               std::to_string(res.gradient_norm));

    for (std::size_t i = 0; i < free_dofs.size(); ++i) state.y[free_dofs[i]] = res.x[i];
    SolveReport report;
    report.iterations = res.iterations;
    report.residual = res.gradient_norm;
    report.converged = res.gradient_norm <= 1e4 * tol;
    report.energy = res.value;
    return report;
}

SolveReport solve_damage(SimulationState& state, const MaterialModel& model,
                         const PhaseFieldParams& params, const DamageOptions& options) {
    params.validate();
    Workspace ws(state.mesh);
    const int n = state.mesh.node_count();

    std::vector<int> free_nodes;
    for (int i = 0; i < n; ++i) {
        if (state.frozen[i]) continue;
        if (!options.pinned_zero.empty() && options.pinned_zero[i]) continue;
        free_nodes.push_back(i);
    }

    auto project = [&](Eigen::VectorXd& x) {
        for (std::size_t i = 0; i < free_nodes.size(); ++i) {
            int node = free_nodes[i];
            Vec2 v(x[2 * i], x[2 * i + 1]);
            if (!options.nonneg.empty() && options.nonneg[node]) {
                v.x() = std::max(v.x(), 0.0);
                v.y() = std::max(v.y(), 0.0);
            }
            double norm = v.norm();
            if (norm > 1.0) v /= norm;
            x[2 * i] = v.x();
            x[2 * i + 1] = v.y();
        }
    };

    Eigen::VectorXd full = state.d;
    Eigen::VectorXd grad_full;
    auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        for (std::size_t i = 0; i < free_nodes.size(); ++i) {
            full[2 * free_nodes[i]] = x[2 * i];
            full[2 * free_nodes[i] + 1] = x[2 * i + 1];
        }
        auto res = assemble(ws, state.mesh, state.y, full, model, params, nullptr,
                            grad ? &grad_full : nullptr);
        if (grad) {
            if (!std::isfinite(res.energy)) {
                grad->setConstant(kInf);
            } else {
                for (std::size_t i = 0; i < free_nodes.size(); ++i) {
                    (*grad)[2 * i] = grad_full[2 * free_nodes[i]];
                    (*grad)[2 * i + 1] = grad_full[2 * free_nodes[i] + 1];
                }
            }
        }
        return res.energy;
    };

    Eigen::VectorXd x0(2 * free_nodes.size());
    for (std::size_t i = 0; i < free_nodes.size(); ++i) {
        x0[2 * i] = state.d[2 * free_nodes[i]];
        x0[2 * i + 1] = state.d[2 * free_nodes[i] + 1];
    }

    optim::SpgOptions opts;
    opts.max_iterations = params.max_damage_iterations;
    opts.step_tol = params.damage_tol;
    opts.step_scale = std::max(
        {1e-12, model.g_c * ws.total_area / params.epsilon, modulus_scale(model) * ws.total_area});

    auto res = optim::minimize_projected(objective, project, x0, opts);
    for (std::size_t i = 0; i < free_nodes.size(); ++i) {
        state.d[2 * free_nodes[i]] = res.x[2 * i];
        state.d[2 * free_nodes[i] + 1] = res.x[2 * i + 1];
    }
    SolveReport report;
    report.iterations = res.iterations;
    report.residual = res.gradient_norm;
    report.converged = res.status == optim::Status::Converged ||
                       res.gradient_norm <= 1e4 * opts.step_tol * opts.step_scale;
    report.energy = res.value;
    return report;
}

StaggerReport staggered_step(SimulationState& state, const MaterialModel& model,
                             const PhaseFieldParams& params,
                             const std::vector<BoundaryCondition>& bcs,
                             const DamageOptions& options) {
    params.validate();
    StaggerReport report;
    for (int sweep = 1; sweep <= params.max_stagger; ++sweep) {
        Eigen::VectorXd y_old = state.y;
        Eigen::VectorXd d_old = state.d;
        auto rep_y = solve_displacement(state, model, params, bcs);
        report.energies.push_back(rep_y.energy);
        auto rep_d = solve_damage(state, model, params, options);
        report.energies.push_back(rep_d.energy);
        report.sweeps = sweep;

        double delta = 0.0;
        for (int i = 0; i < state.mesh.node_count(); ++i) {
            delta = std::max(delta, (state.y_at(i) - Vec2(y_old[2 * i], y_old[2 * i + 1])).norm());
            delta = std::max(delta, (state.d_at(i) - Vec2(d_old[2 * i], d_old[2 * i + 1])).norm());
        }
        report.last_update = delta;
        if (delta < params.stagger_tol) {
            report.converged = true;
            return report;
        }
    }
    throw NotConverged("staggered iteration exceeded max_stagger = " +
                           std::to_string(params.max_stagger),
                       report.last_update);
}

int apply_irreversibility(SimulationState& state, const PhaseFieldParams& params) {
    params.validate();
    int newly_frozen = 0;
    for (int i = 0; i < state.mesh.node_count(); ++i) {
        if (state.frozen[i]) continue;
        Vec2 di = state.d_at(i);
        double m = di.norm();
        if (m >= params.d_c) {
            Vec2 unit = di / m;
            state.frozen[i] = unit;
            state.set_d(i, unit);
            ++newly_frozen;
        }
    }
    return newly_frozen;
}

}  // namespace qrpf
