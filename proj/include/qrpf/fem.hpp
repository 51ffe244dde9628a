#ifndef QRPF_FEM_HPP
#define QRPF_FEM_HPP

#include <optional>
#include <vector>

#include "qrpf/constitutive.hpp"
#include "qrpf/mesh.hpp"

namespace qrpf {

struct PhaseFieldParams {
    double epsilon = 0.015;     ///< regularization length
    double eta = 1e-6;          ///< residual stiffness in the cracked phase
    double d_c = 0.95;          ///< irreversibility threshold on |d|
    double stagger_tol = 1e-3;  ///< max nodal update between staggered sweeps
    int max_stagger = 200;
    double disp_tol = 1e-8;     ///< gradient tolerance, relative to problem scale
    double damage_tol = 1e-8;
    int max_disp_iterations = 5000;
    int max_damage_iterations = 5000;

    void validate() const;
};

/// Nodal state of the coupled problem: deformation y and vector damage d
/// (2 reals per node each, interleaved), plus the frozen-crack directions.
struct SimulationState {
    Mesh mesh;
    Eigen::VectorXd y;
    Eigen::VectorXd d;
    std::vector<std::optional<Vec2>> frozen;
    int step = 0;

    static SimulationState reference(Mesh mesh);

    Vec2 y_at(int node) const { return Vec2(y[2 * node], y[2 * node + 1]); }
    Vec2 d_at(int node) const { return Vec2(d[2 * node], d[2 * node + 1]); }
    void set_y(int node, const Vec2& v) {
        y[2 * node] = v.x();
        y[2 * node + 1] = v.y();
    }
    void set_d(int node, const Vec2& v) {
        d[2 * node] = v.x();
        d[2 * node + 1] = v.y();
    }
};

struct BoundaryCondition {
    enum class Kind { DirichletAffine, DirichletZero, TractionFree };
    std::string tag;
    Kind kind = Kind::DirichletZero;
    Mat2 f0 = Mat2::Identity();           ///< DirichletAffine: y = f0 x on the tagged edges
    std::array<bool, 2> mask = {true, true};  ///< per-component selection
};

struct EnergyEval {
    double energy = 0.0;
    Eigen::VectorXd grad_y;
    Eigen::VectorXd grad_d;
};

/// One-point quadrature of the regularized energy
///   ((1-|d|)^2 + eta) W(grad y) + (1-(1-|d|)^2) Wd(grad y, d/|d|)
///   + g_c ( |d|^2 / (2 eps) + eps/2 |grad d|^2 )
/// with analytic gradients. Throws ElementInverted when det grad y <= 0.
EnergyEval total_energy(const SimulationState& state, const MaterialModel& model,
                        const PhaseFieldParams& params, bool want_grad_y = true,
                        bool want_grad_d = true);

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    double energy = 0.0;
};

/// Minimize the energy over y at fixed d, under the Dirichlet data; the line
/// search backtracks away from element inversion.
SolveReport solve_displacement(SimulationState& state, const MaterialModel& model,
                               const PhaseFieldParams& params,
                               const std::vector<BoundaryCondition>& bcs);

struct DamageOptions {
    /// Per-node flag: constrain both components of d to be non-negative.
    std::vector<std::uint8_t> nonneg;
    /// Per-node flag: damage pinned at zero (grip regions near driven faces).
    std::vector<std::uint8_t> pinned_zero;
};

/// Minimize over d at fixed y, subject to |d| <= 1 per node (projection),
/// frozen-node equality, and optional componentwise lower bounds.
SolveReport solve_damage(SimulationState& state, const MaterialModel& model,
                         const PhaseFieldParams& params, const DamageOptions& options = {});

struct StaggerReport {
    int sweeps = 0;
    double last_update = 0.0;
    bool converged = false;
    std::vector<double> energies;  ///< after every substep
};

/// Alternate displacement and damage solves until the max nodal update falls
/// below stagger_tol. Throws NotConverged past max_stagger.
StaggerReport staggered_step(SimulationState& state, const MaterialModel& model,
                             const PhaseFieldParams& params,
                             const std::vector<BoundaryCondition>& bcs,
                             const DamageOptions& options = {});

/// Freeze every node with |d| >= d_c at d/|d| (unit magnitude, orientation
/// locked). Returns the number of newly frozen nodes; the frozen set only grows.
int apply_irreversibility(SimulationState& state, const PhaseFieldParams& params);

/// Apply Dirichlet values of the given boundary conditions to y.
void apply_dirichlet(SimulationState& state, const std::vector<BoundaryCondition>& bcs);

}  // namespace qrpf

#endif
