#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qrpf/fem.hpp"
#include "test_support.hpp"

using namespace qrpf;
using namespace qrpf::testing;

namespace {

const MaterialModel kNh = MaterialModel::neo_hookean_2d(1.0, 1.0, 1.0);

PhaseFieldParams desk_params() {
    PhaseFieldParams p;
    p.epsilon = 0.1;
    p.eta = 1e-6;
    return p;
}

std::vector<BoundaryCondition> affine_all(const Mat2& f0) {
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

// randomized state with the damage field pointing in a coherent direction so
// the quadrature-point magnitude stays away from the degenerate origin
template <typename Rng>
SimulationState random_state(Rng& rng, int n) {
    SimulationState state = SimulationState::reference(make_square_mesh(n, n));
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    std::uniform_real_distribution<double> mag(0.2, 0.8);
    std::uniform_real_distribution<double> ang(-0.4, 0.4);
    for (int i = 0; i < state.mesh.node_count(); ++i) {
        state.y[2 * i] += u(rng);
        state.y[2 * i + 1] += u(rng);
        double a = M_PI / 2 + ang(rng);
        state.set_d(i, mag(rng) * Vec2(std::cos(a), std::sin(a)));
    }
    return state;
}

}  // namespace

TEST_CASE("total_energy baseline values") {
    SimulationState state = SimulationState::reference(make_square_mesh(4, 4));
    auto params = desk_params();
    auto eval = total_energy(state, kNh, params);
    CHECK(eval.energy == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(eval.grad_y.lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK(eval.grad_d.lpNorm<Eigen::Infinity>() < 1e-14);

    // affine deformation of the intact body: energy = area (1 + eta) W(F0)
    Mat2 f0;
    f0 << 1.1, 0.04, -0.02, 0.95;
    for (int i = 0; i < state.mesh.node_count(); ++i) state.set_y(i, f0 * state.mesh.nodes[i]);
    auto eval2 = total_energy(state, kNh, params);
    CHECK(eval2.energy ==
          doctest::Approx((1.0 + params.eta) * intact_energy(kNh, f0)).epsilon(1e-12));
}

TEST_CASE("total_energy detects inverted elements") {
    SimulationState state = SimulationState::reference(make_square_mesh(2, 2));
    state.y[0] += 10.0;  // fold the corner element over
    try {
        total_energy(state, kNh, desk_params());
        FAIL("expected ElementInverted");
    } catch (const ElementInverted& err) {
        CHECK(err.element >= 0);
    }
}

TEST_CASE("assembled gradients match finite differences") {
    std::mt19937 rng(3);
    auto params = desk_params();
    for (int trial = 0; trial < 5; ++trial) {
        SimulationState state = random_state(rng, 2);  // 9 nodes
        auto eval = total_energy(state, kNh, params);

        const double h = 1e-7;
        for (int dof = 0; dof < state.y.size(); ++dof) {
            SimulationState sp = state, sm = state;
            sp.y[dof] += h;
            sm.y[dof] -= h;
            double fd = (total_energy(sp, kNh, params, false, false).energy -
                         total_energy(sm, kNh, params, false, false).energy) /
                        (2 * h);
            CHECK(eval.grad_y[dof] ==
                  doctest::Approx(fd).epsilon(1e-5).scale(std::max(1.0, std::abs(fd))));
        }
        for (int dof = 0; dof < state.d.size(); ++dof) {
            SimulationState sp = state, sm = state;
            sp.d[dof] += h;
            sm.d[dof] -= h;
            double fd = (total_energy(sp, kNh, params, false, false).energy -
                         total_energy(sm, kNh, params, false, false).energy) /
                        (2 * h);
            CHECK(eval.grad_d[dof] ==
                  doctest::Approx(fd).epsilon(1e-5).scale(std::max(1.0, std::abs(fd))));
        }
    }
}

TEST_CASE("discrete energy is objective") {
    std::mt19937 rng(11);
    SimulationState state = random_state(rng, 3);
    auto params = desk_params();
    double e0 = total_energy(state, kNh, params, false, false).energy;
    for (int k = 0; k < 5; ++k) {
        Mat2 q = random_rotation2(rng);
        SimulationState rotated = state;
        for (int i = 0; i < state.mesh.node_count(); ++i) rotated.set_y(i, q * state.y_at(i));
        double e1 = total_energy(rotated, kNh, params, false, false).energy;
        CHECK(close_rel(e0, e1, 1e-10));
    }
}

TEST_CASE("affine patch test is exact") {
    SimulationState state = SimulationState::reference(make_square_mesh(6, 6));
    Mat2 f0;
    f0 << 1.0, 0.0, 0.0, 1.2;
    // start away from the solution
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    for (int i = 0; i < state.y.size(); ++i) state.y[i] += u(rng);

    auto report = solve_displacement(state, kNh, desk_params(), affine_all(f0));
    CHECK(report.converged);
    for (int i = 0; i < state.mesh.node_count(); ++i) {
        Vec2 expected = f0 * state.mesh.nodes[i];
        CHECK((state.y_at(i) - expected).norm() < 1e-8);
    }
}

TEST_CASE("solve_damage keeps the unloaded state undamaged") {
    SimulationState state = SimulationState::reference(make_square_mesh(4, 4));
    auto report = solve_damage(state, kNh, desk_params());
    CHECK(report.converged);
    CHECK(state.d.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("solve_damage honors frozen nodes bit-exactly and the ball") {
    std::mt19937 rng(7);
    SimulationState state = random_state(rng, 3);
    Vec2 locked = Vec2(0.6, 0.8);
    state.frozen[5] = locked;
    state.set_d(5, locked);
    // stretch the body so damage is driven somewhere
    Mat2 f0;
    f0 << 1.0, 0.0, 0.0, 1.3;
    for (int i = 0; i < state.mesh.node_count(); ++i) state.set_y(i, f0 * state.mesh.nodes[i]);

    auto params = desk_params();
    solve_damage(state, kNh, params);
    CHECK(state.d_at(5) == locked);  // bit-exact
    for (int i = 0; i < state.mesh.node_count(); ++i) CHECK(state.d_at(i).norm() <= 1.0 + 1e-10);
}

TEST_CASE("componentwise non-negativity constraint") {
    std::mt19937 rng(13);
    SimulationState state = random_state(rng, 3);
    Mat2 f0;
    f0 << 1.0, 0.3, 0.0, 1.1;
    for (int i = 0; i < state.mesh.node_count(); ++i) state.set_y(i, f0 * state.mesh.nodes[i]);
    DamageOptions options;
    options.nonneg.assign(state.mesh.node_count(), 1);
    solve_damage(state, kNh, desk_params(), options);
    for (int i = 0; i < state.mesh.node_count(); ++i) {
        CHECK(state.d_at(i).x() >= 0.0);
        CHECK(state.d_at(i).y() >= 0.0);
    }
}

TEST_CASE("staggered step on the intact unloaded body converges in one sweep") {
    SimulationState state = SimulationState::reference(make_square_mesh(4, 4));
    auto report = staggered_step(state, kNh, desk_params(), affine_all(Mat2::Identity()));
    CHECK(report.converged);
    CHECK(report.sweeps == 1);
}

TEST_CASE("staggered energy trace is nonincreasing") {
    SimulationState state = SimulationState::reference(make_square_mesh(8, 8));
    PhaseFieldParams params = desk_params();
    params.epsilon = 0.08;
    MaterialModel soft = MaterialModel::neo_hookean_2d(1.0, 0.0, 0.02);
    // seed a short crack at mid-height
    for (int i = 0; i < state.mesh.node_count(); ++i) {
        Vec2 x = state.mesh.nodes[i];
        if (x.y() == 0.5 && x.x() <= 0.25 + 1e-12) {
            state.frozen[i] = Vec2(0, 1);
            state.set_d(i, Vec2(0, 1));
        }
    }
    Mat2 f0;
    f0 << 1.0, 0.0, 0.0, 1.25;
    auto report = staggered_step(state, soft, params, affine_all(f0));
    CHECK(report.converged);
    REQUIRE(report.energies.size() >= 2);
    for (std::size_t k = 1; k < report.energies.size(); ++k)
        CHECK(report.energies[k] <= report.energies[k - 1] + 1e-10);
    for (int i = 0; i < state.mesh.node_count(); ++i) CHECK(state.d_at(i).norm() <= 1.0 + 1e-10);
}

TEST_CASE("staggered step is deterministic") {
    auto run = [] {
        SimulationState state = SimulationState::reference(make_square_mesh(6, 6));
        PhaseFieldParams params = desk_params();
        MaterialModel soft = MaterialModel::neo_hookean_2d(1.0, 0.0, 0.05);
        for (int i = 0; i < state.mesh.node_count(); ++i) {
            Vec2 x = state.mesh.nodes[i];
            if (std::abs(x.y() - 0.5) < 1e-12 && x.x() < 0.35) {
                state.frozen[i] = Vec2(0, 1);
                state.set_d(i, Vec2(0, 1));
            }
        }
        Mat2 f0;
        f0 << 1.0, 0.18, 0.0, 1.0;
        staggered_step(state, soft, params, affine_all(f0));
        return state;
    };
    SimulationState a = run();
    SimulationState b = run();
    CHECK((a.y - b.y).norm() == 0.0);
    CHECK((a.d - b.d).norm() == 0.0);
}

TEST_CASE("apply_irreversibility freezes magnitude and orientation") {
    SimulationState state = SimulationState::reference(make_square_mesh(2, 2));
    PhaseFieldParams params;  // d_c = 0.95
    state.set_d(0, 0.96 * Vec2(1, 0));
    state.set_d(1, 0.90 * Vec2(0, 1));
    state.frozen[2] = Vec2(0, 1);
    state.set_d(2, Vec2(0, 1));

    int frozen = apply_irreversibility(state, params);
    CHECK(frozen == 1);
    REQUIRE(state.frozen[0].has_value());
    CHECK(state.d_at(0).norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((*state.frozen[0] - Vec2(1, 0)).norm() < 1e-15);
    CHECK_FALSE(state.frozen[1].has_value());  // below d_c: may still heal
    CHECK(state.d_at(1).norm() == doctest::Approx(0.9));
    CHECK((*state.frozen[2] - Vec2(0, 1)).norm() == 0.0);  // unchanged

    // frozen set only grows
    int again = apply_irreversibility(state, params);
    CHECK(again == 0);
}

TEST_CASE("pre-notched strip: damage grows monotonically with load") {
    SimulationState state = SimulationState::reference(make_square_mesh(10, 10));
    PhaseFieldParams params = desk_params();
    params.epsilon = 0.1;
    MaterialModel soft = MaterialModel::neo_hookean_2d(1.0, 0.0, 0.03);
    for (int i = 0; i < state.mesh.node_count(); ++i) {
        Vec2 x = state.mesh.nodes[i];
        if (std::abs(x.y() - 0.5) < 1e-12 && x.x() < 0.3) {
            state.frozen[i] = Vec2(0, 1);
            state.set_d(i, Vec2(0, 1));
        }
    }
    double prev_max = 0.0;
    for (double stretch : {1.05, 1.15, 1.25, 1.35}) {
        Mat2 f0;
        f0 << 1.0, 0.0, 0.0, stretch;
        staggered_step(state, soft, params, affine_all(f0));
        double max_d = 0.0;
        for (int i = 0; i < state.mesh.node_count(); ++i)
            if (!state.frozen[i]) max_d = std::max(max_d, state.d_at(i).norm());
        CHECK(max_d >= prev_max - 1e-9);
        prev_max = max_d;
    }
    CHECK(prev_max > 0.05);  // tension does drive damage near the notch
}
