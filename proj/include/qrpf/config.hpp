#ifndef QRPF_CONFIG_HPP
#define QRPF_CONFIG_HPP

#include <string>
#include <utility>
#include <vector>

#include "qrpf/fem.hpp"
#include "qrpf/mesh.hpp"

namespace qrpf {

enum class ScenarioKind { FrozenCrack, CyclicShear, Cavity, Landscape, SplittingDemo };

struct MeshSpec {
    enum class Kind { Square, Hole, File };
    Kind kind = Kind::Square;
    int square_n = 50;
    int hole_n_rho = 22;
    int hole_n_phi = 96;
    double hole_radius = 0.2;
    std::string path;
};

/// Straight pre-crack seed: nodes within width/2 of the segment are damaged
/// to the unit normal and frozen immediately.
struct SeedCrack {
    Vec2 from = Vec2::Zero();
    Vec2 to = Vec2::Zero();
    Vec2 normal = Vec2(0, 1);
    double width = 0.03;
};

/// Parsed and normalized scenario description. Material parameters are
/// nondimensionalized on load: stresses by mu, lengths by specimen_size.
struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::Landscape;
    MaterialModel material = MaterialModel::neo_hookean_2d(1.0, 1.0, 1.0);
    double mu_physical = 1.0;  ///< original modulus, recorded in reports
    PhaseFieldParams params;
    MeshSpec mesh;
    std::string output_dir = "out";
    int seed = 0;

    // frozen-crack
    std::string mode = "a";
    double stretch = 1.1;
    double compression = 0.9;
    double shear = 0.2;
    Vec2 crack_center = Vec2(0.5, 0.5);
    double crack_radius = 0.35;
    double crack_profile_width = 0.0;  ///< 0: defaults to epsilon

    // landscape
    Mat2 landscape_f = Mat2::Identity();
    int samples = 721;

    // cyclic shear
    double gamma_max = 0.34;
    int steps_per_phase = 17;
    bool nonneg_after_reversal = true;
    double grip_margin = -1.0;  ///< damage-free strip near the driven faces; <0: 2 epsilon
    std::vector<SeedCrack> seed_cracks;
    int vtk_every = 0;  ///< 0: milestones only

    // cavity
    double cavity_compression = 0.94;
    double tension_max = 1.25;
    int tension_steps = 12;
    int stagger_shrink_threshold = 25;
    double seed_len_a = 0.10;
    double seed_len_b = 0.06;
    double seed_width = 0.0;  ///< 0: derived from the mesh spacing
    bool compression_only = false;

    // splitting demo
    double split_lambda = 2.0;
    double split_mu = 1.0;
    double split_sigma0 = 1.0;
    double split_tau = 1.0;

    /// Optional explicit (step, F0) override of the scenario's load schedule.
    std::vector<std::pair<int, Mat2>> load_program;

    void validate() const;  ///< throws ConfigError
};

/// Parse a JSON config file (see docs/config.schema.json). Throws ConfigError
/// on malformed input, unknown scenario names, or missing referenced files.
ScenarioConfig load_config(const std::string& path);

/// Instantiate the configured mesh (generator or file).
Mesh build_mesh(const ScenarioConfig& config);

}  // namespace qrpf

#endif
