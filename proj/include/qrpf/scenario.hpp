#ifndef QRPF_SCENARIO_HPP
#define QRPF_SCENARIO_HPP

#include <string>
#include <vector>

#include "qrpf/config.hpp"
#include "qrpf/splitting.hpp"

namespace qrpf {

struct FrozenCrackResult {
    std::string mode;
    double crack_mean = 0.0;   ///< mean elastic density where the band weight >= 0.5
    double intact_mean = 0.0;  ///< ... <= 0.05
    double ratio = 0.0;
    double uniformity_rms = 0.0;  ///< rms deviation from the field mean, relative
    double uniformity_max = 0.0;
    int solver_iterations = 0;
};

/// Fix d to the circular-crack configuration, apply the mode's affine
/// boundary data, minimize over y only, and write energy/deformation/traction
/// output. Modes: a, b, c, d, e, d-relaxed.
FrozenCrackResult run_frozen_crack(const ScenarioConfig& config);

struct LandscapeRun {
    std::vector<ThetaSample> samples;  ///< Wd / mu over theta in [0, pi]
    std::vector<int> minima;
};

LandscapeRun run_landscape(const ScenarioConfig& config);

struct CyclicShearStep {
    int step = 0;
    double gamma = 0.0;
    double energy = 0.0;
    double max_d = 0.0;
    double tip_x = 0.0;
    double tip_y = 0.0;
    int frozen_count = 0;
};

struct CyclicShearResult {
    std::vector<CyclicShearStep> rows;
    Vec2 notch_tip = Vec2::Zero();
    int phase1_new_frozen = 0;
    int phase2_new_frozen = 0;
    bool kink_toward_bottom_right = false;  ///< phase-1 growth direction
    double branch_distance_to_kink = 1e30;  ///< phase-2 nucleation distance
    bool branch_not_downward = false;
    double closed_signature_ratio = 0.0;  ///< first-cycle crack deviation / peak
};

/// Pre-notched square under shear right then left; the first-cycle crack
/// kinks and grows, then closes on reversal while a branch nucleates at the
/// kink. Writes per-step fields and a summary CSV.
CyclicShearResult run_cyclic_shear(const ScenarioConfig& config);

struct CavityResult {
    std::vector<double> seed_extension;  ///< radial growth beyond each seed
    std::vector<int> grown;              ///< seed indices that grew
    double closure_l2_error = 0.0;       ///< second compression vs intact baseline
    int new_frozen_total = 0;
};

/// Square specimen with a circular cavity and 8 radial pre-cracks under a
/// compression - tension - compression program of affine remote loading.
CavityResult run_cavity(const ScenarioConfig& config);

/// Emit the energy-splitting comparison table as CSV.
SplittingReport run_splitting_demo(const ScenarioConfig& config);

}  // namespace qrpf

#endif
