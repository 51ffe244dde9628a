#ifndef QRPF_CONSTITUTIVE_HPP
#define QRPF_CONSTITUTIVE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qrpf/kinematics.hpp"

namespace qrpf {

enum class EnergyFamily { NeoHookean2D, MooneyRivlin3D, PQEnergy2D, PQEnergy3D, UserSupplied };

/// Intact stored-energy description. Immutable after construction; shareable
/// across threads. Use the named factories; they validate the parameters.
struct MaterialModel {
    EnergyFamily family = EnergyFamily::NeoHookean2D;
    int dim = 2;
    double mu = 1.0;      // NeoHookean2D shear modulus
    double lambda = 1.0;  // NeoHookean2D second Lame parameter (>= 0)
    double mu1 = 1.0;     // MooneyRivlin3D / PQ first modulus; PQ2D mu-bar
    double mu2 = 1.0;     // MooneyRivlin3D / PQ3D cofactor modulus
    double lambda_bar = 1.0;
    double p = 2.0;
    double q = 2.0;
    double g_c = 1.0;  // toughness, used by the phase-field solver
    std::function<double(const Eigen::MatrixXd&)> user_energy;

    static MaterialModel neo_hookean_2d(double mu, double lambda, double g_c = 1.0);
    static MaterialModel mooney_rivlin_3d(double mu1, double mu2, double lambda_bar,
                                          double g_c = 1.0);
    static MaterialModel pq_2d(double mu_bar, double lambda_bar, double p, double g_c = 1.0);
    static MaterialModel pq_3d(double mu1, double mu2, double lambda_bar, double p, double q,
                               double g_c = 1.0);
    static MaterialModel user_supplied(int dim, std::function<double(const Eigen::MatrixXd&)> w,
                                       double g_c = 1.0);

    bool has_closed_form() const {
        return family == EnergyFamily::NeoHookean2D || family == EnergyFamily::MooneyRivlin3D;
    }
};

enum class Branch { Open, Closed };

/// Outcome of the crack-frame relaxation defining the effective energy.
struct RelaxationResult2 {
    double energy = 0.0;
    Branch branch = Branch::Open;          // Open iff a_nn >= a_nn_threshold
    TriangularFactor2 a_star{1, 1, 0};     // triangular coefficients of the minimizer
    double a_nn_threshold = 1.0;
};

struct RelaxationResult3 {
    double energy = 0.0;
    Branch branch = Branch::Open;
    TriangularFactor3 a_star{1, 1, 1, 0, 0, 0};
    double a_nn_threshold = 1.0;
};

/// Crack-face traction components in the crack frame.
struct CrackTraction {
    double normal = 0.0;   // dWd/dA_nn
    double shear_t1 = 0.0; // dWd/dA_t1n
    double shear_t2 = 0.0; // 3D only
};

double intact_energy(const MaterialModel& model, const Mat2& f);
double intact_energy(const MaterialModel& model, const Mat3& f);

/// First Piola-Kirchhoff stress dW/dF. Analytic for the built-in families;
/// central finite differences (step 1e-6 max(1,|F|)) for UserSupplied.
Mat2 intact_stress(const MaterialModel& model, const Mat2& f);
Mat3 intact_stress(const MaterialModel& model, const Mat3& f);

/// Energy-minimizing normal stretch at clamped tangential stretch a11
/// (shear relaxed to zero). Closed form for NeoHookean2D, unique numeric 1D
/// minimizer for PQEnergy2D.
double a22_star(const MaterialModel& model, double a11);

/// 3D analogue at clamped (a11, a22, a12). Closed form for MooneyRivlin3D,
/// numeric for PQEnergy3D.
double a33_star(const MaterialModel& model, double a11, double a22, double a12);

/// Effective crack energy Wd(F, n): relax the intact energy over the
/// crack-face shears, and additionally over the normal stretch when the crack
/// is open (a_nn at or above the relaxation threshold). Closed/semi-closed
/// paths for the built-in families; UserSupplied falls back to the generic
/// minimization.
RelaxationResult2 effective_energy(const MaterialModel& model, const Mat2& f, const Vec2& n);
RelaxationResult3 effective_energy(const MaterialModel& model, const Mat3& f, const Vec3& n);

/// Same quantity through the multiplicative parametrization
/// W(F A(a_nn'', 1, 1, a_t1n'', a_t2n'', 0)), minimized numerically. Exists for
/// every admissible W; used as the cross-check of the family-specific paths
/// and as the only path for UserSupplied.
RelaxationResult2 effective_energy_generic(const MaterialModel& model, const Mat2& f,
                                           const Vec2& n);
RelaxationResult3 effective_energy_generic(const MaterialModel& model, const Mat3& f,
                                           const Vec3& n);

/// dWd/dF through the envelope property: the relaxed coordinates are
/// stationary at the minimizer, so no derivative of the threshold is needed.
/// On the branch boundary the closed-branch one-sided value is returned
/// (Wd is C^1 there, so the choice is immaterial).
Mat2 effective_stress(const MaterialModel& model, const Mat2& f, const Vec2& n);
Mat3 effective_stress(const MaterialModel& model, const Mat3& f, const Vec3& n);

/// Crack-face traction components of the effective energy at the reduced
/// (triangular) state of F in the frame of n.
CrackTraction crack_traction(const MaterialModel& model, const Mat2& f, const Vec2& n);
CrackTraction crack_traction(const MaterialModel& model, const Mat3& f, const Vec3& n);

/// Combined evaluation for the element assembly loop: Wd, dWd/dF and the
/// derivative of Wd under rotation of the normal, n(theta) = (cos, sin).
struct EffectiveEval {
    double energy = 0.0;
    Mat2 stress = Mat2::Zero();
    double denergy_dtheta = 0.0;
};
EffectiveEval effective_eval(const MaterialModel& model, const Mat2& f, const Vec2& n,
                             bool want_stress, bool want_dtheta);

/// Max |d^2 W / dA_nn dA_tin| at a triangular state, by mixed central
/// differences. Zero exactly for Mooney-Rivlin-type energies, generically
/// nonzero otherwise: no stored energy can then satisfy both classical
/// traction conditions.
double compatibility_defect(const MaterialModel& model, const TriangularFactor2& a,
                            const CrackFrame2& frame);
double compatibility_defect(const MaterialModel& model, const TriangularFactor3& a,
                            const CrackFrame3& frame);

struct ThetaSample {
    double theta;
    double wd;
};

/// Sample Wd(F, n(theta)) with n = (cos theta, sin theta), theta in [0, pi].
std::vector<ThetaSample> landscape_theta(const MaterialModel& model, const Mat2& f, int samples);

/// Indices of strict local minima of a landscape under the periodic
/// identification theta ~ theta + pi (the last sample duplicates the first).
std::vector<int> landscape_local_minima(const std::vector<ThetaSample>& samples);

}  // namespace qrpf

#endif
