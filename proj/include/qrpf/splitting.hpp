#ifndef QRPF_SPLITTING_HPP
#define QRPF_SPLITTING_HPP

#include <string>
#include <vector>

#include "qrpf/kinematics.hpp"

namespace qrpf {

enum class SplitMethod { PrincipalStrain, HydroDeviatoric };

struct SplitStress {
    Mat3 sigma = Mat3::Zero();
    SplitMethod method = SplitMethod::PrincipalStrain;
};

/// Principal-strain split: only the compressive part of the energy survives
/// in the crack, sigma = sum_a (lambda <tr eps>_- + 2 mu <eps_a>_-) n_a (x) n_a.
SplitStress miehe_split_stress(const Mat3& eps, double mu, double lambda);

/// Hydrostatic-deviatoric split: sigma = kappa <tr eps>_- I, kappa = lambda + 2mu/3.
SplitStress amor_split_stress(const Mat3& eps, double mu, double lambda);

/// One comparison case: a far-field state, the split responses, and the
/// crack-face traction predicted by the linearized effective energy for the
/// same state (crack normal e2).
struct SplittingCase {
    std::string scenario;
    Mat3 strain;
    Mat3 intact_stress;
    Mat3 miehe;
    Mat3 amor;
    double qr_normal_traction;
    double qr_shear_traction;
    std::string note;
};

struct SplittingReport {
    double lambda;
    double mu;
    double sigma0;
    double tau;
    std::vector<SplittingCase> cases;
};

/// Tabulates the comparison scenarios: uniaxial tension parallel to the
/// crack, simple shear across it, and uniaxial compression normal to it.
SplittingReport splitting_report(double lambda, double mu, double sigma0, double tau);

}  // namespace qrpf

#endif
