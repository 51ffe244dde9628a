#include "qrpf/splitting.hpp"

#include <cmath>

#include "qrpf/small_strain.hpp"

namespace qrpf {

namespace {

void require_symmetric3(const Mat3& eps) {
    if ((eps - eps.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, eps.norm()))
        throw Error("strain tensor must be symmetric");
}

Mat3 intact_sigma(const Mat3& eps, double mu, double lambda) {
    return lambda * eps.trace() * Mat3::Identity() + 2.0 * mu * eps;
}

}  // namespace

SplitStress miehe_split_stress(const Mat3& eps, double mu, double lambda) {
    require_symmetric3(eps);
    // direct analytic solver for the symmetric 3x3 eigenproblem; with repeated
    // eigenvalues any orthonormal eigenbasis yields the same assembled stress
    Eigen::SelfAdjointEigenSolver<Mat3> es;
    es.computeDirect(eps);
    double tr_neg = std::min(eps.trace(), 0.0);
    SplitStress out;
    out.method = SplitMethod::PrincipalStrain;
    for (int a = 0; a < 3; ++a) {
        Vec3 dir = es.eigenvectors().col(a);
        // Rayleigh-quotient refinement: the analytic eigenvalues drift to
        // ~1e-9 near degeneracies, the quotient restores machine accuracy
        double lam = dir.dot(eps * dir);
        double coeff = lambda * tr_neg + 2.0 * mu * std::min(lam, 0.0);
        out.sigma += coeff * dir * dir.transpose();
    }
    return out;
}

SplitStress amor_split_stress(const Mat3& eps, double mu, double lambda) {
    require_symmetric3(eps);
    double kappa = lambda + 2.0 * mu / 3.0;
    SplitStress out;
    out.method = SplitMethod::HydroDeviatoric;
    out.sigma = kappa * std::min(eps.trace(), 0.0) * Mat3::Identity();
    return out;
}

SplittingReport splitting_report(double lambda, double mu, double sigma0, double tau) {
    if (!(mu > 0.0) || !(lambda >= 0.0)) throw NonPositive("splitting report requires mu > 0");
    SplittingReport rep{lambda, mu, sigma0, tau, {}};
    const Vec3 e2(0, 1, 0);
    const double c = sigma0 / (mu * (3.0 * lambda + 2.0 * mu));

    auto add = [&](const std::string& scenario, const Mat3& eps, const std::string& note) {
        SplittingCase sc;
        sc.scenario = scenario;
        sc.strain = eps;
        sc.intact_stress = intact_sigma(eps, mu, lambda);
        sc.miehe = miehe_split_stress(eps, mu, lambda).sigma;
        sc.amor = amor_split_stress(eps, mu, lambda).sigma;
        auto t = wdlin_traction_3d(eps, e2, mu, lambda);
        sc.qr_normal_traction = t.normal;
        sc.qr_shear_traction = std::max(std::abs(t.shear_t1), std::abs(t.shear_t2));
        sc.note = note;
        rep.cases.push_back(sc);
    };

    Mat3 eps = Mat3::Zero();
    eps.diagonal() << c * (lambda + mu), -c * lambda / 2.0, -c * lambda / 2.0;
    add("uniaxial-tension-parallel", eps,
        "crack should carry the far-field stress unchanged; splits respond anyway");

    eps = Mat3::Zero();
    eps(0, 1) = eps(1, 0) = tau / (2.0 * mu);
    add("simple-shear", eps,
        "classical crack faces carry no shear traction; the principal split does");

    eps = Mat3::Zero();
    eps.diagonal() << c * lambda / 2.0, -c * (lambda + mu), c * lambda / 2.0;
    add("uniaxial-compression-normal", eps,
        "closed crack should respond as intact; splits under- or over-relax");

    return rep;
}

}  // namespace qrpf
