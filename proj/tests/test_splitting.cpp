#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qrpf/splitting.hpp"
#include "test_support.hpp"

using namespace qrpf;
using namespace qrpf::testing;

namespace {

template <typename Rng>
Mat3 random_sym3(Rng& rng, double amp = 0.3) {
    std::uniform_real_distribution<double> u(-amp, amp);
    Mat3 e;
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng), f = u(rng), g = u(rng);
    e << a, d, f, d, b, g, f, g, c;
    return e;
}

Mat3 uniaxial_parallel_strain(double sigma0, double mu, double lambda) {
    double c = sigma0 / (mu * (3 * lambda + 2 * mu));
    Mat3 e = Mat3::Zero();
    e.diagonal() << c * (lambda + mu), -c * lambda / 2, -c * lambda / 2;
    return e;
}

}  // namespace

TEST_CASE("miehe split examples") {
    CHECK(miehe_split_stress(Mat3(Mat3::Zero()), 1.0, 2.0).sigma.norm() == 0.0);

    // uniaxial tension parallel to the crack, sigma0 = 1, lambda = 2, mu = 1:
    // formula value -lambda sigma0 / (3 lambda + 2 mu) on the e2, e3 diagonal
    Mat3 s = miehe_split_stress(uniaxial_parallel_strain(1.0, 1.0, 2.0), 1.0, 2.0).sigma;
    CHECK(s(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s(1, 1) == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(s(2, 2) == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(std::abs(s(0, 1)) + std::abs(s(0, 2)) + std::abs(s(1, 2)) < 1e-12);

    // at lambda = 1 this coincides with sigma0 / (3 lambda + 2 mu)
    Mat3 s1 = miehe_split_stress(uniaxial_parallel_strain(1.0, 1.0, 1.0), 1.0, 1.0).sigma;
    CHECK(s1(1, 1) == doctest::Approx(-1.0 / 5.0).epsilon(1e-12));

    // pure shear, tau = 1, mu = 1
    Mat3 eps = Mat3::Zero();
    eps(0, 1) = eps(1, 0) = 0.5;
    Mat3 sh = miehe_split_stress(eps, 1.0, 2.0).sigma;
    Mat3 expect;
    expect << -0.5, 0.5, 0, 0.5, -0.5, 0, 0, 0, 0;
    CHECK((sh - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("miehe split is never tensile") {
    std::mt19937 rng(29);
    for (int k = 0; k < 10000; ++k) {
        Mat3 eps = random_sym3(rng);
        Mat3 s = miehe_split_stress(eps, 1.0, 2.0).sigma;
        Eigen::SelfAdjointEigenSolver<Mat3> es(s);
        CHECK(es.eigenvalues().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("amor split examples and structure") {
    CHECK(amor_split_stress(Mat3(Mat3::Zero()), 1.0, 2.0).sigma.norm() == 0.0);
    CHECK(amor_split_stress(uniaxial_parallel_strain(1.0, 1.0, 2.0), 1.0, 2.0).sigma.norm() ==
          doctest::Approx(0.0).epsilon(1e-14));

    // uniaxial compression normal to the crack: -sigma0/3 I exactly
    double lambda = 1.0, mu = 1.0, sigma0 = 1.0;
    double c = sigma0 / (mu * (3 * lambda + 2 * mu));
    Mat3 eps = Mat3::Zero();
    eps.diagonal() << c * lambda / 2, -c * (lambda + mu), c * lambda / 2;
    Mat3 s = amor_split_stress(eps, mu, lambda).sigma;
    CHECK((s + sigma0 / 3.0 * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937 rng(31);
    for (int k = 0; k < 1000; ++k) {
        Mat3 e = random_sym3(rng);
        Mat3 sig = amor_split_stress(e, 1.3, 0.8).sigma;
        double kappa = 0.8 + 2.0 * 1.3 / 3.0;
        Mat3 expect = kappa * std::min(e.trace(), 0.0) * Mat3::Identity();
        CHECK((sig - expect).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("splitting report: contrast with the effective-energy traction") {
    auto rep = splitting_report(2.0, 1.0, 1.0, 1.0);
    REQUIRE(rep.cases.size() == 3);

    // uniaxial tension parallel: crack traction zero in the effective model
    const auto& tension = rep.cases[0];
    CHECK(std::abs(tension.qr_normal_traction) < 1e-12);
    CHECK(std::abs(tension.qr_shear_traction) < 1e-12);
    CHECK(tension.amor.norm() < 1e-14);
    CHECK(tension.miehe.norm() > 0.1);  // spurious compressive response

    // simple shear: no shear traction in the effective model, tau/2 for miehe
    const auto& shear = rep.cases[1];
    CHECK(std::abs(shear.qr_shear_traction) < 1e-12);
    CHECK(std::abs(shear.miehe(0, 1)) == doctest::Approx(0.5).epsilon(1e-12));

    // uniaxial compression normal: effective traction equals intact T_nn,
    // both splits deviate from the intact stress somewhere
    const auto& comp = rep.cases[2];
    CHECK(comp.qr_normal_traction == doctest::Approx(comp.intact_stress(1, 1)).epsilon(1e-12));
    CHECK(comp.qr_normal_traction == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK((comp.miehe - comp.intact_stress).cwiseAbs().maxCoeff() > 1e-3);
    CHECK((comp.amor - comp.intact_stress).cwiseAbs().maxCoeff() > 1e-3);

    // no Poisson coupling when lambda = 0
    auto flat = splitting_report(0.0, 1.0, 1.0, 1.0);
    CHECK(flat.cases[0].strain(1, 1) == doctest::Approx(0.0));
    CHECK(flat.cases[0].miehe.norm() < 1e-14);  // no transverse contraction to penalize

    // deterministic across runs
    auto rep2 = splitting_report(2.0, 1.0, 1.0, 1.0);
    for (size_t i = 0; i < rep.cases.size(); ++i) {
        CHECK((rep.cases[i].miehe - rep2.cases[i].miehe).norm() == 0.0);
        CHECK((rep.cases[i].amor - rep2.cases[i].amor).norm() == 0.0);
        CHECK(rep.cases[i].qr_normal_traction == rep2.cases[i].qr_normal_traction);
    }
}
