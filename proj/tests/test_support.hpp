#ifndef QRPF_TEST_SUPPORT_HPP
#define QRPF_TEST_SUPPORT_HPP

#include <random>

#include "qrpf/kinematics.hpp"

namespace qrpf::testing {

inline bool close_rel(double a, double b, double rtol, double atol = 0.0) {
    return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b)) + atol;
}

/// Well-conditioned random deformation gradient: I + amplitude * U[-1,1]
/// entries, rejected while det < 0.05.
template <typename Rng>
Mat2 random_f2(Rng& rng, double amplitude = 0.4) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (true) {
        Mat2 f;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) f(i, j) = (i == j ? 1.0 : 0.0) + amplitude * u(rng);
        if (f.determinant() > 0.05) return f;
    }
}

template <typename Rng>
Mat3 random_f3(Rng& rng, double amplitude = 0.3) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (true) {
        Mat3 f;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) f(i, j) = (i == j ? 1.0 : 0.0) + amplitude * u(rng);
        if (f.determinant() > 0.05) return f;
    }
}

template <typename Rng>
Vec2 random_unit2(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    double t = u(rng);
    return Vec2(std::cos(t), std::sin(t));
}

template <typename Rng>
Vec3 random_unit3(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    while (true) {
        Vec3 v(g(rng), g(rng), g(rng));
        double n = v.norm();
        if (n > 1e-3) return v / n;
    }
}

template <typename Rng>
Mat2 random_rotation2(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    double t = u(rng);
    Mat2 q;
    q << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return q;
}

template <typename Rng>
Mat3 random_rotation3(Rng& rng) {
    Vec3 axis = random_unit3(rng);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    return Eigen::AngleAxisd(u(rng), axis).toRotationMatrix();
}

}  // namespace qrpf::testing

#endif
