#include "qrpf/small_strain.hpp"

#include <cmath>

namespace qrpf {

namespace {

template <int N>
void require_symmetric(const Eigen::Matrix<double, N, N>& eps) {
    if ((eps - eps.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, eps.norm()))
        throw Error("strain tensor must be symmetric");
}

template <int N>
ElasticityTensor<N> rotate_impl(const ElasticityTensor<N>& c, const Eigen::Matrix<double, N, N>& q) {
    ElasticityTensor<N> out;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
                for (int l = 0; l < N; ++l) {
                    double s = 0.0;
                    for (int p = 0; p < N; ++p)
                        for (int r = 0; r < N; ++r)
                            for (int t = 0; t < N; ++t)
                                for (int u = 0; u < N; ++u)
                                    s += q(i, p) * q(j, r) * q(k, t) * q(l, u) * c(p, r, t, u);
                    out.set(i, j, k, l, s);
                }
    return out;
}

}  // namespace

ElasticityTensor2 rotate_elasticity_tensor(const ElasticityTensor2& c, const Mat2& q) {
    return rotate_impl<2>(c, q);
}

ElasticityTensor3 rotate_elasticity_tensor(const ElasticityTensor3& c, const Mat3& q) {
    return rotate_impl<3>(c, q);
}

PosDefReport check_positive_definite(const ElasticityTensor2& c) {
    const double r2 = std::sqrt(2.0);
    Eigen::Matrix3d m;
    m << c(0, 0, 0, 0), c(0, 0, 1, 1), r2 * c(0, 0, 0, 1),
        c(0, 0, 1, 1), c(1, 1, 1, 1), r2 * c(0, 1, 1, 1),
        r2 * c(0, 0, 0, 1), r2 * c(0, 1, 1, 1), 2.0 * c(0, 1, 0, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    PosDefReport rep;
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.c_tntn = c(0, 1, 0, 1);
    rep.shear_normal_det = c(0, 1, 0, 1) * c(1, 1, 1, 1) - c(0, 1, 1, 1) * c(0, 1, 1, 1);
    rep.pass = rep.min_eigenvalue > 0.0 && rep.c_tntn > 0.0 && rep.shear_normal_det > 0.0;
    rep.detail = "min Mandel eigenvalue " + std::to_string(rep.min_eigenvalue) + ", c1212 " +
                 std::to_string(rep.c_tntn) + ", c1212 c2222 - c1222^2 " +
                 std::to_string(rep.shear_normal_det);
    return rep;
}

PosDefReport check_positive_definite(const ElasticityTensor3& c) {
    const double r2 = std::sqrt(2.0);
    const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
    Eigen::Matrix<double, 6, 6> m;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            double wa = pairs[a][0] == pairs[a][1] ? 1.0 : r2;
            double wb = pairs[b][0] == pairs[b][1] ? 1.0 : r2;
            m(a, b) = wa * wb * c(pairs[a][0], pairs[a][1], pairs[b][0], pairs[b][1]);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(m);
    PosDefReport rep;
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.c_tntn = c(0, 2, 0, 2);
    rep.shear_normal_det = c(0, 2, 0, 2) * c(2, 2, 2, 2) - c(0, 2, 2, 2) * c(0, 2, 2, 2);
    rep.pass = rep.min_eigenvalue > 0.0 && rep.c_tntn > 0.0 && rep.shear_normal_det > 0.0;
    rep.detail = "min Mandel eigenvalue " + std::to_string(rep.min_eigenvalue) + ", c1313 " +
                 std::to_string(rep.c_tntn) + ", c1313 c3333 - c1333^2 " +
                 std::to_string(rep.shear_normal_det);
    return rep;
}

double wdlin_isotropic_2d(const Mat2& eps, const Vec2& n, double mu, double lambda) {
    require_symmetric<2>(eps);
    double norm = n.norm();
    if (std::abs(norm - 1.0) > 1e-8) throw NotUnit(norm);
    double n1 = n.x() / norm, n2 = n.y() / norm;
    double e11 = eps(1, 1) * n1 * n1 - 2.0 * eps(0, 1) * n1 * n2 + eps(0, 0) * n2 * n2;
    double e22 = eps(0, 0) * n1 * n1 + 2.0 * eps(0, 1) * n1 * n2 + eps(1, 1) * n2 * n2;
    double lp2m = lambda + 2.0 * mu;
    if (e22 > -lambda / lp2m * e11) return 0.5 * (lp2m - lambda * lambda / lp2m) * e11 * e11;
    return 0.5 * lp2m * e11 * e11 + lambda * e11 * e22 + 0.5 * lp2m * e22 * e22;
}

double wdlin_anisotropic_2d(const Mat2& eps, const Vec2& n, const ElasticityTensor2& c) {
    require_symmetric<2>(eps);
    auto rep = check_positive_definite(c);
    if (!rep.pass) throw NotPositiveDefinite(rep.detail);
    CrackFrame2 frame = frame_from_normal(n);
    Mat2 q;
    q.row(0) = frame.t;
    q.row(1) = frame.n;
    ElasticityTensor2 ct = rotate_elasticity_tensor(c, q);
    Mat2 e = q * eps * q.transpose();
    double ett = e(0, 0), enn = e(1, 1);

    double c1111 = ct(0, 0, 0, 0), c1112 = ct(0, 0, 0, 1), c1122 = ct(0, 0, 1, 1);
    double c1212 = ct(0, 1, 0, 1), c1222 = ct(0, 1, 1, 1), c2222 = ct(1, 1, 1, 1);
    double den = c1212 * c2222 - c1222 * c1222;
    double slope = (c1112 * c1222 - c1122 * c1212) / den;
    if (enn > slope * ett) {
        double coeff =
            c1111 - (c1112 * c1112 * c2222 - 2.0 * c1112 * c1122 * c1222 + c1122 * c1122 * c1212) /
                        den;
        return 0.5 * coeff * ett * ett;
    }
    return 0.5 * (c1111 - c1112 * c1112 / c1212) * ett * ett +
           (c1122 - c1112 * c1222 / c1212) * ett * enn +
           0.5 * (c2222 - c1222 * c1222 / c1212) * enn * enn;
}

double wdlin_3d(const Mat3& eps, const Vec3& n, const ElasticityTensor3& c) {
    require_symmetric<3>(eps);
    auto rep = check_positive_definite(c);
    if (!rep.pass) throw NotPositiveDefinite(rep.detail);
    CrackFrame3 frame = frame_from_normal(n);
    Mat3 q;
    q.row(0) = frame.t1;
    q.row(1) = frame.t2;
    q.row(2) = frame.n;
    ElasticityTensor3 ct = rotate_elasticity_tensor(c, q);
    Mat3 e = q * eps * q.transpose();

    Mat3 m3;
    m3 << ct(0, 2, 0, 2), ct(0, 2, 1, 2), ct(0, 2, 2, 2),
        ct(0, 2, 1, 2), ct(1, 2, 1, 2), ct(1, 2, 2, 2),
        ct(0, 2, 2, 2), ct(1, 2, 2, 2), ct(2, 2, 2, 2);
    Mat3 rhs3;
    rhs3 << ct(0, 0, 0, 2), ct(0, 1, 0, 2), ct(0, 2, 1, 1),
        ct(0, 0, 1, 2), ct(0, 1, 1, 2), ct(1, 1, 1, 2),
        ct(0, 0, 2, 2), ct(0, 1, 2, 2), ct(1, 1, 2, 2);
    Eigen::LDLT<Mat3> ldlt3(m3);
    if (ldlt3.info() != Eigen::Success || !ldlt3.isPositive())
        throw SingularSystem("shear-normal block of the elasticity tensor is singular");
    Mat3 grads = ldlt3.solve(Mat3(-rhs3));  // rows: grad A13*, A23*, A33*

    Vec3 bar(e(0, 0), 2.0 * e(0, 1), e(1, 1));
    Vec3 u = grads * bar;

    Mat3 estar;
    if (e(2, 2) >= u[2]) {
        estar << e(0, 0), e(0, 1), 0.5 * u[0],
            e(0, 1), e(1, 1), 0.5 * u[1],
            0.5 * u[0], 0.5 * u[1], u[2];
    } else {
        Mat2 m2;
        m2 << ct(0, 2, 0, 2), ct(0, 2, 1, 2), ct(0, 2, 1, 2), ct(1, 2, 1, 2);
        Eigen::Matrix<double, 2, 4> rhs2;
        rhs2 << ct(0, 0, 0, 2), ct(0, 1, 0, 2), ct(0, 2, 1, 1), ct(0, 2, 2, 2),
            ct(0, 0, 1, 2), ct(0, 1, 1, 2), ct(1, 1, 1, 2), ct(1, 2, 2, 2);
        Eigen::LDLT<Mat2> ldlt2(m2);
        if (ldlt2.info() != Eigen::Success || !ldlt2.isPositive())
            throw SingularSystem("shear block of the elasticity tensor is singular");
        Eigen::Matrix<double, 2, 4> grads2 = ldlt2.solve(Eigen::Matrix<double, 2, 4>(-rhs2));
        Eigen::Vector4d hat(e(0, 0), 2.0 * e(0, 1), e(1, 1), e(2, 2));
        Eigen::Vector2d v = grads2 * hat;
        estar << e(0, 0), e(0, 1), 0.5 * v[0],
            e(0, 1), e(1, 1), 0.5 * v[1],
            0.5 * v[0], 0.5 * v[1], e(2, 2);
    }
    return 0.5 * ct.quad(estar);
}

double wdlin_3d(const Mat3& eps, const Vec3& n, double mu, double lambda) {
    require_symmetric<3>(eps);
    CrackFrame3 frame = frame_from_normal(n);
    Mat3 q;
    q.row(0) = frame.t1;
    q.row(1) = frame.t2;
    q.row(2) = frame.n;
    Mat3 e = q * eps * q.transpose();
    double lp2m = lambda + 2.0 * mu;
    double e11 = e(0, 0), e22 = e(1, 1), e33 = e(2, 2), e12 = e(0, 1);
    if (e33 >= -lambda / lp2m * (e11 + e22)) {
        double diag = lp2m - lambda * lambda / lp2m;
        double cross = lambda - lambda * lambda / lp2m;
        return 0.5 * diag * (e11 * e11 + e22 * e22) + cross * e11 * e22 + 2.0 * mu * e12 * e12;
    }
    return 0.5 * lp2m * (e11 * e11 + e22 * e22 + e33 * e33) +
           lambda * (e11 * e22 + e11 * e33 + e22 * e33) + 2.0 * mu * e12 * e12;
}

CrackTraction wdlin_traction_3d(const Mat3& eps, const Vec3& n, double mu, double lambda) {
    require_symmetric<3>(eps);
    CrackFrame3 frame = frame_from_normal(n);
    Mat3 q;
    q.row(0) = frame.t1;
    q.row(1) = frame.t2;
    q.row(2) = frame.n;
    Mat3 e = q * eps * q.transpose();
    double lp2m = lambda + 2.0 * mu;
    CrackTraction t;
    if (e(2, 2) >= -lambda / lp2m * (e(0, 0) + e(1, 1))) return t;  // open: traction-free
    t.normal = lambda * (e(0, 0) + e(1, 1)) + lp2m * e(2, 2);      // intact normal stress
    return t;
}

}  // namespace qrpf
