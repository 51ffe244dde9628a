#include "qrpf/kinematics.hpp"

#include <cmath>

namespace qrpf {

namespace {

template <typename Mat>
bool frame_orthonormal(const Mat& basis, double tol) {
    Mat gram = basis.transpose() * basis;
    return (gram - Mat::Identity()).cwiseAbs().maxCoeff() <= tol;
}

// MGS with a second pass; columns of m become orthonormal q, coefficients in r.
template <int N>
void modified_gram_schmidt(Eigen::Matrix<double, N, N>& m, Eigen::Matrix<double, N, N>& r) {
    r.setZero();
    for (int j = 0; j < N; ++j) {
        auto col = m.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < j; ++i) {
                double proj = m.col(i).dot(col);
                r(i, j) += proj;
                col -= proj * m.col(i);
            }
        }
        r(j, j) = col.norm();
        col /= r(j, j);
    }
}

}  // namespace

Mat2 frame_matrix(const TriangularFactor2& a, const CrackFrame2& frame) {
    return a.a_tt * frame.t * frame.t.transpose() + a.a_nn * frame.n * frame.n.transpose() +
           a.a_tn * frame.t * frame.n.transpose();
}

Mat3 frame_matrix(const TriangularFactor3& a, const CrackFrame3& frame) {
    return a.a_t1t1 * frame.t1 * frame.t1.transpose() + a.a_t2t2 * frame.t2 * frame.t2.transpose() +
           a.a_nn * frame.n * frame.n.transpose() + a.a_t1n * frame.t1 * frame.n.transpose() +
           a.a_t2n * frame.t2 * frame.n.transpose() + a.a_t1t2 * frame.t1 * frame.t2.transpose();
}

bool is_rotation(const Mat2& r, double tol) {
    return (r.transpose() * r - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(r.determinant() - 1.0) <= tol;
}

bool is_rotation(const Mat3& r, double tol) {
    return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(r.determinant() - 1.0) <= tol;
}

QrResult2 qr_in_frame(const Mat2& f, const CrackFrame2& frame, const Tolerances& tol) {
    double det = f.determinant();
    if (!(det > 0.0) || !f.allFinite()) throw NonPositiveDeterminant(det);
    Mat2 basis;
    basis.col(0) = frame.t;
    basis.col(1) = frame.n;
    if (!frame_orthonormal(basis, tol.frame_orthonormal))
        throw DegenerateFrame("crack frame is not orthonormal");

    Mat2 m = f * basis;  // columns F t, F n
    Mat2 r;
    modified_gram_schmidt<2>(m, r);
    QrResult2 out;
    out.rotation = m * basis.transpose();
    out.factor = TriangularFactor2{r(0, 0), r(1, 1), r(0, 1)};
    return out;
}

QrResult3 qr_in_frame(const Mat3& f, const CrackFrame3& frame, const Tolerances& tol) {
    double det = f.determinant();
    if (!(det > 0.0) || !f.allFinite()) throw NonPositiveDeterminant(det);
    Mat3 basis;
    basis.col(0) = frame.t1;
    basis.col(1) = frame.t2;
    basis.col(2) = frame.n;
    if (!frame_orthonormal(basis, tol.frame_orthonormal))
        throw DegenerateFrame("crack frame is not orthonormal");

    Mat3 m = f * basis;  // columns F t1, F t2, F n
    Mat3 r;
    modified_gram_schmidt<3>(m, r);
    QrResult3 out;
    out.rotation = m * basis.transpose();
    out.factor = TriangularFactor3{r(0, 0), r(1, 1), r(2, 2), r(0, 2), r(1, 2), r(0, 1)};
    return out;
}

double a_nn(const Mat2& f, const Vec2& n) {
    double det = f.determinant();
    if (!(det > 0.0) || !f.allFinite()) throw NonPositiveDeterminant(det);
    Vec2 w = f.transpose().partialPivLu().solve(n);
    return 1.0 / w.norm();
}

double a_nn(const Mat3& f, const Vec3& n) {
    double det = f.determinant();
    if (!(det > 0.0) || !f.allFinite()) throw NonPositiveDeterminant(det);
    Vec3 w = f.transpose().partialPivLu().solve(n);
    return 1.0 / w.norm();
}

CrackFrame2 frame_from_normal(const Vec2& n, const Tolerances& tol) {
    double norm = n.norm();
    if (std::abs(norm - 1.0) > tol.unit_norm) throw NotUnit(norm);
    Vec2 nn = n / norm;
    return CrackFrame2{Vec2(nn.y(), -nn.x()), nn};
}

CrackFrame3 frame_from_normal(const Vec3& n, const Tolerances& tol) {
    double norm = n.norm();
    if (std::abs(norm - 1.0) > tol.unit_norm) throw NotUnit(norm);
    Vec3 nn = n / norm;
    double s = std::hypot(nn.x(), nn.y());
    if (s <= 1e-8) {
        return CrackFrame3{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    }
    Vec3 t1(nn.x() * nn.z() / s, nn.y() * nn.z() / s, -s);
    Vec3 t2(-nn.y() / s, nn.x() / s, 0.0);
    return CrackFrame3{t1, t2, nn};
}

}  // namespace qrpf
