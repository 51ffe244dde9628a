#ifndef QRPF_KINEMATICS_HPP
#define QRPF_KINEMATICS_HPP

#include <Eigen/Dense>

#include "qrpf/errors.hpp"

namespace qrpf {

using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Default numerical tolerances for kinematic checks. All overridable per call.
struct Tolerances {
    double frame_orthonormal = 1e-12;  ///< orthonormality of crack frames
    double unit_norm = 1e-8;           ///< |n| = 1 pre-check in frame_from_normal
    double rotation = 1e-12;           ///< R^T R = I, det R = 1
};

/// Orthonormal basis {t, n} attached to a crack with reference normal n.
struct CrackFrame2 {
    Vec2 t;
    Vec2 n;
};

/// Orthonormal basis {t1, t2, n}, right-handed (t1 x t2 = n).
struct CrackFrame3 {
    Vec3 t1;
    Vec3 t2;
    Vec3 n;
};

/// Upper-triangular coefficients of F = R A in a crack frame (2D).
/// A = a_tt t(x)t + a_nn n(x)n + a_tn t(x)n, diagonal entries positive.
struct TriangularFactor2 {
    double a_tt;
    double a_nn;
    double a_tn;
};

/// Upper-triangular coefficients of F = R A in a crack frame (3D).
struct TriangularFactor3 {
    double a_t1t1;
    double a_t2t2;
    double a_nn;
    double a_t1n;
    double a_t2n;
    double a_t1t2;
};

struct QrResult2 {
    Mat2 rotation;
    TriangularFactor2 factor;
};

struct QrResult3 {
    Mat3 rotation;
    TriangularFactor3 factor;
};

/// Assemble the ambient matrix of a triangular factor in its frame.
Mat2 frame_matrix(const TriangularFactor2& a, const CrackFrame2& frame);
Mat3 frame_matrix(const TriangularFactor3& a, const CrackFrame3& frame);

bool is_rotation(const Mat2& r, double tol = 1e-12);
bool is_rotation(const Mat3& r, double tol = 1e-12);

/// Unique decomposition F = R A with R a rotation and A upper triangular in
/// the given frame with positive diagonal. Modified Gram-Schmidt with one
/// re-orthogonalization pass on the columns of F expressed in the frame.
/// Throws NonPositiveDeterminant / DegenerateFrame.
QrResult2 qr_in_frame(const Mat2& f, const CrackFrame2& frame, const Tolerances& tol = {});
QrResult3 qr_in_frame(const Mat3& f, const CrackFrame3& frame, const Tolerances& tol = {});

/// Normal stretch coefficient A_nn = 1 / |F^{-T} n| without a full decomposition.
double a_nn(const Mat2& f, const Vec2& n);
double a_nn(const Mat3& f, const Vec3& n);

/// Frame with tangent t = (n2, -n1); the rotation (t n) rows maps n to e2.
CrackFrame2 frame_from_normal(const Vec2& n, const Tolerances& tol = {});

/// Frame from the tangent construction
///   t1 = (n1 n3, n2 n3, -(n1^2+n2^2)) / s,  t2 = (-n2, n1, 0) / s,
/// with s = sqrt(n1^2+n2^2); t2 is oriented so that t1 x t2 = n. For n within
/// 1e-8 of +-e3 the construction degenerates and the canonical frame
/// (e1, e2, e3) is returned instead (the normal is snapped to e3; effective
/// energies are invariant under n -> -n so the snap is immaterial).
CrackFrame3 frame_from_normal(const Vec3& n, const Tolerances& tol = {});

}  // namespace qrpf

#endif
