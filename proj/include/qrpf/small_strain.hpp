#ifndef QRPF_SMALL_STRAIN_HPP
#define QRPF_SMALL_STRAIN_HPP

#include <string>

#include "qrpf/constitutive.hpp"
#include "qrpf/kinematics.hpp"

namespace qrpf {

/// Fourth-order elasticity tensor with minor and major symmetries,
/// c_ijkl = c_jikl = c_ijlk = c_klij. Stored fully expanded; `set` writes all
/// symmetry-equivalent slots so construction cannot break the symmetries.
template <int N>
class ElasticityTensor {
  public:
    ElasticityTensor() { std::fill(&c_[0][0][0][0], &c_[0][0][0][0] + N * N * N * N, 0.0); }

    static ElasticityTensor isotropic(double mu, double lambda) {
        ElasticityTensor t;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k)
                    for (int l = 0; l < N; ++l)
                        t.c_[i][j][k][l] = lambda * (i == j) * (k == l) +
                                           mu * ((i == k) * (j == l) + (i == l) * (j == k));
        return t;
    }

    double operator()(int i, int j, int k, int l) const { return c_[i][j][k][l]; }

    void set(int i, int j, int k, int l, double v) {
        for (auto [a, b] : {std::pair{i, j}, {j, i}})
            for (auto [c, d] : {std::pair{k, l}, {l, k}}) {
                c_[a][b][c][d] = v;
                c_[c][d][a][b] = v;
            }
    }

    /// Quadratic form sum_ijkl c_ijkl e_ij e_kl.
    double quad(const Eigen::Matrix<double, N, N>& e) const {
        double s = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k)
                    for (int l = 0; l < N; ++l) s += c_[i][j][k][l] * e(i, j) * e(k, l);
        return s;
    }

  private:
    double c_[N][N][N][N];
};

using ElasticityTensor2 = ElasticityTensor<2>;
using ElasticityTensor3 = ElasticityTensor<3>;

/// Tensor transformation rule c~_ijkl = q_ip q_jq q_kr q_ls c_pqrs; the rows
/// of q are the new basis vectors in the old coordinates.
ElasticityTensor2 rotate_elasticity_tensor(const ElasticityTensor2& c, const Mat2& q);
ElasticityTensor3 rotate_elasticity_tensor(const ElasticityTensor3& c, const Mat3& q);

struct PosDefReport {
    bool pass = false;
    double min_eigenvalue = 0.0;  ///< of the Mandel matrix on symmetric strains
    double c_tntn = 0.0;          ///< shear-normal modulus (c1212 / c1313)
    double shear_normal_det = 0.0;       ///< c1212 c2222 - c1222^2 (3D: the 1313/3333 analogue)
    std::string detail;
};

/// Positive definiteness on symmetric matrices (eigenvalues of the Mandel
/// matrix) together with the two derived inequalities used by the linearized
/// relaxation formulas.
PosDefReport check_positive_definite(const ElasticityTensor2& c);
PosDefReport check_positive_definite(const ElasticityTensor3& c);

/// Linearized effective energy, isotropic 2D closed form. The strain is
/// rotated into the crack frame; the open branch keeps only the tangential
/// stretch energy after relaxing the normal stretch and the shear.
double wdlin_isotropic_2d(const Mat2& eps, const Vec2& n, double mu, double lambda);

/// Anisotropic 2D formula in the rotated elasticity coefficients; reduces to
/// the isotropic closed form when c is isotropic.
double wdlin_anisotropic_2d(const Mat2& eps, const Vec2& n, const ElasticityTensor2& c);

/// 3D: solves the two small linear systems for the relaxed coefficient
/// gradients, selects the branch by eps_nn against the relaxed normal strain,
/// and evaluates the quadratic.
double wdlin_3d(const Mat3& eps, const Vec3& n, const ElasticityTensor3& c);

/// 3D isotropic closed form.
double wdlin_3d(const Mat3& eps, const Vec3& n, double mu, double lambda);

/// Crack-face traction of the linearized effective energy (isotropic 3D):
/// zero shear; normal component zero on the open branch and equal to the
/// intact normal stress on the closed branch.
CrackTraction wdlin_traction_3d(const Mat3& eps, const Vec3& n, double mu, double lambda);

}  // namespace qrpf

#endif
