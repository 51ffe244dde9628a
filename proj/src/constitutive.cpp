#include "qrpf/constitutive.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "qrpf/optim.hpp"

namespace qrpf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(const MaterialModel& model, int dim) {
    if (model.dim != dim)
        throw DimensionMismatch("material is " + std::to_string(model.dim) + "D, input is " +
                                std::to_string(dim) + "D");
}

template <typename Mat>
double check_det(const Mat& f) {
    double det = f.determinant();
    if (!(det > 0.0) || !f.allFinite()) throw NonPositiveDeterminant(det);
    return det;
}

// ---- intact energies; the unchecked variants return +inf outside det > 0 ----

double w_unchecked(const MaterialModel& m, const Mat2& f) {
    double det = f.determinant();
    if (!(det > 0.0)) return kInf;
    switch (m.family) {
        case EnergyFamily::NeoHookean2D:
            return 0.5 * m.mu * (f.squaredNorm() - 2.0 - 2.0 * std::log(det)) +
                   0.5 * m.lambda * (det - 1.0) * (det - 1.0);
        case EnergyFamily::PQEnergy2D: {
            double nf = f.norm();
            double c = std::pow(2.0, 0.5 * m.p);
            return m.mu1 / m.p * (std::pow(nf, m.p) - c - 0.5 * c * m.p * std::log(det)) +
                   0.5 * m.lambda_bar * (det - 1.0) * (det - 1.0);
        }
        case EnergyFamily::UserSupplied:
            return m.user_energy(Eigen::MatrixXd(f));
        default:
            throw DimensionMismatch("3D energy family evaluated on a 2x2 matrix");
    }
}

double w_unchecked(const MaterialModel& m, const Mat3& f) {
    double det = f.determinant();
    if (!(det > 0.0)) return kInf;
    switch (m.family) {
        case EnergyFamily::MooneyRivlin3D: {
            Mat3 cof = det * f.inverse().transpose();
            return 0.5 * m.mu1 * (f.squaredNorm() - 2.0 * std::log(det) - 3.0) +
                   0.5 * m.mu2 * (cof.squaredNorm() - 4.0 * std::log(det) - 3.0) +
                   0.5 * m.lambda_bar * (det - 1.0) * (det - 1.0);
        }
        case EnergyFamily::PQEnergy3D: {
            Mat3 cof = det * f.inverse().transpose();
            double cp = std::pow(3.0, 0.5 * m.p);
            double cq = std::pow(3.0, 0.5 * m.q);
            return m.mu1 / m.p *
                       (std::pow(f.norm(), m.p) - cp - cp / 3.0 * m.p * std::log(det)) +
                   m.mu2 / m.q *
                       (std::pow(cof.norm(), m.q) - cq - 2.0 * cq / 3.0 * m.q * std::log(det)) +
                   0.5 * m.lambda_bar * (det - 1.0) * (det - 1.0);
        }
        case EnergyFamily::UserSupplied:
            return m.user_energy(Eigen::MatrixXd(f));
        default:
            throw DimensionMismatch("2D energy family evaluated on a 3x3 matrix");
    }
}

template <typename Mat>
Mat fd_stress(const std::function<double(const Mat&)>& w, const Mat& f) {
    const double h = 1e-6 * std::max(1.0, f.norm());
    Mat p;
    for (int i = 0; i < Mat::RowsAtCompileTime; ++i)
        for (int j = 0; j < Mat::ColsAtCompileTime; ++j) {
            Mat fp = f, fm = f;
            fp(i, j) += h;
            fm(i, j) -= h;
            p(i, j) = (w(fp) - w(fm)) / (2.0 * h);
        }
    return p;
}

Mat2 stress_unchecked(const MaterialModel& m, const Mat2& f) {
    double det = f.determinant();
    Mat2 finv_t = f.inverse().transpose();
    switch (m.family) {
        case EnergyFamily::NeoHookean2D:
            return m.mu * (f - finv_t) + m.lambda * (det - 1.0) * det * finv_t;
        case EnergyFamily::PQEnergy2D: {
            double nf = f.norm();
            double c = std::pow(2.0, 0.5 * m.p - 1.0);
            return m.mu1 * (std::pow(nf, m.p - 2.0) * f - c * finv_t) +
                   m.lambda_bar * (det - 1.0) * det * finv_t;
        }
        case EnergyFamily::UserSupplied:
            return fd_stress<Mat2>([&m](const Mat2& g) { return w_unchecked(m, g); }, f);
        default:
            throw DimensionMismatch("3D energy family evaluated on a 2x2 matrix");
    }
}

Mat3 stress_unchecked(const MaterialModel& m, const Mat3& f) {
    double det = f.determinant();
    Mat3 finv_t = f.inverse().transpose();
    switch (m.family) {
        case EnergyFamily::MooneyRivlin3D: {
            double ncof2 = det * det * finv_t.squaredNorm();
            Mat3 k = finv_t * f.inverse() * finv_t;
            return m.mu1 * (f - finv_t) +
                   m.mu2 * (ncof2 * finv_t - det * det * k - 2.0 * finv_t) +
                   m.lambda_bar * (det - 1.0) * det * finv_t;
        }
        case EnergyFamily::PQEnergy3D: {
            double ncof2 = det * det * finv_t.squaredNorm();
            double ncof = std::sqrt(ncof2);
            Mat3 k = finv_t * f.inverse() * finv_t;
            double cp = std::pow(3.0, 0.5 * m.p - 1.0);
            double cq = std::pow(3.0, 0.5 * m.q - 1.0);
            return m.mu1 * (std::pow(f.norm(), m.p - 2.0) * f - cp * finv_t) +
                   m.mu2 * (std::pow(ncof, m.q - 2.0) * (ncof2 * finv_t - det * det * k) -
                            2.0 * cq * finv_t) +
                   m.lambda_bar * (det - 1.0) * det * finv_t;
        }
        case EnergyFamily::UserSupplied:
            return fd_stress<Mat3>([&m](const Mat3& g) { return w_unchecked(m, g); }, f);
        default:
            throw DimensionMismatch("2D energy family evaluated on a 3x3 matrix");
    }
}

double w_diag2(const MaterialModel& m, double a, double b) {
    Mat2 f = Mat2::Zero();
    f(0, 0) = a;
    f(1, 1) = b;
    return w_unchecked(m, f);
}

Mat3 tri3(double a11, double a22, double a33, double a12) {
    Mat3 f = Mat3::Zero();
    f(0, 0) = a11;
    f(1, 1) = a22;
    f(2, 2) = a33;
    f(0, 1) = a12;
    return f;
}

Vec2 unit_normal(const Vec2& n) {
    double norm = n.norm();
    if (std::abs(norm - 1.0) > 1e-8) throw NotUnit(norm);
    return n / norm;
}

Vec3 unit_normal(const Vec3& n) {
    double norm = n.norm();
    if (std::abs(norm - 1.0) > 1e-8) throw NotUnit(norm);
    return n / norm;
}

// ---- generic relaxation (Prop-style multiplicative parametrization) ----
//
// Coordinates x = (a_nn'', a_t1n'' [, a_t2n'']); the trial deformation is
// F (I + (x0 - 1) n(x)n + x1 t1(x)n [+ x2 t2(x)n]).

template <typename Mat, typename Vec>
struct GenericProblem {
    const MaterialModel& model;
    Mat f;
    Mat dn;                  // n (x) n
    std::array<Mat, 2> dt;   // t_i (x) n
    int shears;              // 1 in 2D, 2 in 3D

    Mat assemble(const Eigen::VectorXd& x) const {
        Mat m = Mat::Identity() + (x[0] - 1.0) * dn;
        for (int i = 0; i < shears; ++i) m += x[i + 1] * dt[i];
        return f * m;
    }

    double operator()(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
        Mat fm = assemble(x);
        double w = w_unchecked(model, fm);
        if (grad) {
            if (!std::isfinite(w)) {
                grad->setConstant(kInf);
                return w;
            }
            if (model.family == EnergyFamily::UserSupplied) {
                for (int i = 0; i < shears + 1; ++i) {
                    double h = 1e-7 * std::max(1.0, std::abs(x[i]));
                    Eigen::VectorXd xp = x, xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    (*grad)[i] =
                        (w_unchecked(model, assemble(xp)) - w_unchecked(model, assemble(xm))) /
                        (2.0 * h);
                }
            } else {
                Mat p = stress_unchecked(model, fm);
                (*grad)[0] = p.cwiseProduct(f * dn).sum();
                for (int i = 0; i < shears; ++i)
                    (*grad)[i + 1] = p.cwiseProduct(f * dt[i]).sum();
            }
        }
        return w;
    }
};

double relaxation_gradient_tol(const MaterialModel& model) {
    // FD gradients of a user energy carry ~1e-9 cancellation noise; the
    // analytic built-in gradients reach 1e-10 and beyond.
    return model.family == EnergyFamily::UserSupplied ? 3e-8 : 1e-10;
}

template <typename Obj>
optim::MinimizeResult run_relaxation(const Obj& obj, const Eigen::VectorXd& x0, bool with_normal,
                                     double gradient_tol) {
    optim::BfgsOptions opts;
    opts.max_iterations = 200;
    opts.gradient_tol = gradient_tol;
    if (with_normal) {
        opts.box0 = true;
        opts.lo0 = 1e-6;
        opts.hi0 = 1e3;
    }
    Eigen::VectorXd g0(x0.size());
    obj(x0, &g0);
    opts.gradient_scale = std::max(1.0, g0.lpNorm<Eigen::Infinity>());

    auto acceptable = [&](const optim::MinimizeResult& r) {
        if (r.status == optim::Status::Converged) return true;
        // stalled at the floating-point floor with a near-converged gradient
        return r.gradient_norm <= 1e4 * gradient_tol * opts.gradient_scale;
    };

    auto res = optim::minimize_bfgs(obj, x0, opts);
    if (acceptable(res)) return res;
    // jittered restarts on failure
    std::mt19937 rng(0x9e3779b9u);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    for (int attempt = 0; attempt < 5; ++attempt) {
        Eigen::VectorXd xs = x0;
        for (int i = 0; i < xs.size(); ++i) xs[i] += jitter(rng);
        if (with_normal) xs[0] = std::max(xs[0], 1e-3);
        auto retry = optim::minimize_bfgs(obj, xs, opts);
        if (acceptable(retry)) return retry;
        if (retry.value < res.value) res = retry;
    }
    throw RelaxationDiverged("inner relaxation did not converge: gradient norm " +
                             std::to_string(res.gradient_norm));
}

// Relaxation outcome plus the minimizing multiplicative factor: the minimizer
// of the trial energy is Y = F M with Wd = W(Y).
template <typename Mat>
struct RelaxDetail {
    double energy;
    Branch branch;
    double threshold;
    Mat y;
    Mat m;
};

RelaxDetail<Mat2> relax_generic2(const MaterialModel& model, const Mat2& f, const Vec2& n) {
    check_det(f);
    Vec2 nn = unit_normal(n);
    CrackFrame2 frame = frame_from_normal(nn);
    GenericProblem<Mat2, Vec2> prob{model, f, nn * nn.transpose(),
                                    {frame.t * nn.transpose(), Mat2::Zero()}, 1};

    Eigen::VectorXd x0(2);
    x0 << 1.0, 0.0;
    const double gtol = relaxation_gradient_tol(model);
    auto open = run_relaxation(std::cref(prob), x0, true, gtol);
    double ann = a_nn(f, nn);
    double threshold = ann * open.x[0];

    RelaxDetail<Mat2> out;
    out.threshold = threshold;
    if (open.x[0] <= 1.0 + 1e-12) {
        out.branch = Branch::Open;
        out.energy = open.value;
        out.m = Mat2::Identity() + (open.x[0] - 1.0) * prob.dn + open.x[1] * prob.dt[0];
    } else {
        out.branch = Branch::Closed;
        // shear-only relaxation with the normal coordinate pinned at 1
        auto obj = [&](const Eigen::VectorXd& s, Eigen::VectorXd* grad) {
            Eigen::VectorXd x(2);
            x << 1.0, s[0];
            if (!grad) return prob(x, nullptr);
            Eigen::VectorXd g(2);
            double w = prob(x, &g);
            (*grad)[0] = g[1];
            return w;
        };
        auto closed = run_relaxation(obj, Eigen::VectorXd::Zero(1), false, gtol);
        out.energy = closed.value;
        out.m = Mat2::Identity() + closed.x[0] * prob.dt[0];
    }
    out.y = f * out.m;
    return out;
}

RelaxDetail<Mat3> relax_generic3(const MaterialModel& model, const Mat3& f, const Vec3& n) {
    check_det(f);
    Vec3 nn = unit_normal(n);
    CrackFrame3 frame = frame_from_normal(nn);
    GenericProblem<Mat3, Vec3> prob{
        model, f, nn * nn.transpose(),
        {frame.t1 * nn.transpose(), frame.t2 * nn.transpose()}, 2};

    Eigen::VectorXd x0(3);
    x0 << 1.0, 0.0, 0.0;
    const double gtol = relaxation_gradient_tol(model);
    auto open = run_relaxation(std::cref(prob), x0, true, gtol);
    double ann = a_nn(f, nn);
    double threshold = ann * open.x[0];

    RelaxDetail<Mat3> out;
    out.threshold = threshold;
    if (open.x[0] <= 1.0 + 1e-12) {
        out.branch = Branch::Open;
        out.energy = open.value;
        out.m = Mat3::Identity() + (open.x[0] - 1.0) * prob.dn + open.x[1] * prob.dt[0] +
                open.x[2] * prob.dt[1];
    } else {
        out.branch = Branch::Closed;
        auto obj = [&](const Eigen::VectorXd& s, Eigen::VectorXd* grad) {
            Eigen::VectorXd x(3);
            x << 1.0, s[0], s[1];
            if (!grad) return prob(x, nullptr);
            Eigen::VectorXd g(3);
            double w = prob(x, &g);
            (*grad)[0] = g[1];
            (*grad)[1] = g[2];
            return w;
        };
        auto closed = run_relaxation(obj, Eigen::VectorXd::Zero(2), false, gtol);
        out.energy = closed.value;
        out.m = Mat3::Identity() + closed.x[0] * prob.dt[0] + closed.x[1] * prob.dt[1];
    }
    out.y = f * out.m;
    return out;
}

// ---- family-specific relaxation ----

// Closed/semi-closed 2D path. Everything follows from the in-frame QR data
// a11 = |F t|, a22 = det F / a11, a12 = (F t).(F n) / a11 and the relaxed
// normal stretch b: the minimizer is Y = a11 q1 t^T + b q2 n^T with q1, q2
// the Gram-Schmidt directions, and the multiplicative factor is
// M = t t^T + (b / a22) n n^T - (a12 b / (a11 a22)) t n^T.
RelaxDetail<Mat2> relax2(const MaterialModel& model, const Mat2& f, const Vec2& n) {
    if (model.family == EnergyFamily::UserSupplied) return relax_generic2(model, f, n);
    double det = check_det(f);
    Vec2 nn = unit_normal(n);
    Vec2 t(nn.y(), -nn.x());
    Vec2 ft = f * t;
    Vec2 fn = f * nn;
    const double a11 = ft.norm();
    const double a22 = det / a11;
    const double a12 = ft.dot(fn) / a11;
    double thr = a22_star(model, a11);
    RelaxDetail<Mat2> out;
    out.threshold = thr;
    out.branch = (a22 >= thr) ? Branch::Open : Branch::Closed;
    double b = (out.branch == Branch::Open) ? thr : a22;
    out.energy = w_diag2(model, a11, b);
    Vec2 q1 = ft / a11;
    Vec2 q2 = (fn - a12 * q1) / a22;
    out.y = a11 * q1 * t.transpose() + b * q2 * nn.transpose();
    out.m = t * t.transpose() + (b / a22) * nn * nn.transpose() -
            (a12 * b / (a11 * a22)) * t * nn.transpose();
    return out;
}

RelaxDetail<Mat3> relax3(const MaterialModel& model, const Mat3& f, const Vec3& n) {
    if (model.family == EnergyFamily::UserSupplied) return relax_generic3(model, f, n);
    check_det(f);
    Vec3 nn = unit_normal(n);
    CrackFrame3 frame = frame_from_normal(nn);
    QrResult3 qr = qr_in_frame(f, frame);
    const double a11 = qr.factor.a_t1t1, a22 = qr.factor.a_t2t2, a33 = qr.factor.a_nn;
    const double a12 = qr.factor.a_t1t2;
    double thr = a33_star(model, a11, a22, a12);
    RelaxDetail<Mat3> out;
    out.threshold = thr;
    out.branch = (a33 >= thr) ? Branch::Open : Branch::Closed;
    double b = (out.branch == Branch::Open) ? thr : a33;
    out.energy = w_unchecked(model, tri3(a11, a22, b, a12));
    Mat3 amat = frame_matrix(qr.factor, frame);
    Mat3 abar = frame_matrix(TriangularFactor3{a11, a22, b, 0.0, 0.0, a12}, frame);
    out.m = amat.inverse() * abar;
    out.y = qr.rotation * abar;
    return out;
}

template <typename Detail, typename Result, typename Frame>
Result pack_result(const Detail& det, const Frame& frame) {
    Result res;
    res.energy = det.energy;
    res.branch = det.branch;
    res.a_nn_threshold = det.threshold;
    res.a_star = qr_in_frame(det.y, frame).factor;
    return res;
}

}  // namespace

// ---- MaterialModel factories ----

MaterialModel MaterialModel::neo_hookean_2d(double mu, double lambda, double g_c) {
    if (!(mu > 0.0) || !(lambda >= 0.0) || !(g_c > 0.0))
        throw InvalidMaterial("neo-Hookean 2D requires mu > 0, lambda >= 0, g_c > 0");
    MaterialModel m;
    m.family = EnergyFamily::NeoHookean2D;
    m.dim = 2;
    m.mu = mu;
    m.lambda = lambda;
    m.g_c = g_c;
    return m;
}

MaterialModel MaterialModel::mooney_rivlin_3d(double mu1, double mu2, double lambda_bar,
                                              double g_c) {
    if (!(mu1 > 0.0) || !(mu2 > 0.0) || !(lambda_bar > 0.0) || !(g_c > 0.0))
        throw InvalidMaterial("Mooney-Rivlin requires positive moduli");
    MaterialModel m;
    m.family = EnergyFamily::MooneyRivlin3D;
    m.dim = 3;
    m.mu1 = mu1;
    m.mu2 = mu2;
    m.lambda_bar = lambda_bar;
    m.g_c = g_c;
    return m;
}

MaterialModel MaterialModel::pq_2d(double mu_bar, double lambda_bar, double p, double g_c) {
    if (!(mu_bar > 0.0) || !(lambda_bar > 0.0) || !(p >= 1.0) || !(g_c > 0.0))
        throw InvalidMaterial("(p,q) 2D energy requires positive moduli and p >= 1");
    MaterialModel m;
    m.family = EnergyFamily::PQEnergy2D;
    m.dim = 2;
    m.mu1 = mu_bar;
    m.lambda_bar = lambda_bar;
    m.p = p;
    m.g_c = g_c;
    return m;
}

MaterialModel MaterialModel::pq_3d(double mu1, double mu2, double lambda_bar, double p, double q,
                                   double g_c) {
    if (!(mu1 > 0.0) || !(mu2 > 0.0) || !(lambda_bar > 0.0) || !(p >= 1.0) || !(q >= 1.0) ||
        !(g_c > 0.0))
        throw InvalidMaterial("(p,q) 3D energy requires positive moduli and p, q >= 1");
    MaterialModel m;
    m.family = EnergyFamily::PQEnergy3D;
    m.dim = 3;
    m.mu1 = mu1;
    m.mu2 = mu2;
    m.lambda_bar = lambda_bar;
    m.p = p;
    m.q = q;
    m.g_c = g_c;
    return m;
}

MaterialModel MaterialModel::user_supplied(int dim,
                                           std::function<double(const Eigen::MatrixXd&)> w,
                                           double g_c) {
    if (dim != 2 && dim != 3) throw InvalidMaterial("user energy must be 2D or 3D");
    if (!w) throw InvalidMaterial("user energy callable is empty");
    MaterialModel m;
    m.family = EnergyFamily::UserSupplied;
    m.dim = dim;
    m.g_c = g_c;
    m.user_energy = std::move(w);
    // probe finiteness on a few admissible states
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd shear = eye;
    shear(0, dim - 1) += 0.1;
    for (const Eigen::MatrixXd& probe : {eye, Eigen::MatrixXd(0.9 * eye),
                                         Eigen::MatrixXd(1.1 * eye), shear}) {
        if (!std::isfinite(m.user_energy(probe)))
            throw InvalidMaterial("user energy is not finite on a probe state");
    }
    return m;
}

// ---- public operations ----

double intact_energy(const MaterialModel& model, const Mat2& f) {
    require_dim(model, 2);
    check_det(f);
    return w_unchecked(model, f);
}

double intact_energy(const MaterialModel& model, const Mat3& f) {
    require_dim(model, 3);
    check_det(f);
    return w_unchecked(model, f);
}

Mat2 intact_stress(const MaterialModel& model, const Mat2& f) {
    require_dim(model, 2);
    check_det(f);
    return stress_unchecked(model, f);
}

Mat3 intact_stress(const MaterialModel& model, const Mat3& f) {
    require_dim(model, 3);
    check_det(f);
    return stress_unchecked(model, f);
}

double a22_star(const MaterialModel& model, double a11) {
    if (!(a11 > 0.0)) throw NonPositive("a22_star requires a11 > 0");
    if (model.family == EnergyFamily::NeoHookean2D) {
        const double mu = model.mu, lam = model.lambda;
        return (lam * a11 + std::sqrt(4.0 * mu * mu + 4.0 * mu * lam * a11 * a11 +
                                      lam * lam * a11 * a11)) /
               (2.0 * (mu + lam * a11 * a11));
    }
    if (model.family == EnergyFamily::PQEnergy2D) {
        double hi = 2.0 * std::max(1.0, 1.0 / a11);
        while (w_diag2(model, a11, hi) < w_diag2(model, a11, 0.5 * hi) && hi < 1e6) hi *= 2.0;
        return optim::minimize_scalar([&](double b) { return w_diag2(model, a11, b); }, 1e-6, hi)
            .x;
    }
    throw DimensionMismatch("a22_star is defined for the 2D families");
}

double a33_star(const MaterialModel& model, double a11, double a22, double a12) {
    if (!(a11 > 0.0) || !(a22 > 0.0)) throw NonPositive("a33_star requires a11, a22 > 0");
    if (model.family == EnergyFamily::MooneyRivlin3D) {
        const double m1 = model.mu1, m2 = model.mu2, lb = model.lambda_bar;
        double den = m1 + m2 * (a11 * a11 + a12 * a12 + a22 * a22) + lb * a11 * a11 * a22 * a22;
        double lnum = lb * a11 * a22;
        return (lnum + std::sqrt(lnum * lnum + 4.0 * den * (m1 + 2.0 * m2))) / (2.0 * den);
    }
    if (model.family == EnergyFamily::PQEnergy3D) {
        auto w = [&](double b) { return w_unchecked(model, tri3(a11, a22, b, a12)); };
        double hi = 2.0 * std::max(1.0, 1.0 / (a11 * a22));
        while (w(hi) < w(0.5 * hi) && hi < 1e6) hi *= 2.0;
        return optim::minimize_scalar(w, 1e-6, hi).x;
    }
    throw DimensionMismatch("a33_star is defined for the 3D families");
}

RelaxationResult2 effective_energy(const MaterialModel& model, const Mat2& f, const Vec2& n) {
    require_dim(model, 2);
    auto det = relax2(model, f, n);
    return pack_result<RelaxDetail<Mat2>, RelaxationResult2>(det,
                                                             frame_from_normal(unit_normal(n)));
}

RelaxationResult3 effective_energy(const MaterialModel& model, const Mat3& f, const Vec3& n) {
    require_dim(model, 3);
    auto det = relax3(model, f, n);
    return pack_result<RelaxDetail<Mat3>, RelaxationResult3>(det,
                                                             frame_from_normal(unit_normal(n)));
}

RelaxationResult2 effective_energy_generic(const MaterialModel& model, const Mat2& f,
                                           const Vec2& n) {
    require_dim(model, 2);
    auto det = relax_generic2(model, f, n);
    return pack_result<RelaxDetail<Mat2>, RelaxationResult2>(det,
                                                             frame_from_normal(unit_normal(n)));
}

RelaxationResult3 effective_energy_generic(const MaterialModel& model, const Mat3& f,
                                           const Vec3& n) {
    require_dim(model, 3);
    auto det = relax_generic3(model, f, n);
    return pack_result<RelaxDetail<Mat3>, RelaxationResult3>(det,
                                                             frame_from_normal(unit_normal(n)));
}

Mat2 effective_stress(const MaterialModel& model, const Mat2& f, const Vec2& n) {
    require_dim(model, 2);
    auto det = relax2(model, f, n);
    return stress_unchecked(model, det.y) * det.m.transpose();
}

Mat3 effective_stress(const MaterialModel& model, const Mat3& f, const Vec3& n) {
    require_dim(model, 3);
    auto det = relax3(model, f, n);
    return stress_unchecked(model, det.y) * det.m.transpose();
}

EffectiveEval effective_eval(const MaterialModel& model, const Mat2& f, const Vec2& n,
                             bool want_stress, bool want_dtheta) {
    require_dim(model, 2);
    auto det = relax2(model, f, n);
    EffectiveEval out;
    out.energy = det.energy;
    if (want_stress) out.stress = stress_unchecked(model, det.y) * det.m.transpose();
    if (want_dtheta) {
        const double h = 1e-6;
        const double c = std::cos(h), s = std::sin(h);
        Vec2 np(c * n.x() - s * n.y(), s * n.x() + c * n.y());
        Vec2 nm(c * n.x() + s * n.y(), -s * n.x() + c * n.y());
        out.denergy_dtheta =
            (relax2(model, f, np).energy - relax2(model, f, nm).energy) / (2.0 * h);
    }
    return out;
}

CrackTraction crack_traction(const MaterialModel& model, const Mat2& f, const Vec2& n) {
    require_dim(model, 2);
    Vec2 nn = unit_normal(n);
    CrackFrame2 frame = frame_from_normal(nn);
    QrResult2 qr = qr_in_frame(f, frame);
    Mat2 reduced = frame_matrix(qr.factor, frame);
    Mat2 td = effective_stress(model, reduced, nn);
    CrackTraction out;
    out.normal = nn.dot(td * nn);
    out.shear_t1 = frame.t.dot(td * nn);
    return out;
}

CrackTraction crack_traction(const MaterialModel& model, const Mat3& f, const Vec3& n) {
    require_dim(model, 3);
    Vec3 nn = unit_normal(n);
    CrackFrame3 frame = frame_from_normal(nn);
    QrResult3 qr = qr_in_frame(f, frame);
    Mat3 reduced = frame_matrix(qr.factor, frame);
    Mat3 td = effective_stress(model, reduced, nn);
    CrackTraction out;
    out.normal = nn.dot(td * nn);
    out.shear_t1 = frame.t1.dot(td * nn);
    out.shear_t2 = frame.t2.dot(td * nn);
    return out;
}

double compatibility_defect(const MaterialModel& model, const TriangularFactor2& a,
                            const CrackFrame2& frame) {
    require_dim(model, 2);
    Mat2 base = frame_matrix(a, frame);
    Mat2 dn = frame.n * frame.n.transpose();
    Mat2 dt = frame.t * frame.n.transpose();
    const double h = 1e-4 * std::max(1.0, base.norm());
    double mixed = (w_unchecked(model, Mat2(base + h * dn + h * dt)) -
                    w_unchecked(model, Mat2(base + h * dn - h * dt)) -
                    w_unchecked(model, Mat2(base - h * dn + h * dt)) +
                    w_unchecked(model, Mat2(base - h * dn - h * dt))) /
                   (4.0 * h * h);
    return std::abs(mixed);
}

double compatibility_defect(const MaterialModel& model, const TriangularFactor3& a,
                            const CrackFrame3& frame) {
    require_dim(model, 3);
    Mat3 base = frame_matrix(a, frame);
    Mat3 dn = frame.n * frame.n.transpose();
    const double h = 1e-4 * std::max(1.0, base.norm());
    double worst = 0.0;
    for (const Vec3& t : {frame.t1, frame.t2}) {
        Mat3 dt = t * frame.n.transpose();
        double mixed = (w_unchecked(model, Mat3(base + h * dn + h * dt)) -
                        w_unchecked(model, Mat3(base + h * dn - h * dt)) -
                        w_unchecked(model, Mat3(base - h * dn + h * dt)) +
                        w_unchecked(model, Mat3(base - h * dn - h * dt))) /
                       (4.0 * h * h);
        worst = std::max(worst, std::abs(mixed));
    }
    return worst;
}

std::vector<ThetaSample> landscape_theta(const MaterialModel& model, const Mat2& f, int samples) {
    require_dim(model, 2);
    if (samples < 8) throw std::invalid_argument("landscape_theta requires samples >= 8");
    std::vector<ThetaSample> out;
    out.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        double theta = M_PI * static_cast<double>(k) / static_cast<double>(samples - 1);
        Vec2 n(std::cos(theta), std::sin(theta));
        out.push_back({theta, effective_energy(model, f, n).energy});
    }
    return out;
}

std::vector<int> landscape_local_minima(const std::vector<ThetaSample>& samples) {
    std::vector<int> minima;
    const int m = static_cast<int>(samples.size()) - 1;  // drop duplicated endpoint
    if (m < 3) return minima;
    for (int i = 0; i < m; ++i) {
        double v = samples[i].wd;
        double prev = samples[(i - 1 + m) % m].wd;
        double next = samples[(i + 1) % m].wd;
        if (v < prev && v < next) minima.push_back(i);
    }
    return minima;
}

}  // namespace qrpf
