#include "qrpf/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace qrpf::optim {

namespace {
constexpr double kGolden = 0.6180339887498949;

bool finite(double v) { return std::isfinite(v); }
}  // namespace

ScalarResult minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                             double bracket_tol) {
    ScalarResult res;
    double a = lo, b = hi;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int it = 0;
    while (b - a > bracket_tol * (1.0 + std::abs(a) + std::abs(b)) && it < 200) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
        ++it;
    }
    double x = 0.5 * (a + b);
    double fx = f(x);
    // Newton polish on central FD derivatives, kept inside the bracket.
    for (int k = 0; k < 3; ++k) {
        double h = 1e-6 * std::max(1.0, std::abs(x));
        double fp = f(x + h), fm = f(x - h);
        double d1 = (fp - fm) / (2 * h);
        double d2 = (fp - 2 * fx + fm) / (h * h);
        if (!(d2 > 0.0)) break;
        double xn = x - d1 / d2;
        if (!(xn > lo && xn < hi)) break;
        double fn = f(xn);
        if (fn <= fx) {
            x = xn;
            fx = fn;
        } else {
            break;
        }
        ++it;
    }
    res.x = x;
    res.value = fx;
    res.iterations = it;
    return res;
}

MinimizeResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                             const BfgsOptions& opts) {
    const int n = static_cast<int>(x0.size());
    MinimizeResult res;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd g(n);
    double fx = f(x, &g);

    Eigen::MatrixXd hinv;  // full-BFGS inverse Hessian
    if (opts.memory == 0) hinv = Eigen::MatrixXd::Identity(n, n);
    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;
    double h0_scale = 1.0;

    const double tol = opts.gradient_tol * std::max(opts.gradient_scale, 1e-300);
    for (int iter = 0; iter <= opts.max_iterations; ++iter) {
        res.iterations = iter;
        double gnorm = g.lpNorm<Eigen::Infinity>();
        if (gnorm <= tol) {
            res.status = Status::Converged;
            break;
        }
        if (iter == opts.max_iterations) {
            res.status = Status::MaxIterations;
            break;
        }

        Eigen::VectorXd p;
        if (opts.memory == 0) {
            p = -(hinv * g);
        } else {
            // L-BFGS two-loop recursion
            p = -g;
            std::vector<double> alpha(s_hist.size());
            for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
                alpha[i] = rho_hist[i] * s_hist[i].dot(p);
                p -= alpha[i] * y_hist[i];
            }
            p *= h0_scale;
            for (std::size_t i = 0; i < s_hist.size(); ++i) {
                double beta = rho_hist[i] * y_hist[i].dot(p);
                p += (alpha[i] - beta) * s_hist[i];
            }
        }
        double slope = g.dot(p);
        if (!(slope < 0.0)) {  // reset to steepest descent
            p = -g;
            slope = -g.squaredNorm();
            if (opts.memory == 0) hinv.setIdentity();
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            h0_scale = 1.0;
        }

        double t = 1.0;
        Eigen::VectorXd xt(n), gt(n);
        double ft = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xt = x + t * p;
            if (opts.box0) xt[0] = std::min(std::max(xt[0], opts.lo0), opts.hi0);
            ft = f(xt, &gt);
            if (finite(ft) && ft <= fx + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            // near the minimum value differences underflow rounding; accept
            // rounding-neutral steps that still shrink the gradient
            if (finite(ft) && ft <= fx + 1e-14 * std::abs(fx) &&
                gt.lpNorm<Eigen::Infinity>() < 0.9 * gnorm) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            res.status = Status::LineSearchStall;
            break;
        }

        Eigen::VectorXd s = xt - x;
        Eigen::VectorXd yv = gt - g;
        double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            if (opts.memory == 0) {
                Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
                Eigen::MatrixXd v = eye - (s * yv.transpose()) / sy;
                hinv = v * hinv * v.transpose() + (s * s.transpose()) / sy;
            } else {
                s_hist.push_back(s);
                y_hist.push_back(yv);
                rho_hist.push_back(1.0 / sy);
                if (static_cast<int>(s_hist.size()) > opts.memory) {
                    s_hist.pop_front();
                    y_hist.pop_front();
                    rho_hist.pop_front();
                }
                h0_scale = sy / yv.squaredNorm();
            }
        }
        x = xt;
        g = gt;
        fx = ft;
    }
    res.x = x;
    res.value = fx;
    res.gradient_norm = g.lpNorm<Eigen::Infinity>();
    return res;
}

MinimizeResult minimize_projected(const Objective& f,
                                  const std::function<void(Eigen::VectorXd&)>& project,
                                  const Eigen::VectorXd& x0, const SpgOptions& opts) {
    MinimizeResult res;
    Eigen::VectorXd x = x0;
    project(x);
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd g(n), gt(n);
    double fx = f(x, &g);
    double step = 1.0;
    const double tol = opts.step_tol * std::max(opts.step_scale, 1e-300);

    for (int iter = 0; iter <= opts.max_iterations; ++iter) {
        res.iterations = iter;
        Eigen::VectorXd xp = x - g;
        project(xp);
        double pgnorm = (x - xp).lpNorm<Eigen::Infinity>();
        if (pgnorm <= tol) {
            res.status = Status::Converged;
            break;
        }
        if (iter == opts.max_iterations) {
            res.status = Status::MaxIterations;
            break;
        }

        double t = step;
        Eigen::VectorXd xt;
        double ft = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xt = x - t * g;
            project(xt);
            Eigen::VectorXd d = xt - x;
            ft = f(xt, &gt);
            if (finite(ft) && ft <= fx + 1e-4 * g.dot(d)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            res.status = Status::LineSearchStall;
            break;
        }

        Eigen::VectorXd s = xt - x;
        Eigen::VectorXd yv = gt - g;
        double sy = s.dot(yv);
        // Barzilai-Borwein step for the next iterate
        step = (sy > 1e-14 * s.norm() * yv.norm()) ? s.squaredNorm() / sy : 1.0;
        step = std::min(std::max(step, 1e-10), 1e10);
        x = xt;
        g = gt;
        fx = ft;
    }
    res.x = x;
    res.value = fx;
    Eigen::VectorXd xp = x - g;
    project(xp);
    res.gradient_norm = (x - xp).lpNorm<Eigen::Infinity>();
    return res;
}

}  // namespace qrpf::optim
