#ifndef QRPF_OPTIM_HPP
#define QRPF_OPTIM_HPP

#include <Eigen/Dense>
#include <functional>

namespace qrpf::optim {

enum class Status { Converged, MaxIterations, LineSearchStall };

struct ScalarResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
};

/// Minimize a strictly unimodal scalar function. Golden-section bracketing
/// down to `bracket_tol`, then a few safeguarded Newton polish steps on
/// finite-difference derivatives.
ScalarResult minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                             double bracket_tol = 1e-10);

/// Objective callback: returns the value at x; fills *grad when non-null.
/// Non-finite values are treated as infeasible by the line searches.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct BfgsOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-10;  ///< on the inf-norm of the gradient
    double gradient_scale = 1.0;
    int memory = 0;       ///< 0: full BFGS; >0: L-BFGS with that history
    bool box0 = false;    ///< clamp coordinate 0 into [lo0, hi0]
    double lo0 = 0.0;
    double hi0 = 0.0;
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    Status status = Status::MaxIterations;
};

/// (L-)BFGS with Armijo backtracking. Energy never increases across iterates.
MinimizeResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                             const BfgsOptions& opts);

struct SpgOptions {
    int max_iterations = 2000;
    double step_tol = 1e-10;  ///< on the projected-gradient step inf-norm
    double step_scale = 1.0;
};

/// Monotone spectral projected gradient over a convex set given by `project`.
MinimizeResult minimize_projected(const Objective& f,
                                  const std::function<void(Eigen::VectorXd&)>& project,
                                  const Eigen::VectorXd& x0, const SpgOptions& opts);

}  // namespace qrpf::optim

#endif
