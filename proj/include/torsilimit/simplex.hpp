#pragma once

#include <Eigen/Dense>

namespace torsilimit {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    bool nonunique = false;  ///< a zero reduced cost existed at the optimum
    int iterations = 0;
};

/// maximize c'x subject to A x <= b, lower <= x <= upper.
/// Bounded-variable two-phase primal simplex with Bland's rule. Structural
/// bounds must be finite; feasibility tolerance defaults to 1e-9.
LpSolution simplex_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                         const Eigen::VectorXd& b, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper, double tol = 1e-9);

}  // namespace torsilimit
