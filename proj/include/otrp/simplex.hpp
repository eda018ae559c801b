#pragma once

#include <Eigen/Core>

namespace otrp {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::iteration_limit;
    Eigen::VectorXd x;
    double objective = 0.0;
};

// min c'x  subject to  A x >= b, x >= 0.
// Dense two-phase tableau simplex with Bland's rule (anti-cycling).
LpResult simplex_min(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& c, int max_pivots = 100000);

}  // namespace otrp
