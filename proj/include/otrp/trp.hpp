#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "otrp/eig.hpp"

namespace otrp {

// min 1/2 x'Qx + g'x  subject to  ||x|| <= radius
struct TrpProblem {
    Eigen::MatrixXd Q;
    Eigen::VectorXd g;
    double radius = 1.0;

    void validate() const;
};

struct TrpSolution {
    Eigen::VectorXd x;
    double lambda = 0.0;
    bool boundary_active = false;
    int newton_iterations = 0;
};

// Raised when the dual iteration cap is exhausted; carries the best iterate.
class TrpIterationError : public std::runtime_error {
public:
    TrpIterationError(const std::string& msg, Eigen::VectorXd best_x_, double lambda_,
                      double residual_)
        : std::runtime_error(msg),
          best_x(std::move(best_x_)),
          lambda(lambda_),
          residual(residual_) {}

    Eigen::VectorXd best_x;
    double lambda;
    double residual;
};

// x(lambda) = -V diag(1/(mu_k + lambda)) V' g. Requires mu_min + lambda > 0.
Eigen::VectorXd curve_point(const EigenFactorization& f, const Eigen::VectorXd& g, double lambda);

// ||x(lambda)||^2 and its lambda-derivative, in the eigenbasis (alpha = V' g).
struct CurveNormSq {
    double value;
    double derivative;
};
CurveNormSq curve_norm_sq(const EigenFactorization& f, const Eigen::VectorXd& alpha,
                          double lambda);

// Full solve on a factored problem. tol bounds the relative boundary residual
// | ||x|| - radius | <= tol * radius for boundary-active solutions.
TrpSolution trp_solve_factored(const EigenFactorization& f, const Eigen::VectorXd& g,
                               double radius, double tol = 1e-10, int max_iters = 100);

TrpSolution trp_solve(const TrpProblem& p, double tol = 1e-10, int max_iters = 100);

// One safeguarded Newton update of the block dual on the unit ball, then a
// feasibility clamp of lambda toward the feasible side of the bracket.
// Guarantees ||y|| <= 1 + 1e-9 on return.
struct TrpStepResult {
    Eigen::VectorXd y;
    double lambda;
};
TrpStepResult trp_step(const EigenFactorization& f, const Eigen::VectorXd& c,
                       std::optional<double> lambda_prev);

}  // namespace otrp
