#include "otrp/trp.hpp"

#include <algorithm>
#include <cmath>

namespace otrp {

namespace {

constexpr double kStepFeasTol = 1e-12;  // keeps corridor margins well inside 1e-9

void check_pole(double mu_min, double lambda) {
    if (!(mu_min + lambda > 0.0))
        throw std::invalid_argument("curve evaluation at or beyond the pole: mu_min + lambda = " +
                                    std::to_string(mu_min + lambda));
}

}  // namespace

void TrpProblem::validate() const {
    if (Q.rows() == 0 || Q.rows() != Q.cols())
        throw std::invalid_argument("TrpProblem: Q must be square and non-empty");
    if (g.size() != Q.rows())
        throw std::invalid_argument("TrpProblem: g dimension does not match Q");
    const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("TrpProblem: Q not symmetric");
    if (!(radius > 0.0)) throw std::invalid_argument("TrpProblem: radius must be positive");
}

Eigen::VectorXd curve_point(const EigenFactorization& f, const Eigen::VectorXd& g,
                            double lambda) {
    if (g.size() != f.dim())
        throw std::invalid_argument("curve_point: dimension mismatch");
    check_pole(f.min_eigenvalue(), lambda);
    const Eigen::VectorXd alpha = f.eigenvectors.transpose() * g;
    const Eigen::VectorXd scaled =
        (alpha.array() / (f.eigenvalues.array() + lambda)).matrix();
    return -(f.eigenvectors * scaled);
}

CurveNormSq curve_norm_sq(const EigenFactorization& f, const Eigen::VectorXd& alpha,
                          double lambda) {
    if (alpha.size() != f.dim())
        throw std::invalid_argument("curve_norm_sq: dimension mismatch");
    check_pole(f.min_eigenvalue(), lambda);
    const auto denom = f.eigenvalues.array() + lambda;
    const auto a2 = alpha.array().square();
    CurveNormSq out;
    out.value = (a2 / denom.square()).sum();
    out.derivative = -2.0 * (a2 / denom.cube()).sum();
    return out;
}

TrpSolution trp_solve_factored(const EigenFactorization& f, const Eigen::VectorXd& g,
                               double radius, double tol, int max_iters) {
    if (!(tol > 0.0 && tol <= 1e-2))
        throw std::invalid_argument("trp_solve: tol must lie in (0, 1e-2]");
    if (!(radius > 0.0)) throw std::invalid_argument("trp_solve: radius must be positive");
    if (!(f.min_eigenvalue() > 0.0))
        throw std::invalid_argument(
            "trp_solve: Q must be positive definite; indefinite and semidefinite problems are "
            "unsupported (min eigenvalue " +
            std::to_string(f.min_eigenvalue()) + ")");

    const Eigen::VectorXd alpha = f.eigenvectors.transpose() * g;

    TrpSolution sol;
    const Eigen::VectorXd x0 = curve_point(f, g, 0.0);
    const double n0 = x0.norm();
    if (n0 <= radius) {
        sol.x = x0;
        sol.lambda = 0.0;
        sol.boundary_active = std::abs(n0 - radius) <= tol * radius;
        sol.newton_iterations = 0;
        return sol;
    }

    double lo = 0.0;
    double hi = std::max(0.0, g.norm() / radius - f.min_eigenvalue());
    if (!(hi > lo)) hi = lo + 1.0;  // numerically exterior yet bound collapsed; widen

    double lambda = 0.0;
    double best_lambda = 0.0;
    double best_resid = std::abs(n0 - radius);

    for (int it = 1; it <= max_iters; ++it) {
        const CurveNormSq ns = curve_norm_sq(f, alpha, lambda);
        const double nrm = std::sqrt(ns.value);
        const double resid = std::abs(nrm - radius);
        if (resid < best_resid) {
            best_resid = resid;
            best_lambda = lambda;
        }
        if (resid <= tol * radius) {
            sol.x = curve_point(f, g, lambda);
            sol.lambda = lambda;
            sol.boundary_active = true;
            sol.newton_iterations = it - 1;
            return sol;
        }
        if (nrm > radius)
            lo = lambda;
        else
            hi = std::min(hi, lambda);

        // Newton on phi(l) = 1/radius - 1/||x(l)||, safeguarded by bisection
        const double phi = 1.0 / radius - 1.0 / nrm;
        const double dphi = 0.5 * ns.derivative / (ns.value * nrm);
        double next = lambda - phi / dphi;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        lambda = next;
    }

    throw TrpIterationError("trp_solve: dual iteration cap (" + std::to_string(max_iters) +
                                ") exhausted; best boundary residual " +
                                std::to_string(best_resid),
                            curve_point(f, g, best_lambda), best_lambda, best_resid);
}

TrpSolution trp_solve(const TrpProblem& p, double tol, int max_iters) {
    p.validate();
    const EigenFactorization f = eig_decompose(p.Q);
    return trp_solve_factored(f, p.g, p.radius, tol, max_iters);
}

TrpStepResult trp_step(const EigenFactorization& f, const Eigen::VectorXd& c,
                       std::optional<double> lambda_prev) {
    if (c.size() != f.dim())
        throw std::invalid_argument("trp_step: dimension mismatch");
    if (!(f.min_eigenvalue() > 0.0))
        throw std::invalid_argument("trp_step: block must be positive definite");

    const Eigen::VectorXd x0 = curve_point(f, c, 0.0);
    if (x0.norm() <= 1.0) return {x0, 0.0};  // interior; lambda_prev irrelevant

    const Eigen::VectorXd alpha = f.eigenvectors.transpose() * c;
    auto norm_at = [&](double lam) {
        return std::sqrt(curve_norm_sq(f, alpha, lam).value);
    };

    // ||x(cap)|| <= ||c|| / (mu_min + cap) = 1, so cap is on the feasible side
    const double cap = std::max(0.0, c.norm() - f.min_eigenvalue());
    double lo = 0.0, hi = cap;

    double lam = lambda_prev ? std::clamp(*lambda_prev, lo, hi) : 0.5 * (lo + hi);
    const CurveNormSq ns = curve_norm_sq(f, alpha, lam);
    const double nrm = std::sqrt(ns.value);
    if (nrm > 1.0)
        lo = lam;
    else
        hi = lam;

    const double phi = 1.0 - 1.0 / nrm;
    const double dphi = 0.5 * ns.derivative / (ns.value * nrm);
    double next = lam - phi / dphi;
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);

    // Clamp to the feasible side: when the update lands outside the ball,
    // bisect against the feasible bracket end until the norm is admissible.
    double n_next = norm_at(next);
    if (n_next > 1.0 + kStepFeasTol) {
        double flo = next, fhi = hi;
        for (int k = 0; k < 80; ++k) {
            const double mid = 0.5 * (flo + fhi);
            if (norm_at(mid) > 1.0 + kStepFeasTol)
                flo = mid;
            else
                fhi = mid;
            if (fhi - flo <= 1e-16 * std::max(1.0, fhi)) break;
        }
        next = fhi;
    }

    return {curve_point(f, c, next), next};
}

}  // namespace otrp
