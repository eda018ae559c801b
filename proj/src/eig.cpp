#include "otrp/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace otrp {

Eigen::MatrixXd EigenFactorization::reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

namespace {

double off_diag_norm(const Eigen::MatrixXd& A) {
    double s = 0.0;
    for (int p = 0; p < A.rows(); ++p)
        for (int q = 0; q < A.cols(); ++q)
            if (p != q) s += A(p, q) * A(p, q);
    return std::sqrt(s);
}

}  // namespace

EigenFactorization eig_decompose(const Eigen::MatrixXd& Q, const JacobiOptions& opts) {
    if (Q.rows() == 0 || Q.rows() != Q.cols())
        throw std::invalid_argument("eig_decompose: input must be square and non-empty");
    const int n = int(Q.rows());

    const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw std::invalid_argument("eig_decompose: input not symmetric (max asymmetry " +
                                    std::to_string(asym) + ")");

    Eigen::MatrixXd A = 0.5 * (Q + Q.transpose());
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);

    const double frob = std::max(A.norm(), 1e-300);
    const double stop = opts.off_diag_tol * frob;
    const double skip = 0.01 * stop / double(n);

    bool converged = false;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        if (off_diag_norm(A) <= stop) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= skip) continue;

                const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // A <- J^T A J with the rotation acting in the (p,q) plane
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                A(p, q) = 0.0;
                A(q, p) = 0.0;

                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged && off_diag_norm(A) > stop)
        throw std::runtime_error("eig_decompose: Jacobi sweeps exhausted (off-diagonal norm " +
                                 std::to_string(off_diag_norm(A)) + ")");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return A(a, a) < A(b, b); });

    EigenFactorization f;
    f.eigenvalues.resize(n);
    f.eigenvectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        f.eigenvalues(k) = A(order[k], order[k]);
        f.eigenvectors.col(k) = V.col(order[k]);
    }
    return f;
}

}  // namespace otrp
