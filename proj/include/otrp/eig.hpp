#pragma once

#include <Eigen/Core>

namespace otrp {

// Spectral factorization Q = V diag(mu) V^T with eigenvalues ascending.
struct EigenFactorization {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // column k pairs with eigenvalues(k)

    int dim() const { return int(eigenvalues.size()); }
    double min_eigenvalue() const { return eigenvalues(0); }
    double max_eigenvalue() const { return eigenvalues(eigenvalues.size() - 1); }
    Eigen::MatrixXd reconstruct() const;
};

struct JacobiOptions {
    double off_diag_tol = 1e-12;  // relative to the Frobenius norm of the input
    int max_sweeps = 30;
};

// Cyclic Jacobi eigensolver for small dense symmetric matrices.
// Throws std::invalid_argument on non-symmetric input and std::runtime_error
// when the sweep cap is reached before the off-diagonal norm is resolved.
EigenFactorization eig_decompose(const Eigen::MatrixXd& Q, const JacobiOptions& opts = {});

}  // namespace otrp
