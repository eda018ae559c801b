#pragma once

#include <vector>

#include "otrp/corridor.hpp"

namespace otrp {

// Dimensions of the lifted parameterization: N_q configuration coordinates,
// blocks of N_y lifted coordinates, N_J blocks combined along the curve.
struct LiftConfig {
    int N_q = 0;
    int N_y = 0;
    int N_J = 0;

    int proj_curve_degree() const { return N_y / N_q - 1; }
    int block_curve_degree() const { return N_J - 1; }
    int per_axis() const { return N_y / N_q; }
    void validate() const;
};

// One point of the lifted parameter space: N_J blocks, each inside the unit
// ball of R^{N_y}. Flattening is block-major (block 0 first).
struct ParamPoint {
    std::vector<Eigen::VectorXd> blocks;

    static ParamPoint zero(const LiftConfig& cfg);
    static ParamPoint from_flat(const LiftConfig& cfg, const Eigen::VectorXd& y);
    Eigen::VectorXd flatten() const;
    void validate() const;
};

// Unit-normalized Bernstein basis b(eps)/||b(eps)|| and its derivatives.
Eigen::VectorXd proj_basis(const LiftConfig& cfg, double eps, int order);

// I_{N_q} (x) basis-row; rows are orthonormal at order 0.
Eigen::MatrixXd proj_matrix(const LiftConfig& cfg, double eps, int order);

// Convex block-combination weights: Bernstein basis of degree N_J - 1.
Eigen::VectorXd block_basis(const LiftConfig& cfg, double eps, int order);

// q(eps, y) = C^{-1}(eps) L_proj(eps) sum_j B_j(eps) y_j + center(eps).
class LiftedMap {
public:
    LiftedMap(LiftConfig cfg, CorridorSpec corridor);

    const LiftConfig& config() const { return cfg_; }
    const CorridorSpec& corridor() const { return corridor_; }

    // n-th eps-derivative of the flattened-parameter-to-configuration map,
    // N_q x (N_J * N_y), assembled with the general Leibniz rule. n <= 2.
    Eigen::MatrixXd map_matrix(double eps, int order) const;

    Eigen::VectorXd traj_eval(const ParamPoint& y, double eps, int order) const;

    // Radius of the largest parameter-space ball around the minimum-norm
    // preimage of q; single-block maps only (N_J == 1).
    double feasible_radius(double eps, const Eigen::VectorXd& q) const;

private:
    LiftConfig cfg_;
    CorridorSpec corridor_;
};

}  // namespace otrp
